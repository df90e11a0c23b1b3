#pragma once

#include <string>

#include <json.hpp>

#include "metricext/extension.hpp"
#include "metricext/space.hpp"

namespace metricext {

using Json = nlohmann::json;

/// A parsed space file: the point set, the distance data with its claimed
/// flag, and the optional distinguished subset.
struct ParsedSpace {
  Space space;
  MetricTable metric;
  std::optional<Subset> subset;
  MetricFlag claimed = MetricFlag::Metric;
  bool lazy = false;
  int default_depth = 64;
};

/// Finite schema: {"points": [...], "basepoint": "a", "metric": [["0",...]],
/// "subset": ["a","b"], "flag": "ultrametric"}. Lazy schema:
/// {"generator": "naturals"|"dyadic", "block_size": 1, "metric": "absdiff" |
/// {"name": "powmax", "base": "2"} | "discrete01", "subset": "evens"|...,
/// "flag": ...}. Schema violations raise SchemaError with a field path.
ParsedSpace parse_space_json(const Json& j);
ParsedSpace parse_space_file(const std::string& path);

/// {"kind":"geometric","base":"2","scale":"1"} | {"kind":"halfline"} |
/// {"kind":"list","values":["0","1","5/2"]}.
ValueSet parse_valueset_json(const Json& j);
Json valueset_to_json(const ValueSet& s);

Json report_to_json(const Report& rep, const Space* x = nullptr);
Json table_prefix_json(const Space& x, const MetricTable& m, int points);
Json witness_prefix_json(const ProperWitness& w, int blocks);
Json trace_prefix_json(const Space& x, const std::function<TraceTerm(PointId, PointId)>& trace,
                       int points);

}  // namespace metricext
