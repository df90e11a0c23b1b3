#include "metricext/jsonio.hpp"

#include <fstream>

#include "metricext/errors.hpp"

namespace metricext {

namespace {

[[noreturn]] void schema_fail(const std::string& where, const std::string& what) {
  fail(Errc::SchemaError, where + ": " + what);
}

Rat entry(const Json& j, const std::string& where) {
  if (j.is_string()) return parse_rat(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.get<long>());
  schema_fail(where, "rationals are strings \"p/q\" (or integers)");
}

struct BuiltinMetricDesc {
  std::string name = "absdiff";
  Rat base = Rat(2);
  Rat scale = Rat(1);
};

BuiltinMetricDesc parse_lazy_metric(const Json& j) {
  BuiltinMetricDesc desc;
  if (j.is_string()) {
    desc.name = j.get<std::string>();
  } else if (j.is_object()) {
    if (!j.contains("name")) schema_fail("metric", "missing \"name\"");
    desc.name = j.at("name").get<std::string>();
    if (j.contains("base")) desc.base = entry(j.at("base"), "metric.base");
    if (j.contains("scale")) desc.scale = entry(j.at("scale"), "metric.scale");
  } else {
    schema_fail("metric", "expected a builtin name or an object");
  }
  return desc;
}

MetricTable builtin_lazy_metric(const Space& x, const std::string& generator,
                                const BuiltinMetricDesc& desc, MetricFlag* claimed) {
  Space xs = x;
  if (desc.name == "absdiff") {
    Rat scale = desc.scale;
    auto m = MetricTable::callback(
        [xs, scale](PointId i, PointId j) -> Rat {
          return scale * rat_abs(xs.value(i) - xs.value(j));
        },
        MetricFlag::Metric);
    if (generator == "naturals") {
      // block values are increasing, so the first value of each block is a
      // valid tail bound; dyadics are not monotone and carry no witness.
      const Rat vp = xs.value(xs.basepoint());
      m.witness = ProperWitness::from(
          [xs, scale, vp](int k) -> Rat {
            auto [f, e] = xs.block_span(k);
            Rat lo = xs.value(f) - vp;
            return lo > 0 ? Rat(scale * lo) : Rat(0);
          },
          "beta(k) = scale * (first value of block k - v(p))");
    }
    *claimed = MetricFlag::Metric;
    return m;
  }
  if (desc.name == "powmax") {
    if (desc.base <= 1) schema_fail("metric.base", "powmax base must exceed 1");
    SporadicSet ladder(desc.base, Rat(1));
    auto powv = [ladder](const Rat& v) {
      return ladder.ladder(static_cast<long>(v.get_num().get_si()));
    };
    auto m = MetricTable::callback(
        [xs, powv](PointId i, PointId j) {
          if (i == j) return Rat(0);
          return powv(rat_max(xs.value(i), xs.value(j)));
        },
        MetricFlag::Ultra);
    m.value_set = ValueSet::geometric(desc.base, Rat(1));
    if (generator == "naturals") {
      const Rat vp = xs.value(xs.basepoint());
      m.witness = ProperWitness::from(
          [xs, powv, vp](int k) {
            auto [f, e] = xs.block_span(k);
            if (xs.value(f) <= vp) return Rat(0);
            return powv(xs.value(f));
          },
          "beta(k) = base^(first value of block k)");
    }
    *claimed = MetricFlag::Ultra;
    return m;
  }
  if (desc.name == "discrete01") {
    auto m = MetricTable::callback(
        [](PointId i, PointId j) { return i == j ? Rat(0) : Rat(1); }, MetricFlag::Ultra);
    *claimed = MetricFlag::Ultra;
    return m;  // bounded: properness fails on infinite spaces, no witness
  }
  schema_fail("metric", "unknown builtin metric '" + desc.name + "'");
}

Subset parse_lazy_subset(const Json& j, const Space& x) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "all") return Subset::everything();
    if (s == "evens") return Subset::evens();
    if (s == "odds") return Subset::odds();
    if (s == "integers") return Subset::integer_points();
    schema_fail("subset", "unknown builtin subset '" + s + "'");
  }
  if (j.is_object() && j.contains("multiples"))
    return Subset::multiples(j.at("multiples").get<long>());
  if (j.is_array()) {
    std::vector<PointId> ids;
    x.ensure_blocks(8);
    for (const auto& n : j) {
      auto id = x.find_name(n.get<std::string>());
      if (!id) schema_fail("subset", "point '" + n.get<std::string>() + "' not in the generated prefix");
      ids.push_back(*id);
    }
    return Subset::of_ids(std::move(ids));
  }
  schema_fail("subset", "expected a builtin name, {\"multiples\": m} or a name array");
}

ParsedSpace parse_finite(const Json& j) {
  ParsedSpace out{Space::finite({"_"}), MetricTable{}, std::nullopt, MetricFlag::Metric, false};
  const auto& pts = j.at("points");
  if (!pts.is_array() || pts.empty()) schema_fail("points", "nonempty array required");
  std::vector<std::string> names;
  for (const auto& p : pts) names.push_back(p.get<std::string>());
  PointId base = 0;
  if (j.contains("basepoint")) {
    const std::string b = j.at("basepoint").get<std::string>();
    auto it = std::find(names.begin(), names.end(), b);
    if (it == names.end()) schema_fail("basepoint", "'" + b + "' is not a point");
    base = static_cast<PointId>(it - names.begin());
  }
  out.space = Space::finite(names, base);
  const int n = static_cast<int>(names.size());

  if (j.contains("flag")) out.claimed = parse_flag(j.at("flag").get<std::string>());

  const auto& rows = j.at("metric");
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    schema_fail("metric", "expected " + std::to_string(n) + " rows");
  std::vector<Rat> e(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const auto& row = rows.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      schema_fail("metric[" + std::to_string(i) + "]", "expected " + std::to_string(n) + " entries");
    for (int k = 0; k < n; ++k)
      e[static_cast<std::size_t>(i) * n + k] =
          entry(row.at(k), "metric[" + std::to_string(i) + "][" + std::to_string(k) + "]");
  }
  for (int i = 0; i < n; ++i) {
    if (e[static_cast<std::size_t>(i) * n + i] != 0)
      schema_fail("diagonal", "d(" + names[i] + "," + names[i] + ") must be 0");
    for (int k = i + 1; k < n; ++k) {
      if (e[static_cast<std::size_t>(i) * n + k] != e[static_cast<std::size_t>(k) * n + i])
        schema_fail("symmetry", "d(" + names[i] + "," + names[k] + ") != d(" + names[k] + "," +
                                    names[i] + ")");
      if (e[static_cast<std::size_t>(i) * n + k] < 0)
        schema_fail("negativity", "d(" + names[i] + "," + names[k] + ") < 0");
    }
  }
  out.metric = MetricTable::dense(n, std::move(e), out.claimed);

  if (j.contains("subset")) {
    std::vector<PointId> ids;
    for (const auto& nm : j.at("subset")) {
      const std::string s = nm.get<std::string>();
      auto it = std::find(names.begin(), names.end(), s);
      if (it == names.end()) schema_fail("subset", "'" + s + "' is not a point");
      ids.push_back(static_cast<PointId>(it - names.begin()));
    }
    out.subset = Subset::of_ids(std::move(ids));
  }
  return out;
}

ParsedSpace parse_lazy(const Json& j) {
  const std::string gen = j.at("generator").get<std::string>();
  Space x = Space::finite({"_"});
  if (gen == "naturals") {
    const int bs = j.contains("block_size") ? j.at("block_size").get<int>() : 1;
    x = Space::naturals(bs);
  } else if (gen == "dyadic") {
    x = Space::dyadics();
  } else {
    schema_fail("generator", "unknown generator '" + gen + "' (builtins: naturals, dyadic)");
  }

  ParsedSpace out{x, MetricTable{}, std::nullopt, MetricFlag::Metric, true};
  BuiltinMetricDesc desc;
  if (j.contains("metric")) desc = parse_lazy_metric(j.at("metric"));
  MetricFlag claimed = MetricFlag::Metric;
  out.metric = builtin_lazy_metric(x, gen, desc, &claimed);
  out.claimed = j.contains("flag") ? parse_flag(j.at("flag").get<std::string>()) : claimed;
  out.metric.set_flag(out.claimed);
  if (j.contains("subset")) out.subset = parse_lazy_subset(j.at("subset"), x);
  return out;
}

}  // namespace

ParsedSpace parse_space_json(const Json& j) {
  if (!j.is_object()) schema_fail("root", "expected an object");
  if (j.contains("generator")) return parse_lazy(j);
  if (!j.contains("points")) schema_fail("root", "need \"points\" (finite) or \"generator\" (lazy)");
  return parse_finite(j);
}

ParsedSpace parse_space_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::SchemaError, "cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(Errc::SchemaError, std::string("invalid JSON: ") + e.what());
  }
  return parse_space_json(j);
}

ValueSet parse_valueset_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind")) schema_fail("valueset", "expected {\"kind\": ...}");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "halfline") return ValueSet::half_line();
  if (kind == "geometric")
    return ValueSet::geometric(entry(j.at("base"), "valueset.base"),
                               entry(j.at("scale"), "valueset.scale"));
  if (kind == "list") {
    std::vector<Rat> vals;
    for (const auto& v : j.at("values")) vals.push_back(entry(v, "valueset.values"));
    return ValueSet::explicit_list(std::move(vals));
  }
  schema_fail("valueset.kind", "unknown kind '" + kind + "'");
}

Json valueset_to_json(const ValueSet& s) {
  Json j;
  switch (s.kind()) {
    case ValueSetKind::HalfLine:
      j["kind"] = "halfline";
      break;
    case ValueSetKind::Geometric:
      j["kind"] = "geometric";
      j["base"] = format_rat(s.base());
      j["scale"] = format_rat(s.scale());
      break;
    case ValueSetKind::ExplicitList: {
      j["kind"] = "list";
      Json vals = Json::array();
      for (const Rat& v : s.values()) vals.push_back(format_rat(v));
      j["values"] = std::move(vals);
      break;
    }
  }
  return j;
}

Json report_to_json(const Report& rep, const Space* x) {
  Json j;
  j["pass"] = rep.pass;
  j["checks"] = rep.checks;
  j["summary"] = rep.summary;
  Json viol = Json::array();
  for (const auto& v : rep.violations) {
    Json e;
    e["kind"] = violation_name(v.kind);
    auto nm = [&](int id) -> Json {
      if (id < 0) return nullptr;
      if (x && id < x->generated_points()) return x->name(id);
      return id;
    };
    e["i"] = nm(v.i);
    e["j"] = nm(v.j);
    e["k"] = nm(v.k);
    e["detail"] = v.detail;
    viol.push_back(std::move(e));
  }
  j["violations"] = std::move(viol);
  return j;
}

Json table_prefix_json(const Space& x, const MetricTable& m, int points) {
  Json rows = Json::array();
  for (int i = 0; i < points; ++i) {
    Json row = Json::array();
    for (int j = 0; j < points; ++j) row.push_back(format_rat(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  Json out;
  Json names = Json::array();
  for (int i = 0; i < points; ++i) names.push_back(x.name(i));
  out["points"] = std::move(names);
  out["matrix"] = std::move(rows);
  return out;
}

Json witness_prefix_json(const ProperWitness& w, int blocks) {
  Json j;
  j["rule"] = w.rule;
  if (w.finite_trivial) {
    j["beta"] = "trivial (finite roster)";
    return j;
  }
  Json beta = Json::array();
  for (int k = 0; k < blocks; ++k) beta.push_back(format_rat(w.at(k)));
  j["beta"] = std::move(beta);
  return j;
}

Json trace_prefix_json(const Space& x, const std::function<TraceTerm(PointId, PointId)>& trace,
                       int points) {
  Json rows = Json::array();
  for (int i = 0; i < points; ++i) {
    Json row = Json::array();
    for (int j = 0; j < points; ++j)
      row.push_back(i == j ? "diagonal" : trace_name(trace(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace metricext
