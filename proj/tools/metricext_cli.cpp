// Batch front end: parse a space file, run one pipeline, emit a JSON report.
// Exit codes: 0 success, 1 a contract check failed, 2 usage/schema error.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#include "metricext/errors.hpp"
#include "metricext/extension.hpp"
#include "metricext/jsonio.hpp"

using namespace metricext;

namespace {

int g_depth = 64;

int env_depth() {
  if (const char* e = std::getenv("METRICEXT_DEPTH")) {
    const int v = std::atoi(e);
    if (v >= 1) return v;
  }
  return 64;
}

int prefix_points(const ParsedSpace& ps) {
  if (!ps.lazy) return ps.space.finite_size();
  return ps.space.ensure_blocks(g_depth);
}

Json input_summary(const ParsedSpace& ps, const std::string& path) {
  Json j;
  j["file"] = path;
  j["space"] = ps.space.describe();
  j["flag"] = flag_name(ps.claimed);
  j["lazy"] = ps.lazy;
  if (ps.subset) j["subset"] = ps.subset->describe();
  return j;
}

bool verify_input(const ParsedSpace& ps, bool no_verify, Json& out) {
  if (no_verify) return true;
  const int n = prefix_points(ps);
  Report rep = verify_axioms(ps.metric, ps.claimed, n);
  out["input-axioms"] = report_to_json(rep, &ps.space);
  return rep.pass;
}

int emit(const Json& report, bool ok) {
  std::cout << report.dump(2) << "\n";
  return ok ? 0 : 1;
}

Subset subset_or_fail(const ParsedSpace& ps) {
  if (!ps.subset) fail(Errc::SchemaError, "this command needs a \"subset\" in the space file");
  return *ps.subset;
}

// Checks shared by the extension reports: restriction identity on the
// A-prefix, the axiom oracle on the prefix, value-set closure when S is
// given, and the witness guarantee.
void extension_checks(const ParsedSpace& ps, const Subset& a, const MetricTable& d,
                      const ExtensionResult& res, const ValueSet* s, const Rat* eta, Json& out,
                      bool& ok) {
  const Space& x = ps.space;
  const int n = prefix_points(ps);

  Report restriction;
  auto members = a.members_upto(x, ps.lazy ? g_depth : 1);
  for (PointId i : members)
    for (PointId j : members) {
      ++restriction.checks;
      if (res.metric.at(i, j) != d.at(i, j))
        restriction.add({ViolationKind::Restriction, i, j, -1,
                         format_rat(res.metric.at(i, j)) + " != " + format_rat(d.at(i, j))});
    }
  restriction.summary = "restriction identity on |A| = " + std::to_string(members.size());
  out["restriction"] = report_to_json(restriction, &x);
  ok = ok && restriction.pass;

  Report axioms = verify_axioms(res.metric, res.metric.flag(), n);
  out["axioms"] = report_to_json(axioms, &x);
  ok = ok && axioms.pass;

  if (s) {
    Report closure;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        ++closure.checks;
        if (!s->contains(res.metric.at(i, j)))
          closure.add({ViolationKind::ValueSetClosure, i, j, -1, format_rat(res.metric.at(i, j))});
      }
    closure.summary = "value-set closure in " + s->describe();
    out["value-set"] = report_to_json(closure, &x);
    ok = ok && closure.pass;
  }

  if (res.metric.witness) {
    Report wit = certify_proper(x, res.metric, *res.metric.witness, ps.lazy ? g_depth : 1);
    out["witness"] = report_to_json(wit, &x);
    ok = ok && wit.pass;
  }

  if (eta && res.retraction) {
    Report density;
    for (PointId q = 0; q < n; ++q) {
      ++density.checks;
      const PointId rq = res.retraction->at(q);
      if (res.metric.at(q, rq) > *eta)
        density.add({ViolationKind::Density, q, rq, -1,
                     "D(x, r(x)) = " + format_rat(res.metric.at(q, rq)) + " > eta"});
      if (res.theta && res.metric.at(q, rq) > *res.theta)
        density.add({ViolationKind::Density, q, rq, -1,
                     "D(x, r(x)) > theta = " + format_rat(*res.theta)});
    }
    density.summary = "eta-density at eta = " + format_rat(*eta);
    out["density"] = report_to_json(density, &x);
    ok = ok && density.pass;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metricext: proper metric and ultrametric extension toolkit"};
  app.require_subcommand(1);

  std::string file, claim, point_name, radius, tau = "2", eta = "1", mode = "metric", vset_text;
  bool no_verify = false, open_ball = false, dense = false, far_first = false;
  long seed = 0;
  g_depth = env_depth();

  app.add_option("--depth", g_depth, "lazy scan depth in blocks (or METRICEXT_DEPTH)")
      ->check(CLI::Range(1, 1 << 20));
  app.add_flag("--no-verify", no_verify, "skip the input axiom cross-check");
  app.add_option("--seed", seed, "seed for randomized sweeps");

  auto* c_check = app.add_subcommand("check", "verify the claimed axioms of a space file");
  c_check->fallthrough();
  c_check->add_option("file", file)->required();
  c_check->add_option("--claim", claim, "override the claimed flag");

  auto* c_ball = app.add_subcommand("ball", "closed (or open) ball query");
  c_ball->fallthrough();
  c_ball->add_option("file", file)->required();
  c_ball->add_option("--point", point_name)->required();
  c_ball->add_option("--radius", radius)->required();
  c_ball->add_flag("--open", open_ball);

  auto* c_retract = app.add_subcommand("retract", "well-order retraction onto the subset");
  c_retract->fallthrough();
  c_retract->add_option("file", file)->required();
  c_retract->add_option("--tau", tau);
  c_retract->add_flag("--far-first", far_first, "use the far-first banded order");

  auto* c_extend = app.add_subcommand("extend", "extend the subset metric to the whole space");
  c_extend->fallthrough();
  c_extend->add_option("file", file)->required();
  c_extend->add_option("--mode", mode)->check(CLI::IsMember({"metric", "ultrametric"}));
  c_extend->add_flag("--dense", dense, "eta-dense variant");
  c_extend->add_option("--eta", eta);
  c_extend->add_option("--tau", tau);
  c_extend->add_option("--valueset", vset_text, "value set S as inline JSON");

  auto* c_quant = app.add_subcommand("quantize", "psi-quantize an ultrametric onto sporadic T");
  c_quant->fallthrough();
  c_quant->add_option("file", file)->required();
  c_quant->add_option("--valueset", vset_text, "value set S; T = sporadic_subset(S)");

  auto* c_prop = app.add_subcommand("properize", "join with a generated proper weight");
  c_prop->fallthrough();
  c_prop->add_option("file", file)->required();
  c_prop->add_option("--mode", mode)->check(CLI::IsMember({"metric", "ultrametric"}));
  c_prop->add_option("--valueset", vset_text, "value set S for the ultrametric mode");

  auto* c_iso = app.add_subcommand("isosceles", "isosceles scan of an ultrametric table");
  c_iso->fallthrough();
  c_iso->add_option("file", file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors are exit 2; --help stays 0
  }

  try {
    ParsedSpace ps = parse_space_file(file);
    Json report;
    report["input"] = input_summary(ps, file);
    bool ok = true;

    if (*c_check) {
      const MetricFlag fl = claim.empty() ? ps.claimed : parse_flag(claim);
      Report rep = verify_axioms(ps.metric, fl, prefix_points(ps));
      report["command"] = "check";
      report["result"] = report_to_json(rep, &ps.space);
      return emit(report, rep.pass);
    }

    if (*c_ball) {
      report["command"] = "ball";
      if (!verify_input(ps, no_verify, report)) return emit(report, false);
      auto id = ps.space.find_name(point_name);
      if (!id && ps.lazy) {
        ps.space.ensure_blocks(g_depth);
        id = ps.space.find_name(point_name);
      }
      if (!id) fail(Errc::SchemaError, "unknown point '" + point_name + "'");
      auto pts = ball(ps.space, ps.metric, *id, parse_rat(radius), open_ball);
      Json names = Json::array();
      for (PointId p : pts) names.push_back(ps.space.name(p));
      report["result"] = {{"center", point_name},
                          {"radius", radius},
                          {"open", open_ball},
                          {"ball", std::move(names)},
                          {"size", pts.size()}};
      return emit(report, true);
    }

    if (*c_iso) {
      report["command"] = "isosceles";
      Report rep = check_isosceles(ps.metric, prefix_points(ps));
      report["result"] = report_to_json(rep, &ps.space);
      return emit(report, rep.pass);
    }

    if (*c_retract) {
      report["command"] = "retract";
      if (!verify_input(ps, no_verify, report)) return emit(report, false);
      Subset a = subset_or_fail(ps);
      const Rat t = parse_rat(tau);
      Retraction r = bdhm_retract(ps.space, ps.metric, a, t,
                                  far_first ? OrderBias::FarFirst : OrderBias::NearFirst);
      const int n = prefix_points(ps);
      Json map;
      for (PointId q = 0; q < n; ++q) map[ps.space.name(q)] = ps.space.name(r.at(q));
      const Rat ratio = lipschitz_ratio(ps.space, r, ps.metric, n);
      Report contract = check_retraction(ps.space, ps.metric, a, r, n);
      ok = contract.pass && ratio <= t * t;
      report["result"] = {{"map", std::move(map)},
                          {"tau", format_rat(t)},
                          {"lipschitz-ratio", format_rat(ratio)},
                          {"bound", format_rat(t * t)},
                          {"contract", report_to_json(contract, &ps.space)}};
      return emit(report, ok);
    }

    if (*c_quant) {
      report["command"] = "quantize";
      if (!verify_input(ps, no_verify, report)) return emit(report, false);
      const ValueSet s = vset_text.empty() ? ValueSet::geometric(Rat(2), Rat(1))
                                           : parse_valueset_json(Json::parse(vset_text));
      const SporadicSet t = sporadic_subset(s);
      MetricTable w = quantize_metric(ps.space, ps.metric, t);
      const int n = prefix_points(ps);
      Report axioms = verify_axioms(w, MetricFlag::Ultra, n);
      Report dominated;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          ++dominated.checks;
          if (w.at(i, j) > ps.metric.at(i, j))
            dominated.add({ViolationKind::ValueSetClosure, i, j, -1, "psi(d) > d"});
        }
      dominated.summary = "w <= d entrywise";
      ok = axioms.pass && dominated.pass;
      report["result"] = {{"table", table_prefix_json(ps.space, w, n)},
                          {"axioms", report_to_json(axioms, &ps.space)},
                          {"dominated", report_to_json(dominated, &ps.space)}};
      return emit(report, ok);
    }

    if (*c_prop) {
      report["command"] = "properize";
      if (!verify_input(ps, no_verify, report)) return emit(report, false);
      const int n = prefix_points(ps);
      MetricTable out;
      if (mode == "metric") {
        RealFunction f = proper_function_into(ps.space, ValueSet::half_line());
        out = properize(ps.space, ps.metric, f);
      } else {
        const ValueSet s = vset_text.empty() ? ValueSet::geometric(Rat(2), Rat(1))
                                             : parse_valueset_json(Json::parse(vset_text));
        const SporadicSet t = sporadic_subset(s);
        RealFunction f = proper_function_into(ps.space, s);
        out = properize_ult(ps.space, ps.metric, s, t, f);
      }
      Report axioms = verify_axioms(out, out.flag(), n);
      ok = axioms.pass;
      report["result"] = {{"table", table_prefix_json(ps.space, out, n)},
                          {"axioms", report_to_json(axioms, &ps.space)}};
      if (out.witness) {
        report["result"]["witness"] = witness_prefix_json(*out.witness, ps.lazy ? g_depth : 1);
        Report wit = certify_proper(ps.space, out, *out.witness, ps.lazy ? g_depth : 1);
        report["result"]["witness-check"] = report_to_json(wit, &ps.space);
        ok = ok && wit.pass;
      }
      return emit(report, ok);
    }

    if (*c_extend) {
      report["command"] = "extend";
      if (!verify_input(ps, no_verify, report)) return emit(report, false);
      Subset a = subset_or_fail(ps);
      const Rat t = parse_rat(tau);
      const Rat h = parse_rat(eta);
      ExtensionResult res;
      std::optional<ValueSet> s;
      if (mode == "ultrametric")
        s = vset_text.empty() ? ValueSet::geometric(Rat(2), Rat(1))
                              : parse_valueset_json(Json::parse(vset_text));
      if (mode == "metric" && !dense) {
        res = extend_metric_proper(ps.space, a, ps.metric);
      } else if (mode == "metric") {
        Retraction r = make_retraction_onto(ps.space, a, t);
        res = extend_metric_proper_dense(ps.space, a, ps.metric, h, r);
      } else if (!dense) {
        res = extend_ultrametric_proper(ps.space, a, ps.metric, *s, t);
      } else {
        res = extend_ultrametric_proper_dense(ps.space, a, ps.metric, *s, h, t);
      }
      const int n = prefix_points(ps);
      report["result"]["pipeline"] = res.pipeline;
      report["result"]["metric"] = table_prefix_json(ps.space, res.metric, n);
      report["result"]["trace"] = trace_prefix_json(ps.space, res.trace, n);
      if (res.metric.witness)
        report["result"]["witness"] = witness_prefix_json(*res.metric.witness, ps.lazy ? g_depth : 1);
      if (res.theta) report["result"]["theta"] = format_rat(*res.theta);
      if (s) report["result"]["valueset"] = valueset_to_json(*s);
      Json checks;
      extension_checks(ps, a, ps.metric, res, s ? &*s : nullptr, dense ? &h : nullptr, checks, ok);
      report["checks"] = std::move(checks);
      return emit(report, ok);
    }

    return 2;
  } catch (const MetricError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
