#include "metricext/combinator.hpp"

#include <algorithm>

#include "metricext/errors.hpp"
#include "metricext/kernels.hpp"

namespace metricext {

namespace {

MetricFlag join_flag(MetricFlag a, MetricFlag b) {
  const bool ultra = flag_is_ultra(a) && flag_is_ultra(b);
  const bool positive = flag_is_positive(a) || flag_is_positive(b);
  if (ultra) return positive ? MetricFlag::Ultra : MetricFlag::PseudoUltra;
  return positive ? MetricFlag::Metric : MetricFlag::Pseudo;
}

std::optional<ProperWitness> join_witness(const std::optional<ProperWitness>& a,
                                          const std::optional<ProperWitness>& b) {
  if (!a) return b;
  if (!b) return a;
  if (a->finite_trivial) return b->finite_trivial ? a : b;
  if (b->finite_trivial) return a;
  ProperWitness wa = *a, wb = *b;
  return ProperWitness::from([wa, wb](int k) { return rat_max(wa.at(k), wb.at(k)); },
                             "max(" + wa.rule + ", " + wb.rule + ")");
}

// dense table over the finite roster from a pair evaluator
MetricTable densify(const Space& x, MetricFlag flag, const std::function<Rat(PointId, PointId)>& f) {
  const int n = x.finite_size();
  std::vector<Rat> e(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    e[static_cast<std::size_t>(i) * n + i] = Rat(0);
    for (int j = i + 1; j < n; ++j) {
      Rat v = f(i, j);
      e[static_cast<std::size_t>(i) * n + j] = v;
      e[static_cast<std::size_t>(j) * n + i] = std::move(v);
    }
  }
  return MetricTable::dense(n, std::move(e), flag);
}

}  // namespace

Rat ms_distance(const ValueSet& s, const Rat& x, const Rat& y) {
  if (!s.contains(x))
    fail(Errc::MembershipViolation, format_rat(x) + " is not in " + s.describe());
  if (!s.contains(y))
    fail(Errc::MembershipViolation, format_rat(y) + " is not in " + s.describe());
  if (x == y) return Rat(0);
  return rat_max(x, y);
}

MetricTable pullback_abs(const Space& x, const RealFunction& f) {
  auto fn = f.at;
  if (x.is_finite())
    return densify(x, MetricFlag::Pseudo, [&](PointId i, PointId j) { return rat_abs(fn(i) - fn(j)); });
  return MetricTable::callback(
      [fn](PointId i, PointId j) { return i == j ? Rat(0) : rat_abs(fn(i) - fn(j)); },
      MetricFlag::Pseudo);
}

MetricTable pullback_ms(const Space& x, const ValueSet& s, const RealFunction& f) {
  auto fn = f.at;
  ValueSet sv = s;
  auto eval = [fn, sv](PointId i, PointId j) { return ms_distance(sv, fn(i), fn(j)); };
  MetricTable m = x.is_finite() ? densify(x, MetricFlag::PseudoUltra, eval)
                                : MetricTable::callback(
                                      [eval](PointId i, PointId j) {
                                        return i == j ? Rat(0) : eval(i, j);
                                      },
                                      MetricFlag::PseudoUltra);
  m.set_flag(MetricFlag::PseudoUltra);
  m.value_set = s;
  return m;
}

MetricTable join(const Space& x, const MetricTable& d, const MetricTable& e) {
  if (d.is_dense() && e.is_dense() && d.dense_size() != e.dense_size())
    fail(Errc::RosterMismatch, "joining tables over different rosters");
  const MetricFlag flag = join_flag(d.flag(), e.flag());
  MetricTable out;
  if (d.is_dense() && e.is_dense()) {
    const int n = d.dense_size();
    std::vector<Rat> r(static_cast<std::size_t>(n) * n);
    kernels::entrywise_max(d.entries().data(), e.entries().data(), r.data(), r.size(),
                           kernels::parallel_worthwhile(static_cast<long>(r.size())));
    out = MetricTable::dense(n, std::move(r), flag);
  } else {
    MetricTable dc = d, ec = e;
    out = MetricTable::callback(
        [dc, ec](PointId i, PointId j) { return rat_max(dc.at(i, j), ec.at(i, j)); }, flag);
  }
  out.witness = join_witness(d.witness, e.witness);
  if (d.value_set)
    out.value_set = d.value_set;
  else
    out.value_set = e.value_set;
  return out;
}

MetricTable truncate(const Space& x, const MetricTable& d, const Rat& cap) {
  if (cap <= 0) fail(Errc::BadArgument, "truncation bound must be positive, got " + format_rat(cap));
  MetricTable out;
  if (d.is_dense()) {
    const int n = d.dense_size();
    std::vector<Rat> r(static_cast<std::size_t>(n) * n);
    kernels::entrywise_min_scalar(d.entries().data(), cap, r.data(), r.size(),
                                  kernels::parallel_worthwhile(static_cast<long>(r.size())));
    out = MetricTable::dense(n, std::move(r), d.flag());
  } else {
    MetricTable dc = d;
    Rat c = cap;
    out = MetricTable::callback([dc, c](PointId i, PointId j) { return rat_min(dc.at(i, j), c); },
                                d.flag());
    out.witness.reset();  // bounded: no unbounded tail certificate exists
  }
  if (d.value_set && d.value_set->contains(cap)) out.value_set = d.value_set;
  return out;
}

MetricTable properize(const Space& x, const MetricTable& d, const RealFunction& f) {
  if (!flag_is_positive(d.flag()))
    fail(Errc::BadArgument, "properize wants a metric, got a pseudo-metric");
  if (!f.witness) fail(Errc::MissingWitness, "properize needs a witnessed proper function");
  MetricTable out = join(x, d, pullback_abs(x, f));
  out.set_flag(MetricFlag::Metric);
  if (x.is_finite()) {
    out.witness = ProperWitness::finite();
  } else {
    const Rat fp = f.at(x.basepoint());
    ProperWitness wf = *f.witness;
    out.witness = ProperWitness::from(
        [wf, fp](int k) {
          Rat b = wf.at(k) - fp;
          return b > 0 ? b : Rat(0);
        },
        "beta(k) = max(0, beta_f(k) - f(p)); ball inclusion in f^{-1}[f(p)-r, f(p)+r]");
  }
  return out;
}

MetricTable properize_ult(const Space& x, const MetricTable& d, const ValueSet& s,
                          const SporadicSet& t, const RealFunction& f) {
  if (d.flag() != MetricFlag::Ultra)
    fail(Errc::NonUltrametricInput, "properize_ult wants an ultrametric base");
  if (!sporadic_within(s, t)) fail(Errc::MembershipViolation, "T is not inside S");
  if (!f.witness) fail(Errc::MissingWitness, "properize_ult needs a witnessed proper function");
  MetricTable out = join(x, d, pullback_ms(x, s, f));
  out.set_flag(MetricFlag::Ultra);
  out.value_set = s;
  if (x.is_finite()) {
    out.witness = ProperWitness::finite();
  } else {
    const Rat fp = f.at(x.basepoint());
    ProperWitness wf = *f.witness;
    out.witness = ProperWitness::from(
        [wf, fp](int k) {
          Rat b = wf.at(k);
          return b > fp ? b : Rat(0);
        },
        "beta(k) = beta_f(k) when > f(p); ball inclusion in f^{-1}([0,r] u {f(p)})");
  }
  return out;
}

MetricTable quantize_metric(const Space& x, const MetricTable& d, const SporadicSet& t) {
  if (d.flag() != MetricFlag::Ultra)
    fail(Errc::NonUltrametricInput,
         "quantize_metric is only sound on ultrametrics (psi o d need not satisfy the plain triangle)");
  MetricTable out;
  if (d.is_dense()) {
    const int n = d.dense_size();
    std::vector<Rat> r(static_cast<std::size_t>(n) * n);
    kernels::entrywise_psi(d.entries().data(), t, r.data(), r.size(),
                           kernels::parallel_worthwhile(static_cast<long>(r.size())));
    out = MetricTable::dense(n, std::move(r), MetricFlag::Ultra);
  } else {
    MetricTable dc = d;
    SporadicSet tc = t;
    out = MetricTable::callback(
        [dc, tc](PointId i, PointId j) { return tc.floor_member(dc.at(i, j)); }, MetricFlag::Ultra);
  }
  out.value_set = ValueSet::geometric(t.base(), t.scale());
  if (d.witness) {
    if (d.witness->finite_trivial) {
      out.witness = d.witness;
    } else {
      ProperWitness wd = *d.witness;
      SporadicSet tc = t;
      out.witness = ProperWitness::from([wd, tc](int k) { return tc.floor_member(wd.at(k)); },
                                        "beta_w(k) = psi(beta_d(k))");
    }
  }
  return out;
}

Report check_isosceles(const MetricTable& w, int points) {
  Report rep;
  const int n = points;
  std::vector<Rat> d;
  const Rat* raw;
  if (w.is_dense() && n == w.dense_size()) {
    raw = w.entries().data();
  } else {
    if (w.is_dense() && n > w.dense_size()) fail(Errc::RosterMismatch, "prefix exceeds table size");
    d.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[static_cast<std::size_t>(i) * n + j] = w.at(i, j);
    raw = d.data();
  }
  const bool par = kernels::parallel_worthwhile(static_cast<long>(n) * n * n);
  for (const auto& t : kernels::isosceles_violations(raw, n, par))
    rep.add({ViolationKind::Isosceles, t.i, t.j, t.k,
             "w(i,k) < w(j,k) but w(j,k) != w(i,j)"});
  rep.checks = static_cast<long>(n) * n * n;
  rep.summary = "isosceles scan on " + std::to_string(n) + " points: " +
                (rep.pass ? "pass" : std::to_string(rep.violations.size()) + " violation(s)");
  return rep;
}

Report ms_ball_structure(const ValueSet& s, const Rat& x) {
  Report rep;
  if (x <= 0) fail(Errc::BadArgument, "ms_ball_structure wants a positive member");
  if (!s.contains(x)) fail(Errc::MembershipViolation, format_rat(x) + " is not in " + s.describe());
  if (s.kind() == ValueSetKind::HalfLine)
    fail(Errc::NotEnumerable, "the half line has no representable enumeration near [0, x]");

  // representable window of members around [0, x]
  std::vector<Rat> window;
  window.emplace_back(0);
  if (s.kind() == ValueSetKind::Geometric) {
    SporadicSet t(s.base(), s.scale());
    Rat lo = t.floor_member(x);
    for (int i = 0; i < 12; ++i) lo /= t.base();
    for (Rat v = lo; v <= x * t.base() * t.base(); v *= t.base()) window.push_back(v);
  } else {
    for (const Rat& v : s.values())
      if (v > 0) window.push_back(v);
  }

  std::string small;
  for (const Rat& v : window) {
    ++rep.checks;
    const Rat mxv = ms_distance(s, x, v);
    const bool in_ball = mxv < x;  // open ball U(x, x; M_S)
    if (in_ball != (v == x))
      rep.add({ViolationKind::BallStructure, -1, -1, -1,
               "U(x,x) membership wrong at " + format_rat(v)});
    const Rat m0v = ms_distance(s, Rat(0), v);
    const bool in_zero_ball = m0v < x;  // U(0, x; M_S)
    if (in_zero_ball != (v < x))
      rep.add({ViolationKind::BallStructure, -1, -1, -1,
               "U(0,x) membership wrong at " + format_rat(v)});
    if (in_zero_ball) small += (small.empty() ? "" : ",") + format_rat(v);
  }
  rep.summary = "U(" + format_rat(x) + "," + format_rat(x) + ") = {" + format_rat(x) + "}, U(0," +
                format_rat(x) + ") window = {" + small + "}: " + (rep.pass ? "pass" : "fail");
  return rep;
}

bool sporadic_within(const ValueSet& s, const SporadicSet& t) {
  switch (s.kind()) {
    case ValueSetKind::HalfLine:
      return true;
    case ValueSetKind::Geometric: {
      // three consecutive members pin the ratio as an integer power of s.base
      const Rat a = t.scale();
      return s.contains(a) && s.contains(a * t.base()) && s.contains(a * t.base() * t.base());
    }
    case ValueSetKind::ExplicitList:
      return false;  // T is infinite
  }
  return false;
}

}  // namespace metricext
