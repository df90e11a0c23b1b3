#include "metricext/extension.hpp"

#include <algorithm>
#include <memory>
#include <unordered_map>

#include "metricext/errors.hpp"

namespace metricext {

const char* trace_name(TraceTerm t) {
  switch (t) {
    case TraceTerm::Restriction: return "restriction";
    case TraceTerm::Base: return "base";
    case TraceTerm::RetractPull: return "retract-pullback";
    case TraceTerm::Truncation: return "truncation";
    case TraceTerm::PullbackAbs: return "pullback-abs";
    case TraceTerm::PullbackMs: return "pullback-ms";
  }
  return "?";
}

namespace {

struct AnchorCacheEntry {
  PointId anchor;
  Rat hang;
};

// f = d(p, .) restricted to A, with the witness transported from d's
// (anchored at the space basepoint) by the triangle inequality, or by the
// isosceles sharpening when d is an ultrametric. A compact (finite) A makes
// f proper outright, so no witness is demanded then.
RealFunction distance_from(const Space& x, const MetricTable& d, PointId p, bool ultra,
                           bool a_infinite) {
  RealFunction f;
  MetricTable dc = d;
  f.at = [dc, p](PointId q) { return dc.at(p, q); };
  f.desc = "d(p, .)";
  if (x.is_finite()) {
    f.witness = ProperWitness::finite();
    return f;
  }
  if (!a_infinite) return f;
  if (!d.witness || d.witness->finite_trivial)
    fail(Errc::MissingWitness, "a proper input metric over a lazy infinite subset needs its witness");
  const Rat dyp = d.at(x.basepoint(), p);
  ProperWitness wd = *d.witness;
  if (ultra) {
    f.witness = ProperWitness::from(
        [wd, dyp](int k) {
          Rat b = wd.at(k);
          return b > dyp ? b : Rat(0);
        },
        "beta_f(k) = beta_d(k) when > d(p0, p) (isosceles)");
  } else {
    f.witness = ProperWitness::from(
        [wd, dyp](int k) {
          Rat b = wd.at(k) - dyp;
          return b > 0 ? b : Rat(0);
        },
        "beta_f(k) = max(0, beta_d(k) - d(p0, p))");
  }
  return f;
}

// suffix minima of f over an explicit finite A, by ambient block
struct FiniteTail {
  std::vector<std::pair<int, Rat>> by_block;  // sorted by block
  std::optional<Rat> min_from(int k) const {
    std::optional<Rat> best;
    for (const auto& [blk, val] : by_block)
      if (blk >= k && (!best || val < *best)) best = val;
    return best;
  }
};

FiniteTail finite_tail(const Space& x, const Subset& a, const std::function<Rat(PointId)>& f) {
  FiniteTail t;
  std::vector<PointId> members;
  if (x.is_finite()) {
    for (PointId p = 0; p < x.finite_size(); ++p)
      if (a.contains(x, p)) members.push_back(p);
  } else {
    members = a.ids();
  }
  for (PointId p : members) t.by_block.emplace_back(x.block_of(p), f(p));
  std::sort(t.by_block.begin(), t.by_block.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  return t;
}

}  // namespace

AnchorMap anchor_assignment(const Space& x, const Subset& a, const MetricTable& e_ref) {
  auto cache = std::make_shared<std::unordered_map<PointId, AnchorCacheEntry>>();
  Space xs = x;
  Subset ac = a;
  MetricTable ref = e_ref;
  auto lookup = [xs, ac, ref, cache](PointId q) -> AnchorCacheEntry {
    if (auto it = cache->find(q); it != cache->end()) return it->second;
    AnchorCacheEntry e;
    if (ac.contains(xs, q)) {
      e = {q, Rat(0)};
    } else {
      auto [dist, arg] = dist_to_set(xs, ref, q, ac);
      if (dist == 0) {
        // pseudo-degenerate reference: fall back to the smallest positive
        // reference distance from q into A, over a fixed window
        std::optional<Rat> best;
        for (PointId c : ac.members_upto(xs, xs.is_finite() ? 1 : xs.block_of(q) + 8)) {
          Rat d = ref.at(q, c);
          if (d > 0 && (!best || d < *best)) {
            best = d;
            arg = c;
          }
        }
        dist = best ? *best : Rat(1);
      }
      e = {arg, dist};
    }
    (*cache)[q] = e;
    return e;
  };
  AnchorMap m;
  m.anchor = [lookup](PointId q) { return lookup(q).anchor; };
  m.hang = [lookup](PointId q) { return lookup(q).hang; };
  return m;
}

RealFunction extend_function_proper(const Space& x, const Subset& a, const RealFunction& f) {
  if (a.is_empty_set() || a.empty_on(x))
    return proper_function_into(x, ValueSet::half_line());
  if (a.is_everything()) return f;

  RealFunction gamma = proper_function_into(x, ValueSet::half_line());
  AnchorMap anchors = anchor_assignment(x, a, enumeration_metric(x));

  Space xs = x;
  Subset ac = a;
  auto fat = f.at;
  auto gat = gamma.at;
  auto anch = anchors.anchor;
  RealFunction out;
  out.at = [xs, ac, fat, gat, anch](PointId q) -> Rat {
    Rat v = ac.contains(xs, q) ? fat(q) : rat_max(fat(anch(q)), gat(q));
    if (v < 0) fail(Errc::NegativeValue, "proper function extension saw a negative value");
    return v;
  };
  out.desc = "f(anchor) v gamma";

  if (x.is_finite()) {
    out.witness = ProperWitness::finite();
    return out;
  }
  if (a.is_explicit()) {
    FiniteTail tail = finite_tail(x, a, f.at);
    out.witness = ProperWitness::from(
        [tail](int k) {
          Rat lo(k);
          if (auto m = tail.min_from(k); m && *m < lo) lo = *m;
          return lo;
        },
        "beta_F(k) = min(gamma_k, tail min of f over A)");
  } else {
    if (!f.witness || f.witness->finite_trivial)
      fail(Errc::MissingWitness, "extending a proper function over infinite A needs its witness");
    ProperWitness wf = *f.witness;
    out.witness = ProperWitness::from(
        [wf](int k) {
          Rat g(k);
          Rat b = wf.at(k);
          return b < g ? b : g;
        },
        "beta_F(k) = min(gamma_k, beta_f(k))");
  }
  return out;
}

MetricTable base_extend_metric(const Space& x, const Subset& a, const MetricTable& d,
                               const MetricTable* e_ref) {
  MetricTable ref = e_ref ? *e_ref : enumeration_metric(x);
  if (a.is_empty_set() || a.empty_on(x)) return ref;
  AnchorMap anchors = anchor_assignment(x, a, ref);

  MetricTable dc = d;
  auto anch = anchors.anchor;
  auto hang = anchors.hang;
  auto eval = [dc, anch, hang](PointId i, PointId j) -> Rat {
    if (i == j) return Rat(0);
    return hang(i) + dc.at(anch(i), anch(j)) + hang(j);
  };
  if (x.is_finite()) {
    const int n = x.finite_size();
    std::vector<Rat> e(static_cast<std::size_t>(n) * n, Rat(0));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Rat v = eval(i, j);
        e[static_cast<std::size_t>(i) * n + j] = v;
        e[static_cast<std::size_t>(j) * n + i] = std::move(v);
      }
    return MetricTable::dense(n, std::move(e), MetricFlag::Metric);
  }
  return MetricTable::callback(eval, MetricFlag::Metric);
}

MetricTable base_extend_ultrametric(const Space& x, const Subset& a, const MetricTable& d,
                                    const ValueSet& s) {
  if (!s.characteristic())
    fail(Errc::NotCharacteristic, "ultrametric gluing needs a characteristic value set");
  if (a.is_empty_set() || a.empty_on(x)) fail(Errc::EmptySubset, "ultrametric gluing needs an anchor set");
  const SporadicSet ts = sporadic_subset(s);
  AnchorMap anchors = anchor_assignment(x, a, enumeration_metric(x));

  Space xs = x;
  Subset ac = a;
  MetricTable dc = d;
  auto anch = anchors.anchor;
  auto hang = anchors.hang;
  auto tval = [xs, ac, hang, ts](PointId i) -> Rat {
    if (ac.contains(xs, i)) return Rat(0);
    return ts.floor_member(hang(i));  // in S \ {0}: hang lengths are positive
  };
  auto eval = [dc, anch, tval](PointId i, PointId j) -> Rat {
    if (i == j) return Rat(0);
    return rat_max(rat_max(dc.at(anch(i), anch(j)), tval(i)), tval(j));
  };
  MetricTable out;
  if (x.is_finite()) {
    const int n = x.finite_size();
    std::vector<Rat> e(static_cast<std::size_t>(n) * n, Rat(0));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Rat v = eval(i, j);
        if (!s.contains(v))
          fail(Errc::MembershipViolation,
               "glued value " + format_rat(v) + " escapes " + s.describe() +
                   " (d must take values in S)");
        e[static_cast<std::size_t>(i) * n + j] = v;
        e[static_cast<std::size_t>(j) * n + i] = std::move(v);
      }
    out = MetricTable::dense(n, std::move(e), MetricFlag::Ultra);
  } else {
    out = MetricTable::callback(eval, MetricFlag::Ultra);
  }
  out.value_set = s;
  return out;
}

ExtensionResult extend_metric_proper(const Space& x, const Subset& a, const MetricTable& d) {
  if (a.is_everything()) {
    ExtensionResult res;
    res.metric = d;
    res.trace = [](PointId, PointId) { return TraceTerm::Restriction; };
    res.pipeline = "A = X: D = d";
    return res;
  }
  if (a.is_empty_set() || a.empty_on(x))
    fail(Errc::EmptySubset, "proper metric extension needs a basepoint p in A");
  const PointId p = a.first_member(x);

  RealFunction f = distance_from(x, d, p, /*ultra=*/false, a.declared_infinite(x));
  RealFunction bigf = extend_function_proper(x, a, f);
  MetricTable e = base_extend_metric(x, a, d);
  MetricTable ef = pullback_abs(x, bigf);
  MetricTable out = properize(x, e, bigf);

  ExtensionResult res;
  res.metric = std::move(out);
  Space xs = x;
  Subset ac = a;
  MetricTable ec = e, efc = ef;
  res.trace = [xs, ac, ec, efc](PointId i, PointId j) {
    if (ac.contains(xs, i) && ac.contains(xs, j)) return TraceTerm::Restriction;
    return ec.at(i, j) >= efc.at(i, j) ? TraceTerm::Base : TraceTerm::PullbackAbs;
  };
  res.pipeline = "f = d(p,.); F = extend_function_proper; e = base_extend_metric; D = e v E[F]";
  return res;
}

ExtensionResult extend_ultrametric_proper(const Space& x, const Subset& a, const MetricTable& d,
                                          const ValueSet& s, const Rat& tau) {
  if (!s.unbounded()) fail(Errc::NotUnbounded, "S must be unbounded");
  if (!s.characteristic()) fail(Errc::NotCharacteristic, "S must be characteristic");
  if (d.flag() != MetricFlag::Ultra) fail(Errc::NonUltrametricInput, "d must be an ultrametric");
  if (a.is_everything()) {
    ExtensionResult res;
    res.metric = d;
    res.metric.value_set = s;
    res.trace = [](PointId, PointId) { return TraceTerm::Restriction; };
    res.pipeline = "A = X: D = d";
    return res;
  }
  if (a.is_empty_set() || a.empty_on(x))
    fail(Errc::EmptySubset, "proper ultrametric extension needs a basepoint p in A");
  const PointId p = a.first_member(x);

  const SporadicSet t = sporadic_subset(s);
  MetricTable w = quantize_metric(x, d, t);
  RealFunction f = distance_from(x, w, p, /*ultra=*/true, a.declared_infinite(x));
  f.desc = "w(p, .)";
  RealFunction bigf = extend_value_map_proper(x, a, f, t, tau);
  MetricTable e = base_extend_ultrametric(x, a, d, s);
  MetricTable mtf = pullback_ms(x, s, bigf);
  MetricTable out = properize_ult(x, e, s, t, bigf);

  ExtensionResult res;
  res.metric = std::move(out);
  Space xs = x;
  Subset ac = a;
  MetricTable ec = e, mc = mtf;
  res.trace = [xs, ac, ec, mc](PointId i, PointId j) {
    if (ac.contains(xs, i) && ac.contains(xs, j)) return TraceTerm::Restriction;
    return ec.at(i, j) >= mc.at(i, j) ? TraceTerm::Base : TraceTerm::PullbackMs;
  };
  res.pipeline =
      "w = psi o d; f = w(p,.); F = extend_value_map_proper; e = base_extend_ultrametric; "
      "D = e v M_T[F]";
  return res;
}

namespace {

void require_retraction_onto(const Space& x, const Subset& a, const Retraction& r) {
  const int points = x.is_finite() ? x.finite_size() : x.ensure_blocks(4);
  for (PointId q = 0; q < points; ++q) {
    const PointId rq = r.at(q);
    if (!a.contains(x, rq) || (a.contains(x, q) && rq != q))
      fail(Errc::BadArgument, "r is not a retraction onto A (fails at " + x.name(q) + ")");
  }
}

}  // namespace

ExtensionResult extend_metric_proper_dense(const Space& x, const Subset& a, const MetricTable& d,
                                           const Rat& eta, const Retraction& r) {
  if (eta <= 0) fail(Errc::BadArgument, "eta must be positive (min(e, 0) is not a metric)");
  if (a.is_empty_set() || a.empty_on(x)) fail(Errc::EmptySubset, "dense extension needs nonempty A");
  require_retraction_onto(x, a, r);
  const PointId p = a.first_member(x);

  MetricTable e = base_extend_metric(x, a, d);
  MetricTable u = truncate(x, e, eta);
  MetricTable dc = d;
  auto rat_ = r.at;
  MetricTable bigp = MetricTable::callback(
      [dc, rat_](PointId i, PointId j) { return dc.at(rat_(i), rat_(j)); }, MetricFlag::Pseudo);
  MetricTable v = join(x, bigp, u);

  RealFunction f = distance_from(x, d, p, /*ultra=*/false, a.declared_infinite(x));
  RealFunction bigf;
  bigf.at = [fat = f.at, rat_](PointId q) { return fat(rat_(q)); };
  bigf.desc = "f o r";
  if (x.is_finite()) {
    bigf.witness = ProperWitness::finite();
  } else {
    if (!r.certified())
      fail(Errc::MissingWitness, "the dense pipeline needs a properness-certified retraction");
    ProperWitness wf = *f.witness;
    auto rfl = r.image_block_floor;
    bigf.witness =
        ProperWitness::from([wf, rfl](int k) { return wf.at(rfl(k)); }, "beta_F(k) = beta_f(jhat(k))");
  }
  MetricTable ef = pullback_abs(x, bigf);
  MetricTable out = properize(x, v, bigf);

  ExtensionResult res;
  res.metric = std::move(out);
  res.retraction = r;
  Space xs = x;
  Subset ac = a;
  MetricTable pc = bigp, uc = u, efc = ef;
  res.trace = [xs, ac, pc, uc, efc](PointId i, PointId j) {
    if (ac.contains(xs, i) && ac.contains(xs, j)) return TraceTerm::Restriction;
    const Rat pv = pc.at(i, j), uv = uc.at(i, j), ev = efc.at(i, j);
    const Rat m = rat_max(rat_max(pv, uv), ev);
    if (pv == m) return TraceTerm::RetractPull;
    if (uv == m) return TraceTerm::Truncation;
    return TraceTerm::PullbackAbs;
  };
  res.pipeline = "P = d(r.,r.); u = min(e, eta); v = P v u; F = f o r; D = v v E[F]";
  return res;
}

ExtensionResult extend_ultrametric_proper_dense(const Space& x, const Subset& a,
                                                const MetricTable& d, const ValueSet& s,
                                                const Rat& eta, const Rat& tau) {
  if (!s.unbounded()) fail(Errc::NotUnbounded, "S must be unbounded");
  if (!s.characteristic()) fail(Errc::NotCharacteristic, "S must be characteristic");
  if (eta <= 0) fail(Errc::BadArgument, "eta must be positive");
  if (d.flag() != MetricFlag::Ultra) fail(Errc::NonUltrametricInput, "d must be an ultrametric");
  if (a.is_empty_set() || a.empty_on(x)) fail(Errc::EmptySubset, "dense extension needs nonempty A");
  if (!a.is_everything() && !a.declared_infinite(x))
    fail(Errc::FiniteSubset, "the dense ultrametric extension needs non-compact (infinite) A");
  const PointId p = a.first_member(x);
  const Rat theta = *s.floor_nonzero(eta);

  Retraction r = proper_retract(x, a, tau);

  const SporadicSet t = sporadic_subset(s);
  MetricTable w = quantize_metric(x, d, t);
  RealFunction f = distance_from(x, w, p, /*ultra=*/true, /*a_infinite=*/true);

  auto rat_ = r.at;
  RealFunction bigf;
  bigf.at = [fat = f.at, rat_](PointId q) { return fat(rat_(q)); };
  bigf.desc = "(psi-quantized f) o r";
  if (x.is_finite()) {
    bigf.witness = ProperWitness::finite();
  } else {
    ProperWitness wf = *f.witness;
    auto rfl = r.image_block_floor;
    bigf.witness =
        ProperWitness::from([wf, rfl](int k) { return wf.at(rfl(k)); }, "beta_F(k) = beta_f(jhat(k))");
  }

  MetricTable e = base_extend_ultrametric(x, a, d, s);
  MetricTable u = truncate(x, e, theta);
  MetricTable dcc = d;
  MetricTable bigp = MetricTable::callback(
      [dcc, rat_](PointId i, PointId j) { return dcc.at(rat_(i), rat_(j)); }, MetricFlag::PseudoUltra);
  MetricTable v = join(x, bigp, u);
  MetricTable mtf = pullback_ms(x, s, bigf);
  MetricTable out = properize_ult(x, v, s, t, bigf);

  ExtensionResult res;
  res.metric = std::move(out);
  res.retraction = r;
  res.theta = theta;
  Space xs = x;
  Subset ac = a;
  MetricTable pc = bigp, uc = u, mc = mtf;
  res.trace = [xs, ac, pc, uc, mc](PointId i, PointId j) {
    if (ac.contains(xs, i) && ac.contains(xs, j)) return TraceTerm::Restriction;
    const Rat pv = pc.at(i, j), uv = uc.at(i, j), mv = mc.at(i, j);
    const Rat m = rat_max(rat_max(pv, uv), mv);
    if (pv == m) return TraceTerm::RetractPull;
    if (uv == m) return TraceTerm::Truncation;
    return TraceTerm::PullbackMs;
  };
  res.pipeline =
      "theta = max member of S\\{0} <= eta; r = proper_retract; P = d(r.,r.); "
      "u = min(e, theta); v = P v u; F = (psi f) o r; D = v v M_T[F]";
  return res;
}

Retraction make_retraction_onto(const Space& x, const Subset& a, const Rat& tau) {
  if (a.is_empty_set() || a.empty_on(x)) fail(Errc::EmptySubset, "no retraction onto the empty subset");
  if (a.is_everything()) return proper_retract(x, a, tau);
  if (x.is_finite()) {
    AnchorMap anchors = anchor_assignment(x, a, enumeration_metric(x));
    Retraction r;
    r.at = anchors.anchor;
    r.tau = tau;
    r.bias = OrderBias::NearFirst;
    r.image_block_floor = [](int) { return 0; };
    r.desc = "anchor retraction";
    return r;
  }
  return proper_retract(x, a, tau);  // demands infinite A
}

}  // namespace metricext
