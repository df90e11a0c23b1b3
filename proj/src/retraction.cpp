#include "metricext/retraction.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <unordered_map>

#include "metricext/errors.hpp"
#include "metricext/kernels.hpp"

namespace metricext {

BandedOrder::BandedOrder(const Space& x, const MetricTable& d, PointId y0, OrderBias bias)
    : x_(x), d_(d), y0_(y0), bias_(bias) {}

Rat BandedOrder::band(PointId p) const { return rat_floor(d_.at(y0_, p)); }

bool BandedOrder::less(PointId a, PointId b) const {
  const Rat ba = band(a), bb = band(b);
  if (ba != bb) return bias_ == OrderBias::NearFirst ? ba < bb : ba > bb;
  return a < b;
}

namespace {

// A_x with the scan bounded by the witness when A is enumerated lazily.
std::vector<PointId> admissible_set(const Space& x, const MetricTable& d, const Subset& a,
                                    PointId q, const Rat& threshold) {
  std::vector<PointId> out;
  auto consider = [&](PointId c) {
    if (d.at(q, c) <= threshold) out.push_back(c);
  };
  if (x.is_finite()) {
    const int n = x.finite_size();
    for (PointId c = 0; c < n; ++c)
      if (a.contains(x, c)) consider(c);
    return out;
  }
  if (a.is_explicit()) {
    for (PointId c : a.ids()) consider(c);
    return out;
  }
  if (!d.witness || d.witness->finite_trivial)
    fail(Errc::MissingWitness, "lazy candidate scan needs a properness witness");
  const Rat dq = d.at(x.basepoint(), q);
  for (int k = 0;; ++k) {
    if (k >= kScanBlockBudget) fail(Errc::ScanBudgetExceeded, "candidate scan exceeded the block budget");
    if (d.witness->at(k) - dq > threshold) break;
    for (PointId c : a.members_in_block(x, k)) consider(c);
  }
  return out;
}

}  // namespace

Retraction bdhm_retract(const Space& x, const MetricTable& d, const Subset& a, const Rat& tau,
                        OrderBias bias) {
  if (tau <= 1) fail(Errc::BadArgument, "tau must exceed 1, got " + format_rat(tau));
  if (a.empty_on(x)) fail(Errc::EmptySubset, "retraction onto the empty subset");
  if (d.flag() != MetricFlag::Ultra)
    fail(Errc::NonUltrametricInput, "the well-order retraction needs the strong triangle inequality");

  BandedOrder order(x, d, x.basepoint(), bias);
  auto cache = std::make_shared<std::unordered_map<PointId, PointId>>();
  Space xs = x;
  MetricTable dc = d;
  Subset ac = a;
  Rat t = tau;

  Retraction r;
  r.tau = tau;
  r.bias = bias;
  r.desc = std::string("bdhm(tau=") + format_rat(tau) +
           (bias == OrderBias::NearFirst ? ", near-first)" : ", far-first)");
  r.at = [xs, dc, ac, t, order, cache](PointId q) -> PointId {
    if (auto it = cache->find(q); it != cache->end()) return it->second;
    PointId result;
    if (ac.contains(xs, q)) {
      result = q;  // rho = 0 and positivity force A_q = {q}
    } else {
      auto [rho, arg] = dist_to_set(xs, dc, q, ac);
      const Rat threshold = t * rho;
      auto candidates = admissible_set(xs, dc, ac, q, threshold);
      if (candidates.empty()) fail(Errc::EmptySubset, "empty admissible set (inf not attained?)");
      PointId best = candidates.front();
      for (PointId c : candidates)
        if (order.less(c, best)) best = c;
      result = best;
    }
    (*cache)[q] = result;
    return result;
  };
  return r;
}

Rat lipschitz_ratio(const Space& x, const Retraction& r, const MetricTable& d, int points) {
  const int n = points;
  if (n < 2) return Rat(0);
  std::vector<int> rmap(n);
  for (int i = 0; i < n; ++i) rmap[i] = r.at(i);
  std::vector<Rat> dense;
  const Rat* raw;
  if (d.is_dense() && n == d.dense_size()) {
    raw = d.entries().data();
  } else {
    if (d.is_dense() && n > d.dense_size()) fail(Errc::RosterMismatch, "prefix exceeds table size");
    int need = n;
    for (int v : rmap) need = std::max(need, v + 1);
    dense.resize(static_cast<std::size_t>(need) * need);
    for (int i = 0; i < need; ++i)
      for (int j = 0; j < need; ++j) dense[static_cast<std::size_t>(i) * need + j] = d.at(i, j);
    // pair_ratio_max reads rows up to max(rmap); feed it the padded table
    Rat best(0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Rat& dij = dense[static_cast<std::size_t>(i) * need + j];
        if (dij == 0) continue;
        Rat q = dense[static_cast<std::size_t>(rmap[i]) * need + rmap[j]] / dij;
        if (q > best) best = std::move(q);
      }
    return best;
  }
  return kernels::pair_ratio_max(raw, n, rmap.data(),
                                 kernels::parallel_worthwhile(static_cast<long>(n) * n));
}

Report check_retraction(const Space& x, const MetricTable& d, const Subset& a, const Retraction& r,
                        int points) {
  Report rep;
  for (PointId q = 0; q < points; ++q) {
    const PointId rq = r.at(q);
    ++rep.checks;
    if (!a.contains(x, rq))
      rep.add({ViolationKind::Radius, q, rq, -1, "image point not in A"});
    if (a.contains(x, q) && rq != q)
      rep.add({ViolationKind::Radius, q, rq, -1, "retraction moves a point of A"});
    if (!a.contains(x, q)) {
      auto [rho, arg] = dist_to_set(x, d, q, a);
      if (d.at(q, rq) > r.tau * rho)
        rep.add({ViolationKind::Radius, q, rq, -1,
                 "d(x, r(x)) = " + format_rat(d.at(q, rq)) + " > tau*rho = " +
                     format_rat(r.tau * rho)});
    }
  }
  rep.summary = "retraction contract on " + std::to_string(points) + " points: " +
                (rep.pass ? "pass" : std::to_string(rep.violations.size()) + " violation(s)");
  return rep;
}

MetricTable hub_ultrametric(const Space& x) {
  // d0 v M_T[gamma] for the discrete unit ultrametric d0 and the block
  // ladder gamma into Geometric(2,1); the composition below keeps the two
  // ingredients visible.
  const ValueSet s = ValueSet::geometric(Rat(2), Rat(1));
  MetricTable d0 = MetricTable::callback(
      [](PointId i, PointId j) { return i == j ? Rat(0) : Rat(1); }, MetricFlag::Ultra);
  d0.value_set = s;
  RealFunction gamma = proper_function_into(x, s);
  return properize_ult(x, d0, s, SporadicSet(Rat(2), Rat(1)), gamma);
}

Retraction proper_retract(const Space& x, const Subset& a, const Rat& tau) {
  if (tau <= 1) fail(Errc::BadArgument, "tau must exceed 1, got " + format_rat(tau));
  if (a.is_everything()) {
    Retraction r;
    r.at = [](PointId q) { return q; };
    r.tau = tau;
    r.bias = OrderBias::FarFirst;
    r.image_block_floor = [](int k) { return k; };
    r.desc = "identity";
    return r;
  }
  if (x.is_finite() || !a.declared_infinite(x))
    fail(Errc::FiniteSubset,
         "proper_retract needs a non-compact (infinite) subset; see the product construction of "
         "extend_proper_map for the finite case");

  MetricTable hub = hub_ultrametric(x);
  Retraction r = bdhm_retract(x, hub, a, tau, OrderBias::FarFirst);
  r.desc = "proper_retract(tau=" + format_rat(tau) + ") over " + x.describe();

  // j(k) = largest A-block <= k when one exists, else the least A-block.
  Space xs = x;
  Subset ac = a;
  auto memo = std::make_shared<std::vector<int>>();
  auto first_block = std::make_shared<int>(-1);
  r.image_block_floor = [xs, ac, memo, first_block](int k) -> int {
    if (*first_block < 0) {
      for (int b = 0; b < kScanBlockBudget; ++b)
        if (!ac.members_in_block(xs, b).empty()) {
          *first_block = b;
          break;
        }
      if (*first_block < 0) fail(Errc::EmptySubset, "no member found within the scan budget");
    }
    while (static_cast<int>(memo->size()) <= k) {
      const int b = static_cast<int>(memo->size());
      const bool occupied = !ac.members_in_block(xs, b).empty();
      const int prev = b == 0 ? *first_block : memo->back();
      memo->push_back(occupied && b >= *first_block ? b : prev);
    }
    return (*memo)[k];
  };
  return r;
}

PointMap extend_proper_map(const Space& x, const Subset& a, const PointMap& f, const Space& y,
                           const Rat& tau) {
  if (y.is_finite()) fail(Errc::NoProperTarget, "no proper map into a finite (compact) target");
  if (a.is_everything()) return f;

  if (a.declared_infinite(x)) {
    Retraction r = proper_retract(x, a, tau);
    if (!f.block_floor)
      fail(Errc::MissingWitness, "extending a map over an infinite A needs its block-floor certificate");
    PointMap out;
    auto fat = f.at;
    auto rat_ = r.at;
    out.at = [fat, rat_](PointId q) { return fat(rat_(q)); };
    auto ffl = f.block_floor;
    auto rfl = r.image_block_floor;
    out.block_floor = [ffl, rfl](int k) { return ffl(rfl(k)); };
    out.desc = "f o " + r.desc;
    return out;
  }

  // Case 2: A finite (possibly empty). Work in X x Z, Z = N.
  const Space z = Space::naturals(1);
  const Space xz = Space::product(x, z);
  const PointId omega = x.basepoint();
  const PointId o = z.basepoint();

  Space xc = x, yc = y, xzc = xz;
  Subset ac = a;
  Subset c = Subset::by_rule(
      "A x {o} u {w} x P",
      [xc, ac, omega, o](const Space& sp, PointId p) {
        auto [xi, zi] = sp.factors(p);
        return (zi == o && ac.contains(xc, xi)) || (xi == omega && zi != o);
      },
      true);

  // g: C -> Y;  (a, o) -> f(a),  (w, a_i) -> b_i = the i-th point of Y.
  auto fat = f.at;
  auto gval = [fat, yc, o](const Space& sp, PointId p) -> PointId {
    auto [xi, zi] = sp.factors(p);
    if (zi == o) return fat(xi);
    const PointId target = zi - 1;  // z ids enumerate N; P = Z \ {o}
    while (yc.generated_points() <= target) yc.ensure_blocks(yc.generated_blocks() + 1);
    return target;
  };

  Retraction rc = proper_retract(xz, c, tau);

  PointMap out;
  auto rcat = rc.at;
  out.at = [xzc, rcat, gval, o](PointId q) {
    const PointId pq = xzc.pair_id(q, o);
    return gval(xzc, rcat(pq));
  };
  out.desc = "product-case extension over " + xz.describe();

  // Certificate: C-members in product blocks >= m have g-values in Y-blocks
  // bounded below by L(m); the A-part occupies finitely many low blocks, the
  // w-part at product block m' >= 1 maps to the (m'-1)-th point of Y.
  std::vector<std::pair<int, int>> a_part;  // (product block, Y-block of f(a))
  {
    std::vector<PointId> amembers;
    if (x.is_finite()) {
      for (PointId p = 0; p < x.finite_size(); ++p)
        if (a.contains(x, p)) amembers.push_back(p);
    } else if (a.is_explicit()) {
      amembers = a.ids();
    }
    for (PointId p : amembers) {
      const PointId img = f.at(p);
      while (y.generated_points() <= img) y.ensure_blocks(y.generated_blocks() + 1);
      a_part.emplace_back(x.block_of(p), y.block_of(img));
    }
    std::sort(a_part.begin(), a_part.end());
  }
  auto rfl = rc.image_block_floor;
  out.block_floor = [a_part, yc, rfl](int k) -> int {
    const int m = rfl(k);
    int lo;  // w-part tail: product block m' >= max(m,1) holds b_{m'-1}
    {
      const int i = std::max(m, 1) - 1;
      while (yc.generated_points() <= i) yc.ensure_blocks(yc.generated_blocks() + 1);
      lo = yc.block_of(i);
    }
    for (const auto& [blk, yblk] : a_part)
      if (blk >= m) lo = std::min(lo, yblk);
    return lo;
  };
  return out;
}

RealFunction extend_value_map_proper(const Space& x, const Subset& a, const RealFunction& f,
                                     const SporadicSet& t, const Rat& tau) {
  if (a.is_everything()) return f;

  if (a.declared_infinite(x)) {
    if (!f.witness || f.witness->finite_trivial)
      fail(Errc::MissingWitness, "extending a proper value map over infinite A needs its witness");
    Retraction r = proper_retract(x, a, tau);
    RealFunction out;
    auto fat = f.at;
    auto rat_ = r.at;
    out.at = [fat, rat_](PointId q) { return fat(rat_(q)); };
    ProperWitness wf = *f.witness;
    auto rfl = r.image_block_floor;
    out.witness = ProperWitness::from([wf, rfl](int k) { return wf.at(rfl(k)); },
                                      "beta_F(k) = beta_f(jhat(k))");
    out.desc = f.desc + " o " + r.desc;
    return out;
  }

  // Case 2 with the value ladder of T as the declared closed discrete subset.
  const Space z = Space::naturals(1);
  const Space xz = Space::product(x, z);
  const PointId omega = x.basepoint();
  const PointId o = z.basepoint();

  Space xc = x, xzc = xz;
  Subset ac = a;
  Subset c = Subset::by_rule(
      "A x {o} u {w} x P",
      [xc, ac, omega, o](const Space& sp, PointId p) {
        auto [xi, zi] = sp.factors(p);
        return (zi == o && ac.contains(xc, xi)) || (xi == omega && zi != o);
      },
      true);

  SporadicSet tc = t;
  auto fat = f.at;
  auto gval = [fat, tc, o](const Space& sp, PointId p) -> Rat {
    auto [xi, zi] = sp.factors(p);
    if (zi == o) return fat(xi);
    return tc.ladder(zi - 1);  // upward ladder: keeps the extension real-proper
  };

  Retraction rc = proper_retract(xz, c, tau);

  std::vector<std::pair<int, Rat>> a_part;  // (product block, f value)
  {
    std::vector<PointId> amembers;
    if (x.is_finite()) {
      for (PointId p = 0; p < x.finite_size(); ++p)
        if (a.contains(x, p)) amembers.push_back(p);
    } else if (a.is_explicit()) {
      amembers = a.ids();
    }
    for (PointId p : amembers) a_part.emplace_back(x.block_of(p), f.at(p));
    std::sort(a_part.begin(), a_part.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
  }

  RealFunction out;
  auto rcat = rc.at;
  out.at = [xzc, rcat, gval, o](PointId q) {
    const PointId pq = xzc.pair_id(q, o);
    return gval(xzc, rcat(pq));
  };
  if (x.is_finite()) {
    out.witness = ProperWitness::finite();
  } else {
    auto rfl = rc.image_block_floor;
    out.witness = ProperWitness::from(
        [a_part, tc, rfl](int k) {
          const int m = rfl(k);
          Rat lo = tc.ladder(std::max(m, 1) - 1);
          for (const auto& [blk, val] : a_part)
            if (blk >= m && val < lo) lo = val;
          return lo;
        },
        "beta_F(k) via the product construction floor");
  }
  out.desc = "product-case value extension";
  return out;
}

std::vector<PointId> map_preimage(const Space& x, const PointMap& f,
                                  const std::vector<PointId>& targets, const Space& y) {
  if (!f.block_floor) fail(Errc::MissingWitness, "preimage query needs the block-floor certificate");
  int max_blk = 0;
  for (PointId t : targets) max_blk = std::max(max_blk, y.block_of(t));
  std::vector<PointId> out;
  if (x.is_finite()) {
    for (PointId p = 0; p < x.finite_size(); ++p)
      if (std::find(targets.begin(), targets.end(), f.at(p)) != targets.end()) out.push_back(p);
    return out;
  }
  for (int k = 0;; ++k) {
    if (k >= kScanBlockBudget) fail(Errc::ScanBudgetExceeded, "preimage scan exceeded the block budget");
    if (f.block_floor(k) > max_blk) break;
    auto [fst, end] = x.block_span(k);
    for (PointId p = fst; p < end; ++p)
      if (std::find(targets.begin(), targets.end(), f.at(p)) != targets.end()) out.push_back(p);
  }
  return out;
}

}  // namespace metricext
