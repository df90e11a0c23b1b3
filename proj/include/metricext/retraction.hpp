#pragma once

#include "metricext/combinator.hpp"
#include "metricext/space.hpp"

namespace metricext {

/// Direction of the banded well-order used to pick the least element of A_x.
/// NearFirst orders bands ascending (low band wins), FarFirst descending.
/// Both are well-ordered on every bounded subset; FarFirst is the direction
/// under which the retraction is metrically proper when A is unbounded.
enum class OrderBias { NearFirst, FarFirst };

/// Total order keyed by (band = floor d(y0, .), enumeration index).
class BandedOrder {
 public:
  BandedOrder(const Space& x, const MetricTable& d, PointId y0, OrderBias bias);
  bool less(PointId a, PointId b) const;
  Rat band(PointId p) const;
  OrderBias bias() const { return bias_; }

 private:
  Space x_;
  MetricTable d_;
  PointId y0_;
  OrderBias bias_;
};

struct Retraction {
  std::function<PointId(PointId)> at;
  Rat tau;
  OrderBias bias = OrderBias::NearFirst;
  /// Metric-properness certificate: points of block k retract into A-blocks
  /// >= image_block_floor(k). Present when properness is certified.
  std::function<int(int)> image_block_floor;
  std::string desc;

  bool certified() const { return static_cast<bool>(image_block_floor); }
};

/// The well-order retraction: r(x) = least element of
/// A_x = {a in A : d(x,a) <= tau * dist_to_set(x, A)} under the banded order.
Retraction bdhm_retract(const Space& x, const MetricTable& d, const Subset& a, const Rat& tau,
                        OrderBias bias = OrderBias::NearFirst);

/// max over pairs of the first `points` points of d(r(x), r(y)) / d(x, y).
Rat lipschitz_ratio(const Space& x, const Retraction& r, const MetricTable& d, int points);

/// Retraction identity on A, image inside A, and the membership radius
/// d(x, r(x)) <= tau * rho(x), checked on the first `points` points.
Report check_retraction(const Space& x, const MetricTable& d, const Subset& a, const Retraction& r,
                        int points);

/// Proper retraction onto an infinite subset of a lazy space: builds the
/// synthetic proper ultrametric d0 v M_T[gamma] over the generated block
/// ladder, applies the far-first banded retraction, and certifies the
/// image-block floor j(k) = (largest A-block <= k, else the least A-block).
Retraction proper_retract(const Space& x, const Subset& a, const Rat& tau = Rat(2));

/// The synthetic hub ultrametric proper_retract retracts against.
MetricTable hub_ultrametric(const Space& x);

/// A point map A -> Y carrying its properness certificate: members of
/// A-block j land in Y-blocks >= block_floor(j).
struct PointMap {
  std::function<PointId(PointId)> at;
  std::function<int(int)> block_floor;
  std::string desc;
};

/// Extends a proper map f: A -> Y to a proper F: X -> Y with F|_A = f.
/// A infinite: F = f o r over a proper retraction. A finite (or empty): the
/// product construction over X x N with C = A x {o} u {w} x P.
PointMap extend_proper_map(const Space& x, const Subset& a, const PointMap& f, const Space& y,
                           const Rat& tau = Rat(2));

/// Value-target variant for sporadic ladders: extends f: A -> T to a proper
/// F: X -> T with a composed witness; used by the ultrametric pipelines.
RealFunction extend_value_map_proper(const Space& x, const Subset& a, const RealFunction& f,
                                     const SporadicSet& t, const Rat& tau = Rat(2));

/// Exact preimage of a finite target set under a certified point map.
std::vector<PointId> map_preimage(const Space& x, const PointMap& f,
                                  const std::vector<PointId>& targets, const Space& y);

}  // namespace metricext
