#pragma once

#include "metricext/combinator.hpp"
#include "metricext/retraction.hpp"
#include "metricext/space.hpp"

namespace metricext {

enum class TraceTerm : uint8_t {
  Restriction,   // both points in A: the clause D|_{A^2} = d
  Base,          // the glued base extension e
  RetractPull,   // the retraction pseudo-metric P(x,y) = d(r(x), r(y))
  Truncation,    // the capped term u = min(e, eta or theta)
  PullbackAbs,   // E[F]
  PullbackMs,    // M_T[F]
};
const char* trace_name(TraceTerm t);

/// Output of an extension pipeline: the extended table (with flag, value-set
/// tag and witness), per-entry provenance, and the auxiliary objects the
/// dense variants expose.
struct ExtensionResult {
  MetricTable metric;
  std::function<TraceTerm(PointId, PointId)> trace;
  std::string pipeline;
  std::optional<Retraction> retraction;
  std::optional<Rat> theta;
};

/// nearest A-point under the reference metric (ties to the lower enumeration
/// index) and the hang length t(x) = dist(x, A); t = 0 and anchor = id on A.
struct AnchorMap {
  std::function<PointId(PointId)> anchor;
  std::function<Rat(PointId)> hang;
};
AnchorMap anchor_assignment(const Space& x, const Subset& a, const MetricTable& e_ref);

/// F with F|_A = f, F proper: F(x) = f(anchor(x)) v gamma(x) off A, where
/// gamma is the generated block-ladder weight. A may be empty (F = gamma).
RealFunction extend_function_proper(const Space& x, const Subset& a, const RealFunction& f);

/// Anchor-gluing metric extension: D = t(x) + d(a(x), a(y)) + t(y), zero
/// hang on A. Restriction to A^2 is d bit-exactly. Empty A: returns e_ref.
MetricTable base_extend_metric(const Space& x, const Subset& a, const MetricTable& d,
                               const MetricTable* e_ref = nullptr);

/// Ultrametric gluing: D = d(a(x), a(y)) v t(x) v t(y) with hang lengths
/// quantized into S \ {0}. Values stay in S; restriction is exact.
MetricTable base_extend_ultrametric(const Space& x, const Subset& a, const MetricTable& d,
                                    const ValueSet& s);

/// Proper metric extension: D = e v E[F], F the proper extension of
/// f = d(p, .). D|_{A^2} = d, D proper with the derived witness.
ExtensionResult extend_metric_proper(const Space& x, const Subset& a, const MetricTable& d);

/// Proper ultrametric extension in S: D = e v M_T[F] over the quantized
/// f = w(p, .), w = psi o d.
ExtensionResult extend_ultrametric_proper(const Space& x, const Subset& a, const MetricTable& d,
                                          const ValueSet& s, const Rat& tau = Rat(2));

/// eta-dense proper metric extension along a proper retraction r:
/// D = (P v min(e, eta)) v E[F] with P = d(r., r.) and F = f o r.
ExtensionResult extend_metric_proper_dense(const Space& x, const Subset& a, const MetricTable& d,
                                           const Rat& eta, const Retraction& r);

/// eta-dense proper ultrametric extension (A infinite): theta = largest
/// member of S \ {0} below eta; D = (P v min(e, theta)) v M_T[F].
ExtensionResult extend_ultrametric_proper_dense(const Space& x, const Subset& a,
                                                const MetricTable& d, const ValueSet& s,
                                                const Rat& eta, const Rat& tau = Rat(2));

/// Retraction the CLI feeds to the dense metric pipeline: the anchor map on
/// finite spaces, proper_retract on lazy ones (A must then be infinite).
Retraction make_retraction_onto(const Space& x, const Subset& a, const Rat& tau = Rat(2));

}  // namespace metricext
