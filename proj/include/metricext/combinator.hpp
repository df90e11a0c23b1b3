#pragma once

#include "metricext/space.hpp"

namespace metricext {

/// The hub ultrametric on a value set: 0 if x = y, else x v y.
Rat ms_distance(const ValueSet& s, const Rat& x, const Rat& y);

/// E[f](x,y) = |f(x) - f(y)|. Pseudo-metric by construction.
MetricTable pullback_abs(const Space& x, const RealFunction& f);

/// M_S[f](x,y) = M_S(f(x), f(y)). Pseudo-ultrametric with values in s;
/// evaluation checks membership of the f-values.
MetricTable pullback_ms(const Space& x, const ValueSet& s, const RealFunction& f);

/// Pointwise maximum. Metric v pseudo-metric is a metric; ultra v pseudo-ultra
/// is an ultrametric. Witnesses combine by max.
MetricTable join(const Space& x, const MetricTable& d, const MetricTable& e);

/// Entrywise min(d, cap), cap > 0. Preserves the axioms (strong triangle
/// included) and S-membership when cap is a member; drops the witness on lazy
/// spaces since the result is bounded.
MetricTable truncate(const Space& x, const MetricTable& d, const Rat& cap);

/// d v E[f] for a witnessed proper f: proper metric with the witness derived
/// from the ball inclusion B(q, r) inside f^{-1}[f(q)-r, f(q)+r].
MetricTable properize(const Space& x, const MetricTable& d, const RealFunction& f);

/// d v M_T[f] for sporadic T inside S and witnessed f into T: proper
/// ultrametric in S, witness from B(q, r) inside f^{-1}([0,r] u {f(q)}).
MetricTable properize_ult(const Space& x, const MetricTable& d, const ValueSet& s,
                          const SporadicSet& t, const RealFunction& f);

/// w = psi o d for an ultrametric d: ultrametric with values in T, w <= d,
/// witness psi(beta). Rejects non-ultrametric input (psi breaks the plain
/// triangle inequality).
MetricTable quantize_metric(const Space& x, const MetricTable& d, const SporadicSet& t);

/// Checks w(x,z) < w(y,z) => w(y,z) = w(x,y) over all triples of the first
/// `points` points. True ultrametrics produce an empty report.
Report check_isosceles(const MetricTable& w, int points);

/// Verifies U(x, x; M_S) = {x} and U(0, x; M_S) = S ∩ [0, x) on the
/// representable window of S around [0, x]. S must be enumerable there.
Report ms_ball_structure(const ValueSet& s, const Rat& x);

/// True when every member of t is a member of s (exact decision for the
/// machine-representable kinds).
bool sporadic_within(const ValueSet& s, const SporadicSet& t);

}  // namespace metricext
