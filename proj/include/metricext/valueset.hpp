#pragma once

#include <optional>
#include <vector>

#include "metricext/rational.hpp"

namespace metricext {

/// The bi-infinite strictly increasing sequence s_n = scale * base^n together
/// with 0. Realizes the sporadic sets T: s_n -> 0 as n -> -inf and
/// s_n -> inf as n -> +inf.
class SporadicSet {
 public:
  SporadicSet(Rat base, Rat scale);

  const Rat& base() const { return base_; }
  const Rat& scale() const { return scale_; }

  bool contains(const Rat& x) const;

  /// psi: 0 -> 0, else the unique member s_i with s_i <= x < s_{i+1}.
  Rat floor_member(const Rat& x) const;

  /// s_{i+1} for a member s_i (not checked).
  Rat next_above(const Rat& member) const { return member * base_; }

  /// Strictly increasing unbounded ladder a_k = seed * base^k used by the
  /// generated proper functions; seed is the smallest member >= 1.
  Rat ladder(long k) const;
  const Rat& seed() const { return seed_; }

 private:
  Rat base_, scale_, seed_;
};

enum class ValueSetKind { HalfLine, Geometric, ExplicitList };

/// A machine-representable distance value set S within [0, inf): the half
/// line, a geometric ladder {0} u {scale*base^n : n in Z}, or an explicit
/// finite list. 0 is always a member.
class ValueSet {
 public:
  static ValueSet half_line();
  static ValueSet geometric(Rat base, Rat scale);
  static ValueSet explicit_list(std::vector<Rat> values);

  ValueSetKind kind() const { return kind_; }
  bool contains(const Rat& x) const;
  bool unbounded() const;
  bool characteristic() const;

  const Rat& base() const { return base_; }
  const Rat& scale() const { return scale_; }
  const std::vector<Rat>& values() const { return values_; }

  /// Largest nonzero member <= bound, when one is representable.
  std::optional<Rat> floor_nonzero(const Rat& bound) const;

  std::string describe() const;

 private:
  ValueSet() = default;
  ValueSetKind kind_ = ValueSetKind::HalfLine;
  Rat base_, scale_;
  std::vector<Rat> values_;
};

/// A sporadic T with T subset of S. For geometric S this is S itself; for the
/// half line the canonical choice Geometric(2, 1). Explicit lists are
/// rejected: they are neither unbounded nor characteristic.
SporadicSet sporadic_subset(const ValueSet& s);

/// The quantizer of Prop-style maps: psi(0) = 0 and psi(x) = a_i for
/// a_i <= x < a_{i+1}. Monotone, idempotent, psi(x) <= x.
Rat psi_floor(const SporadicSet& t, const Rat& x);

}  // namespace metricext
