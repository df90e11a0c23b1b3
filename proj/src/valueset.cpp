#include "metricext/valueset.hpp"

#include <algorithm>

#include "metricext/errors.hpp"

namespace metricext {

SporadicSet::SporadicSet(Rat base, Rat scale) : base_(std::move(base)), scale_(std::move(scale)) {
  if (base_ <= 1) fail(Errc::BadArgument, "sporadic base must exceed 1, got " + format_rat(base_));
  if (scale_ <= 0) fail(Errc::BadArgument, "sporadic scale must be positive, got " + format_rat(scale_));
  seed_ = scale_;
  while (seed_ < 1) seed_ *= base_;
  while (seed_ / base_ >= 1) seed_ /= base_;
}

bool SporadicSet::contains(const Rat& x) const {
  if (x < 0) fail(Errc::NegativeValue, "membership query for " + format_rat(x));
  if (x == 0) return true;
  Rat v = scale_;
  if (v <= x) {
    while (v < x) v *= base_;
  } else {
    while (v > x) v /= base_;
  }
  return v == x;
}

Rat SporadicSet::floor_member(const Rat& x) const {
  if (x < 0) fail(Errc::NegativeValue, "psi of " + format_rat(x));
  if (x == 0) return Rat(0);
  Rat v = scale_;
  if (v <= x) {
    while (v * base_ <= x) v *= base_;
  } else {
    while (v > x) v /= base_;
  }
  return v;
}

Rat SporadicSet::ladder(long k) const {
  Rat v = seed_;
  for (long i = 0; i < k; ++i) v *= base_;
  for (long i = 0; i > k; --i) v /= base_;
  return v;
}

ValueSet ValueSet::half_line() {
  ValueSet s;
  s.kind_ = ValueSetKind::HalfLine;
  return s;
}

ValueSet ValueSet::geometric(Rat base, Rat scale) {
  ValueSet s;
  s.kind_ = ValueSetKind::Geometric;
  if (base <= 1) fail(Errc::BadArgument, "geometric base must exceed 1, got " + format_rat(base));
  if (scale <= 0) fail(Errc::BadArgument, "geometric scale must be positive, got " + format_rat(scale));
  s.base_ = std::move(base);
  s.scale_ = std::move(scale);
  return s;
}

ValueSet ValueSet::explicit_list(std::vector<Rat> values) {
  ValueSet s;
  s.kind_ = ValueSetKind::ExplicitList;
  for (const Rat& v : values)
    if (v < 0) fail(Errc::NegativeValue, "value set member " + format_rat(v));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.empty() || values.front() != 0)
    fail(Errc::BadArgument, "explicit value set must contain 0");
  s.values_ = std::move(values);
  return s;
}

bool ValueSet::contains(const Rat& x) const {
  if (x < 0) fail(Errc::NegativeValue, "membership query for " + format_rat(x));
  switch (kind_) {
    case ValueSetKind::HalfLine:
      return true;
    case ValueSetKind::Geometric:
      return SporadicSet(base_, scale_).contains(x);
    case ValueSetKind::ExplicitList:
      return std::binary_search(values_.begin(), values_.end(), x);
  }
  return false;
}

bool ValueSet::unbounded() const { return kind_ != ValueSetKind::ExplicitList; }

bool ValueSet::characteristic() const { return kind_ != ValueSetKind::ExplicitList; }

std::optional<Rat> ValueSet::floor_nonzero(const Rat& bound) const {
  if (bound <= 0) return std::nullopt;
  switch (kind_) {
    case ValueSetKind::HalfLine:
      return bound;
    case ValueSetKind::Geometric:
      return SporadicSet(base_, scale_).floor_member(bound);
    case ValueSetKind::ExplicitList: {
      std::optional<Rat> best;
      for (const Rat& v : values_)
        if (v > 0 && v <= bound) best = v;
      return best;
    }
  }
  return std::nullopt;
}

std::string ValueSet::describe() const {
  switch (kind_) {
    case ValueSetKind::HalfLine:
      return "[0,inf)";
    case ValueSetKind::Geometric:
      return "{0} u {" + format_rat(scale_) + "*" + format_rat(base_) + "^n}";
    case ValueSetKind::ExplicitList: {
      std::string out = "{";
      for (size_t i = 0; i < values_.size(); ++i) {
        if (i) out += ",";
        out += format_rat(values_[i]);
      }
      return out + "}";
    }
  }
  return "?";
}

SporadicSet sporadic_subset(const ValueSet& s) {
  if (!s.unbounded() || !s.characteristic())
    fail(Errc::NotCharacteristic,
         "no sporadic subset of " + s.describe() + " (finite lists have no arbitrarily small nonzero members)");
  if (s.kind() == ValueSetKind::Geometric) return SporadicSet(s.base(), s.scale());
  return SporadicSet(Rat(2), Rat(1));  // canonical choice inside the half line
}

Rat psi_floor(const SporadicSet& t, const Rat& x) { return t.floor_member(x); }

}  // namespace metricext
