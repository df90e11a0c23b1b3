#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace metricext {

/// Exact rational scalar. Every distance, function value, witness bound and
/// value-set member in this library is a canonicalized mpq_class; nothing is
/// ever rounded, so restriction identities can be asserted bit-exactly.
using Rat = mpq_class;

/// Parses "p", "-p" or "p/q" (q > 0 after canonicalization).
Rat parse_rat(std::string_view text);

/// Canonical rendering: "p" for integers, "p/q" otherwise.
std::string format_rat(const Rat& q);

/// ⌊q⌋ as an exact integer-valued rational (band keys can exceed 2^64).
Rat rat_floor(const Rat& q);

inline const Rat& rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }
inline const Rat& rat_min(const Rat& a, const Rat& b) { return b < a ? b : a; }

inline Rat rat_abs(const Rat& a) { return a < 0 ? Rat(-a) : a; }

}  // namespace metricext
