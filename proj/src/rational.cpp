#include "metricext/rational.hpp"

#include "metricext/errors.hpp"

namespace metricext {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::BadArgument: return "BadArgument";
    case Errc::NegativeValue: return "NegativeValue";
    case Errc::NotCharacteristic: return "NotCharacteristic";
    case Errc::NotUnbounded: return "NotUnbounded";
    case Errc::NotEnumerable: return "NotEnumerable";
    case Errc::MembershipViolation: return "MembershipViolation";
    case Errc::MissingWitness: return "MissingWitness";
    case Errc::EmptySubset: return "EmptySubset";
    case Errc::FiniteSubset: return "FiniteSubset";
    case Errc::NoProperTarget: return "NoProperTarget";
    case Errc::RosterMismatch: return "RosterMismatch";
    case Errc::NonUltrametricInput: return "NonUltrametricInput";
    case Errc::SchemaError: return "SchemaError";
    case Errc::ScanBudgetExceeded: return "ScanBudgetExceeded";
  }
  return "UnknownError";
}

Rat parse_rat(std::string_view text) {
  if (text.empty()) fail(Errc::SchemaError, "empty rational literal");
  std::string s(text);
  // mpq_class(str) aborts on garbage; validate by hand first.
  const auto slash = s.find('/');
  auto check_int = [&](std::string_view part, bool allow_sign) {
    if (part.empty()) return false;
    size_t i = 0;
    if (allow_sign && (part[0] == '-' || part[0] == '+')) i = 1;
    if (i == part.size()) return false;
    for (; i < part.size(); ++i)
      if (part[i] < '0' || part[i] > '9') return false;
    return true;
  };
  if (slash == std::string::npos) {
    if (!check_int(s, true)) fail(Errc::SchemaError, "bad rational literal '" + s + "'");
  } else {
    if (!check_int(std::string_view(s).substr(0, slash), true) ||
        !check_int(std::string_view(s).substr(slash + 1), false))
      fail(Errc::SchemaError, "bad rational literal '" + s + "'");
    if (std::string_view(s).substr(slash + 1).find_first_not_of('0') == std::string_view::npos)
      fail(Errc::SchemaError, "zero denominator in '" + s + "'");
  }
  Rat q(s);
  q.canonicalize();
  return q;
}

std::string format_rat(const Rat& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rat rat_floor(const Rat& q) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return Rat(fl);
}

}  // namespace metricext
