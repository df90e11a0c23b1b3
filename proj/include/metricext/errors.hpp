#pragma once

#include <stdexcept>
#include <string>

namespace metricext {

enum class Errc {
  BadArgument,
  NegativeValue,
  NotCharacteristic,
  NotUnbounded,
  NotEnumerable,
  MembershipViolation,
  MissingWitness,
  EmptySubset,
  FiniteSubset,
  NoProperTarget,
  RosterMismatch,
  NonUltrametricInput,
  SchemaError,
  ScanBudgetExceeded,
};

const char* errc_name(Errc c);

/// Library error carrying a stable code alongside the message.
class MetricError : public std::runtime_error {
 public:
  MetricError(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
  throw MetricError(code, msg);
}

}  // namespace metricext
