#pragma once

#include <string>
#include <vector>

namespace metricext {

enum class ViolationKind {
  Symmetry,
  Diagonal,
  Negativity,
  Positivity,
  Triangle,
  StrongTriangle,
  Isosceles,
  Witness,
  Restriction,
  ValueSetClosure,
  Density,
  Lipschitz,
  Radius,
  BallStructure,
};

const char* violation_name(ViolationKind k);

struct Violation {
  ViolationKind kind;
  int i = -1, j = -1, k = -1;
  std::string detail;
};

struct Report {
  bool pass = true;
  long checks = 0;
  std::vector<Violation> violations;
  std::string summary;

  void add(Violation v) {
    pass = false;
    violations.push_back(std::move(v));
  }
};

}  // namespace metricext
