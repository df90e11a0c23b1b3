#pragma once

#include <cstddef>
#include <vector>

#include "metricext/rational.hpp"
#include "metricext/valueset.hpp"

namespace metricext::kernels {

struct Triple {
  int i, j, k;
  friend bool operator<(const Triple& a, const Triple& b) {
    if (a.i != b.i) return a.i < b.i;
    if (a.j != b.j) return a.j < b.j;
    return a.k < b.k;
  }
  friend bool operator==(const Triple& a, const Triple& b) {
    return a.i == b.i && a.j == b.j && a.k == b.k;
  }
};

// Dense tables are full n*n row-major arrays of canonical rationals. Each
// kernel has one serial and one OpenMP body; both return identical results
// (arithmetic is exact), sorted where order could differ between schedules.

/// Triples (i, j, k), i < k, j != i, j != k, with d(i,k) > d(i,j) + d(j,k)
/// (strong = false) or d(i,k) > d(i,j) v d(j,k) (strong = true).
std::vector<Triple> triangle_violations(const Rat* d, int n, bool strong, bool parallel);

/// Triples (i, j, k) with d(i,k) < d(j,k) but d(j,k) != d(i,j): failures of
/// the ultrametric isosceles property.
std::vector<Triple> isosceles_violations(const Rat* d, int n, bool parallel);

void entrywise_max(const Rat* a, const Rat* b, Rat* out, std::size_t count, bool parallel);
void entrywise_min_scalar(const Rat* a, const Rat& cap, Rat* out, std::size_t count, bool parallel);
void entrywise_psi(const Rat* a, const SporadicSet& t, Rat* out, std::size_t count, bool parallel);

/// max over pairs i < j with d(i,j) > 0 of d(r[i], r[j]) / d(i,j); 0 when no
/// such pair exists.
Rat pair_ratio_max(const Rat* d, int n, const int* rmap, bool parallel);

/// Heuristic used by the library entry points to pick the OpenMP body.
inline bool parallel_worthwhile(long work_items) { return work_items >= 32768; }

}  // namespace metricext::kernels
