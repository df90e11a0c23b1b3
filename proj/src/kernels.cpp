#include "metricext/kernels.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace metricext::kernels {

namespace {

template <typename PerRow>
std::vector<Triple> row_scan(int n, bool parallel, PerRow&& body) {
  std::vector<Triple> out;
  if (!parallel) {
    for (int i = 0; i < n; ++i) body(i, out);
    std::sort(out.begin(), out.end());
    return out;
  }
  std::vector<std::vector<Triple>> partial;
#pragma omp parallel
  {
#ifdef _OPENMP
    const int nt = omp_get_num_threads();
    const int tid = omp_get_thread_num();
#else
    const int nt = 1, tid = 0;
#endif
#pragma omp single
    partial.resize(nt);
    std::vector<Triple> local;
#pragma omp for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) body(i, local);
    partial[tid] = std::move(local);
  }
  for (auto& p : partial) out.insert(out.end(), p.begin(), p.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Triple> triangle_violations(const Rat* d, int n, bool strong, bool parallel) {
  return row_scan(n, parallel, [&](int i, std::vector<Triple>& out) {
    for (int k = i + 1; k < n; ++k) {
      const Rat& dik = d[static_cast<std::size_t>(i) * n + k];
      for (int j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        const Rat& dij = d[static_cast<std::size_t>(i) * n + j];
        const Rat& djk = d[static_cast<std::size_t>(j) * n + k];
        const bool bad = strong ? dik > rat_max(dij, djk) : dik > dij + djk;
        if (bad) out.push_back({i, j, k});
      }
    }
  });
}

std::vector<Triple> isosceles_violations(const Rat* d, int n, bool parallel) {
  return row_scan(n, parallel, [&](int i, std::vector<Triple>& out) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const Rat& dik = d[static_cast<std::size_t>(i) * n + k];
        const Rat& djk = d[static_cast<std::size_t>(j) * n + k];
        if (dik < djk && djk != d[static_cast<std::size_t>(i) * n + j]) out.push_back({i, j, k});
      }
    }
  });
}

void entrywise_max(const Rat* a, const Rat* b, Rat* out, std::size_t count, bool parallel) {
  if (!parallel) {
    for (std::size_t m = 0; m < count; ++m) out[m] = rat_max(a[m], b[m]);
    return;
  }
#pragma omp parallel for schedule(static)
  for (long m = 0; m < static_cast<long>(count); ++m) out[m] = rat_max(a[m], b[m]);
}

void entrywise_min_scalar(const Rat* a, const Rat& cap, Rat* out, std::size_t count, bool parallel) {
  if (!parallel) {
    for (std::size_t m = 0; m < count; ++m) out[m] = rat_min(a[m], cap);
    return;
  }
#pragma omp parallel for schedule(static)
  for (long m = 0; m < static_cast<long>(count); ++m) out[m] = rat_min(a[m], cap);
}

void entrywise_psi(const Rat* a, const SporadicSet& t, Rat* out, std::size_t count, bool parallel) {
  if (!parallel) {
    for (std::size_t m = 0; m < count; ++m) out[m] = t.floor_member(a[m]);
    return;
  }
#pragma omp parallel for schedule(dynamic, 64)
  for (long m = 0; m < static_cast<long>(count); ++m) out[m] = t.floor_member(a[m]);
}

Rat pair_ratio_max(const Rat* d, int n, const int* rmap, bool parallel) {
  auto row_max = [&](int i, Rat& best) {
    for (int j = i + 1; j < n; ++j) {
      const Rat& dij = d[static_cast<std::size_t>(i) * n + j];
      if (dij == 0) continue;
      Rat q = d[static_cast<std::size_t>(rmap[i]) * n + rmap[j]] / dij;
      if (q > best) best = std::move(q);
    }
  };
  if (!parallel) {
    Rat best(0);
    for (int i = 0; i < n; ++i) row_max(i, best);
    return best;
  }
  Rat best(0);
#pragma omp parallel
  {
    Rat local(0);
#pragma omp for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) row_max(i, local);
#pragma omp critical
    if (local > best) best = local;
  }
  return best;
}

}  // namespace metricext::kernels
