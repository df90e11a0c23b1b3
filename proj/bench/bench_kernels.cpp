// Compares the serial and OpenMP bodies of the dense-table kernels on
// synthetic instances. Rational arithmetic is exact, so both variants return
// identical results; the interesting number is the wall-clock ratio.

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <vector>

#include "metricext/kernels.hpp"

using namespace metricext;
using namespace metricext::kernels;

namespace {

std::vector<Rat> random_symmetric(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> num(0, 24), den(1, 8);
  std::vector<Rat> d(static_cast<std::size_t>(n) * n, Rat(0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Rat v(num(rng), den(rng));
      d[static_cast<std::size_t>(i) * n + j] = v;
      d[static_cast<std::size_t>(j) * n + i] = v;
    }
  return d;
}

// single-linkage completion of a random table: a valid ultrametric, the
// realistic input for the verification scans (no violation lists to merge)
std::vector<Rat> random_valid_ultra(std::mt19937_64& rng, int n) {
  auto d = random_symmetric(rng, n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Rat via = rat_max(d[static_cast<std::size_t>(i) * n + k],
                          d[static_cast<std::size_t>(k) * n + j]);
        if (i != j && via < d[static_cast<std::size_t>(i) * n + j])
          d[static_cast<std::size_t>(i) * n + j] = via;
      }
  return d;
}

double time_of(const std::function<void()>& body, int reps) {
  body();  // warm up
  const double t0 = omp_get_wtime();
  for (int r = 0; r < reps; ++r) body();
  return (omp_get_wtime() - t0) / reps;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-22s %10.4f ms %10.4f ms %7.2fx\n", name, serial * 1e3, parallel * 1e3,
              serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 192;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 3;
  std::mt19937_64 rng(42);
  auto d = random_valid_ultra(rng, n);
  const std::size_t cells = d.size();

  std::printf("kernel benchmark: n = %d points (%zu cells), %d reps, %d threads\n", n, cells, reps,
              omp_get_max_threads());
  std::printf("%-22s %13s %13s %8s\n", "kernel", "serial", "openmp", "speedup");

  {
    std::vector<Triple> vs, vp;
    const double ts = time_of([&] { vs = triangle_violations(d.data(), n, true, false); }, reps);
    const double tp = time_of([&] { vp = triangle_violations(d.data(), n, true, true); }, reps);
    if (vs != vp) std::abort();
    row("triangle scan", ts, tp);
  }
  {
    std::vector<Triple> vs, vp;
    const double ts = time_of([&] { vs = isosceles_violations(d.data(), n, false); }, reps);
    const double tp = time_of([&] { vp = isosceles_violations(d.data(), n, true); }, reps);
    if (vs != vp) std::abort();
    row("isosceles scan", ts, tp);
  }
  {
    auto e = random_symmetric(rng, n);
    std::vector<Rat> os(cells), op(cells);
    const double ts = time_of([&] { entrywise_max(d.data(), e.data(), os.data(), cells, false); }, reps);
    const double tp = time_of([&] { entrywise_max(d.data(), e.data(), op.data(), cells, true); }, reps);
    if (os != op) std::abort();
    row("entrywise max", ts, tp);
  }
  {
    const SporadicSet t(Rat(2), Rat(1));
    std::vector<Rat> os(cells), op(cells);
    const double ts = time_of([&] { entrywise_psi(d.data(), t, os.data(), cells, false); }, reps);
    const double tp = time_of([&] { entrywise_psi(d.data(), t, op.data(), cells, true); }, reps);
    if (os != op) std::abort();
    row("entrywise psi", ts, tp);
  }
  {
    std::vector<int> rmap(n);
    for (int i = 0; i < n; ++i) rmap[i] = static_cast<int>(rng() % n);
    Rat qs, qp;
    const double ts = time_of([&] { qs = pair_ratio_max(d.data(), n, rmap.data(), false); }, reps);
    const double tp = time_of([&] { qp = pair_ratio_max(d.data(), n, rmap.data(), true); }, reps);
    if (qs != qp) std::abort();
    row("lipschitz ratio", ts, tp);
  }
  return 0;
}
