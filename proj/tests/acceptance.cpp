// Acceptance suite: one line per criterion, exact (zero-tolerance) checks in
// rational arithmetic throughout. Exits nonzero if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <vector>

#include "metricext/extension.hpp"
#include "metricext/jsonio.hpp"
#include "test_support.hpp"

using namespace metricext;
using namespace testsupport;

namespace {

struct Outcome {
  bool pass = true;
  long checks = 0;
  long violations = 0;
  std::string note;

  void require(bool ok) {
    ++checks;
    if (!ok) {
      pass = false;
      ++violations;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int g_failures = 0;

void print_line(int id, const std::string& label, const Outcome& o, double secs, double limit) {
  const bool in_time = limit <= 0 || secs < limit;
  const bool pass = o.pass && in_time;
  if (!pass) ++g_failures;
  std::printf("criterion %2d [%s] %s: %ld checks, %ld violations%s (%.2f s%s)\n", id,
              pass ? "PASS" : "FAIL", label.c_str(), o.checks, o.violations,
              o.note.empty() ? "" : (", " + o.note).c_str(), secs,
              limit > 0 ? (in_time ? ", within limit" : ", OVER LIMIT") : "");
}

// --------------------------------------------------------------------------
// Independent all-triples oracle for criterion 1. Deliberately re-implements
// the axiom checks with plain loops over the raw table.

struct RefViolation {
  int kind;  // 0 sym, 1 diag, 2 neg, 3 pos, 4 triangle
  int i, j, k;
  friend bool operator<(const RefViolation& a, const RefViolation& b) {
    return std::tie(a.kind, a.i, a.j, a.k) < std::tie(b.kind, b.i, b.j, b.k);
  }
  friend bool operator==(const RefViolation& a, const RefViolation& b) {
    return std::tie(a.kind, a.i, a.j, a.k) == std::tie(b.kind, b.i, b.j, b.k);
  }
};

std::vector<RefViolation> reference_check(const std::vector<Rat>& d, int n, MetricFlag claim) {
  std::vector<RefViolation> out;
  for (int i = 0; i < n; ++i)
    if (d[i * n + i] != 0) out.push_back({1, i, -1, -1});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (d[i * n + j] != d[j * n + i]) out.push_back({0, i, j, -1});
      if (d[i * n + j] < 0) out.push_back({2, i, j, -1});
      if (flag_is_positive(claim) && d[i * n + j] == 0) out.push_back({3, i, j, -1});
    }
  const bool strong = flag_is_ultra(claim);
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        const Rat bound = strong ? rat_max(d[i * n + j], d[j * n + k])
                                 : Rat(d[i * n + j] + d[j * n + k]);
        if (d[i * n + k] > bound) out.push_back({4, i, j, k});
      }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<RefViolation> library_as_ref(const Report& rep) {
  std::vector<RefViolation> out;
  for (const auto& v : rep.violations) {
    int kind = -1;
    switch (v.kind) {
      case ViolationKind::Symmetry: kind = 0; break;
      case ViolationKind::Diagonal: kind = 1; break;
      case ViolationKind::Negativity: kind = 2; break;
      case ViolationKind::Positivity: kind = 3; break;
      case ViolationKind::Triangle:
      case ViolationKind::StrongTriangle: kind = 4; break;
      default: kind = 9; break;
    }
    out.push_back({kind, v.i, v.j, v.k});
  }
  std::sort(out.begin(), out.end());
  return out;
}

// riffle of valid and invalid tables
std::vector<Rat> mixed_table(std::mt19937_64& rng, int n) {
  switch (rng() % 3) {
    case 0: return random_symmetric(rng, n);
    case 1: return random_metric(rng, n);
    default: return random_ultrametric(rng, n);
  }
}

// d(m, n) = base^max(floor(m/2), floor(n/2)); restricted to the evens this is
// the base^max(j, k) table of the worked examples.
MetricTable halfindex_powmax(const Space& x, const Rat& base) {
  Space xs = x;
  SporadicSet t(base, Rat(1));
  auto m = MetricTable::callback(
      [xs, t](PointId i, PointId j) {
        if (i == j) return Rat(0);
        const long a = xs.value(i).get_num().get_si() / 2;
        const long b = xs.value(j).get_num().get_si() / 2;
        return t.ladder(std::max(a, b));
      },
      MetricFlag::Ultra);
  m.value_set = ValueSet::geometric(base, Rat(1));
  SporadicSet tc = t;
  m.witness = ProperWitness::from(
      [xs, tc](int k) {
        auto [f, e] = xs.block_span(k);
        const long v = xs.value(f).get_num().get_si() / 2;
        return v > 0 ? tc.ladder(v) : Rat(0);
      },
      "beta(k) = base^floor(first value/2)");
  return m;
}

// accumulated ultrametric outputs feed criteria 4 and 8
struct UltraAudit {
  long closure_checks = 0, closure_violations = 0;
  long iso_checks = 0, iso_violations = 0;

  void feed(const Space& x, const MetricTable& m, const ValueSet& s, int points) {
    for (int i = 0; i < points; ++i)
      for (int j = i + 1; j < points; ++j) {
        ++closure_checks;
        if (!s.contains(m.at(i, j))) ++closure_violations;
      }
    Report iso = check_isosceles(m, points);
    iso_checks += iso.checks;
    iso_violations += static_cast<long>(iso.violations.size());
  }
};

UltraAudit g_audit;

// witness-exact ball, then depth scans at the cutoff depth and its double
bool ball_depth_stable(const Space& x, const MetricTable& m, PointId p, const Rat& r) {
  const auto exact = ball(x, m, p, r);
  int cutoff = 0;
  const Rat c = m.at(x.basepoint(), p) + r;
  while (m.witness->at(cutoff) <= c) ++cutoff;
  const int d1 = std::max(64, cutoff + 1);
  const auto shallow = ball(x, m, p, r, false, d1);
  const auto deep = ball(x, m, p, r, false, 2 * d1);
  return exact == shallow && shallow == deep;
}

struct LazyUltraInstance {
  Space space;
  Subset a;
  MetricTable d;
  ValueSet s;
};

LazyUltraInstance lazy_ultra_instance(std::mt19937_64& rng) {
  const int block_size = 1 + static_cast<int>(rng() % 2);
  Space x = Space::naturals(block_size);
  Subset a = (rng() % 2) ? Subset::evens() : Subset::multiples(3);
  const Rat base = (rng() % 2) ? Rat(2) : Rat(3);
  MetricTable d = halfindex_powmax(x, base);
  ValueSet s = (rng() % 2) ? ValueSet::geometric(base, Rat(1)) : ValueSet::half_line();
  return {x, a, d, s};
}

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::mt19937_64 rng(1001);
  const MetricFlag claims[] = {MetricFlag::Pseudo, MetricFlag::Metric, MetricFlag::Ultra};
  for (int it = 0; it < 1000; ++it) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const auto table = mixed_table(rng, n);
    const MetricFlag claim = claims[rng() % 3];
    auto m = MetricTable::dense(n, table, claim);
    const Report rep = verify_axioms(m, claim, n);
    const auto ref = reference_check(table, n, claim);
    o.require(rep.pass == ref.empty());
    o.require(library_as_ref(rep) == ref);
  }
  o.note = "1000 tables vs the independent all-triples oracle";
  print_line(1, "axiom oracle soundness", o, seconds_since(t0), 10.0);
}

// criterion-2 instances are reused by criterion 9
struct Crit2Instance {
  int n;
  std::vector<Rat> table;
  std::vector<PointId> a_ids;
  Rat tau;
};
std::vector<Crit2Instance> g_crit2;

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::mt19937_64 rng(2002);
  const Rat taus[] = {Rat(3, 2), Rat(2), Rat(3)};
  for (int it = 0; it < 1000; ++it) {
    const int n = 3 + static_cast<int>(rng() % 10);
    auto table = random_ultrametric(rng, n);
    const Space x = numbered_space(n);
    auto d = MetricTable::dense(n, table, MetricFlag::Ultra);
    auto ids = random_subset_ids(rng, n);
    const Subset a = Subset::of_ids(ids);
    const Rat tau = taus[rng() % 3];
    Retraction r = bdhm_retract(x, d, a, tau);
    o.require(lipschitz_ratio(x, r, d, n) <= tau * tau);
    for (PointId q = 0; q < n; ++q) {
      const PointId rq = r.at(q);
      if (a.contains(x, q)) {
        o.require(rq == q);
      } else {
        o.require(d.at(q, rq) <= tau * dist_to_set(x, d, q, a).first);
      }
    }
    if (g_crit2.size() < 100) g_crit2.push_back({n, table, ids, tau});
  }
  o.note = "1000 ultrametrics, tau in {3/2, 2, 3}";
  print_line(2, "tau^2 Lipschitz retraction bound", o, seconds_since(t0), 30.0);
}

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::mt19937_64 rng(3003);
  const ValueSet s2 = ValueSet::geometric(Rat(2), Rat(1));

  auto check_restriction = [&](const Space& x, const Subset& a, const MetricTable& d,
                               const MetricTable& big, int blocks) {
    const auto members = a.members_upto(x, blocks);
    for (PointId i : members)
      for (PointId j : members) o.require(big.at(i, j) == d.at(i, j));
  };

  for (int it = 0; it < 500; ++it) {
    const int n = 3 + static_cast<int>(rng() % 6);
    const Space x = numbered_space(n);
    const Subset a = Subset::of_ids(random_subset_ids(rng, n));

    auto dm = MetricTable::dense(n, random_metric(rng, n), MetricFlag::Metric);
    check_restriction(x, a, dm, base_extend_metric(x, a, dm), 1);
    check_restriction(x, a, dm, extend_metric_proper(x, a, dm).metric, 1);
    {
      Retraction r = make_retraction_onto(x, a);
      const Rat eta(1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 2));
      check_restriction(x, a, dm, extend_metric_proper_dense(x, a, dm, eta, r).metric, 1);
    }

    auto du = MetricTable::dense(n, random_ultrametric(rng, n), MetricFlag::Ultra);
    check_restriction(x, a, du, base_extend_ultrametric(x, a, du, s2), 1);
    {
      ExtensionResult res = extend_ultrametric_proper(x, a, du, s2);
      check_restriction(x, a, du, res.metric, 1);
      g_audit.feed(x, res.metric, s2, n);
    }

    // function extension: F|_A = f
    RealFunction f;
    f.at = [dm, bp = a.ids().front()](PointId q) { return dm.at(bp, q); };
    RealFunction bigf = extend_function_proper(x, a, f);
    for (PointId q : a.ids()) o.require(bigf.at(q) == f.at(q));
  }

  // the dense ultrametric pipeline requires infinite A: randomized lazy runs
  std::mt19937_64 rng2(3333);
  for (int it = 0; it < 500; ++it) {
    LazyUltraInstance inst = lazy_ultra_instance(rng2);
    const Rat etas[] = {Rat(1, 2), Rat(1), Rat(3)};
    ExtensionResult res =
        extend_ultrametric_proper_dense(inst.space, inst.a, inst.d, inst.s, etas[rng2() % 3]);
    check_restriction(inst.space, inst.a, inst.d, res.metric, 6);
    if (it % 50 == 0) {
      const int pts = inst.space.ensure_blocks(6);
      g_audit.feed(inst.space, res.metric, inst.s, pts);
    }
  }
  o.note = "500 instances per operation, bit-exact";
  print_line(3, "restriction identity of the six extensions", o, seconds_since(t0), 60.0);
}

void criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  o.checks = g_audit.closure_checks;
  o.violations = g_audit.closure_violations;
  o.pass = g_audit.closure_violations == 0 && g_audit.closure_checks > 0;
  o.note = "every ultrametric-pipeline entry decided by contains";
  print_line(4, "value-set closure in S", o, seconds_since(t0), 0);
}

void criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  const Space n1 = Space::naturals(1);
  const Subset evens = Subset::evens();
  const ValueSet s2 = ValueSet::geometric(Rat(2), Rat(1));

  std::vector<std::pair<std::string, MetricTable>> outputs;
  outputs.emplace_back("extend_metric_proper",
                       extend_metric_proper(n1, evens, lazy_absdiff(n1, Rat(1, 2))).metric);
  outputs.emplace_back(
      "extend_ultrametric_proper",
      extend_ultrametric_proper(n1, evens, halfindex_powmax(n1, Rat(2)), s2).metric);
  {
    Retraction r = make_retraction_onto(n1, evens);
    outputs.emplace_back(
        "extend_metric_proper_dense",
        extend_metric_proper_dense(n1, evens, lazy_absdiff(n1, Rat(1, 2)), Rat(1), r).metric);
  }
  outputs.emplace_back(
      "extend_ultrametric_proper_dense",
      extend_ultrametric_proper_dense(n1, evens, halfindex_powmax(n1, Rat(2)), s2, Rat(1)).metric);
  {
    auto d01 = MetricTable::callback([](PointId i, PointId j) { return i == j ? Rat(0) : Rat(1); },
                                     MetricFlag::Metric);
    outputs.emplace_back("properize",
                         properize(n1, d01, proper_function_into(n1, ValueSet::half_line())));
    auto u01 = MetricTable::callback([](PointId i, PointId j) { return i == j ? Rat(0) : Rat(1); },
                                     MetricFlag::Ultra);
    outputs.emplace_back("properize_ult", properize_ult(n1, u01, s2, SporadicSet(Rat(2), Rat(1)),
                                                        proper_function_into(n1, s2)));
    outputs.emplace_back("quantize_metric",
                         quantize_metric(n1, halfindex_powmax(n1, Rat(3)), SporadicSet(Rat(2), Rat(1))));
  }

  for (auto& [name, m] : outputs) {
    if (!m.witness || m.witness->finite_trivial) {
      o.require(false);
      continue;
    }
    o.require(certify_proper(n1, m, *m.witness, 64).pass);
    for (int r = 1; r <= 64; r *= 2) o.require(ball_depth_stable(n1, m, n1.basepoint(), Rat(r)));
  }
  o.note = std::to_string(outputs.size()) + " lazy pipeline outputs, radii 1..64";
  print_line(5, "properness: finite depth-stable balls", o, seconds_since(t0), 0);
}

void criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  const Space n1 = Space::naturals(1);
  const Subset evens = Subset::evens();
  const ValueSet s2 = ValueSet::geometric(Rat(2), Rat(1));
  const int points = n1.ensure_blocks(64);

  for (const Rat& eta : {Rat(1, 2), Rat(1), Rat(3)}) {
    {
      Retraction r = make_retraction_onto(n1, evens);
      ExtensionResult res =
          extend_metric_proper_dense(n1, evens, lazy_absdiff(n1, Rat(1, 2)), eta, r);
      for (PointId q = 0; q < points; ++q) o.require(res.metric.at(q, r.at(q)) <= eta);
    }
    {
      ExtensionResult res =
          extend_ultrametric_proper_dense(n1, evens, halfindex_powmax(n1, Rat(2)), s2, eta);
      const Rat theta = *res.theta;
      o.require(theta > 0);
      o.require(theta <= eta);
      o.require(s2.contains(theta));
      for (PointId q = 0; q < points; ++q) {
        o.require(res.metric.at(q, res.retraction->at(q)) <= eta);
        o.require(res.metric.at(q, res.retraction->at(q)) <= theta);
      }
      g_audit.feed(n1, res.metric, s2, 32);
    }
  }
  o.note = "eta in {1/2, 1, 3}, depth-64 prefix, theta in S \\ {0}";
  print_line(6, "eta-density along the retraction", o, seconds_since(t0), 0);
}

void criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::mt19937_64 rng(7007);
  const SporadicSet ts[] = {SporadicSet(Rat(2), Rat(1)), SporadicSet(Rat(3), Rat(2)),
                            SporadicSet(Rat(3, 2), Rat(1, 5))};
  for (int it = 0; it < 500; ++it) {
    const int n = 3 + static_cast<int>(rng() % 8);
    const Space x = numbered_space(n);
    auto d = MetricTable::dense(n, random_ultrametric(rng, n), MetricFlag::Ultra);
    const SporadicSet& t = ts[rng() % 3];
    MetricTable w = quantize_metric(x, d, t);
    o.require(verify_axioms(w, MetricFlag::Ultra, n).pass);
    MetricTable ww = quantize_metric(x, w, t);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        o.require(w.at(i, j) <= d.at(i, j));
        o.require(ww.at(i, j) == w.at(i, j));
      }
    g_audit.iso_checks += check_isosceles(d, n).checks;
    g_audit.iso_violations += static_cast<long>(check_isosceles(d, n).violations.size());
    g_audit.feed(x, w, ValueSet::geometric(t.base(), t.scale()), n);
  }
  o.note = "500 random ultrametrics, three sporadic ladders";
  print_line(7, "quantizer: psi o d <= d, idempotent, ultrametric", o, seconds_since(t0), 0);
}

void criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  o.checks = g_audit.iso_checks;
  o.violations = g_audit.iso_violations;
  o.pass = g_audit.iso_violations == 0 && g_audit.iso_checks > 0;
  o.note = "inputs, quantizations and extensions produced by the suite";
  print_line(8, "isosceles lemma on every produced ultrametric", o, seconds_since(t0), 0);
}

void criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::mt19937_64 rng(9009);
  const ValueSet s2 = ValueSet::geometric(Rat(2), Rat(1));

  // 100 permuted replays of criterion-2 instances: the bounds of criteria
  // 2 and 3 survive any tie-break change
  for (const auto& inst : g_crit2) {
    std::vector<int> perm(inst.n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto table = permute_table(inst.table, inst.n, perm);
    const Space x = numbered_space(inst.n);
    auto d = MetricTable::dense(inst.n, table, MetricFlag::Ultra);
    std::vector<PointId> ids;
    for (PointId v : inst.a_ids) ids.push_back(perm[v]);
    const Subset a = Subset::of_ids(ids);
    Retraction r = bdhm_retract(x, d, a, inst.tau);
    o.require(lipschitz_ratio(x, r, d, inst.n) <= inst.tau * inst.tau);
    for (PointId q = 0; q < inst.n; ++q)
      if (!a.contains(x, q))
        o.require(d.at(q, r.at(q)) <= inst.tau * dist_to_set(x, d, q, a).first);
    ExtensionResult res = extend_ultrametric_proper(x, a, d, s2);
    for (PointId i : ids)
      for (PointId j : ids) o.require(res.metric.at(i, j) == d.at(i, j));
  }

  // lazy replay with a block-local enumeration permutation: properness and
  // density are tie-break independent
  BlockGen swapped;
  swapped.desc = "naturals, swapped pairs";
  swapped.fill = [](int k, std::vector<std::string>& ns, std::vector<Rat>& vs) {
    ns.push_back(std::to_string(2 * k + 1));
    vs.emplace_back(2 * k + 1);
    ns.push_back(std::to_string(2 * k));
    vs.emplace_back(2 * k);
  };
  // block 0 is (1, 0): pass the basepoint by name
  Space xs = Space::from_generator(swapped, "0");
  MetricTable d = halfindex_powmax(xs, Rat(2));
  ExtensionResult res = extend_ultrametric_proper_dense(xs, Subset::evens(), d, s2, Rat(1));
  const int pts = xs.ensure_blocks(32);
  for (PointId q = 0; q < pts; ++q) {
    o.require(res.metric.at(q, res.retraction->at(q)) <= 1);
  }
  o.require(certify_proper(xs, res.metric, *res.metric.witness, 32).pass);
  for (PointId i = 0; i < pts; ++i)
    for (PointId j = 0; j < pts; ++j)
      if (Subset::evens().contains(xs, i) && Subset::evens().contains(xs, j))
        o.require(res.metric.at(i, j) == d.at(i, j));

  o.note = "100 permuted finite replays + a block-shuffled lazy replay";
  print_line(9, "order-robustness under roster permutation", o, seconds_since(t0), 0);
}

void criterion10() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  const ValueSet s2 = ValueSet::geometric(Rat(2), Rat(1));
  for (const Rat& x : {Rat(1, 4), Rat(1), Rat(8)}) {
    Report rep = ms_ball_structure(s2, x);
    o.checks += rep.checks;
    o.require(rep.pass);
  }
  o.note = "S = Geometric(2,1) at x in {1/4, 1, 8}";
  print_line(10, "M_S ball structure", o, seconds_since(t0), 0);
}

}  // namespace

int main() {
  std::printf("acceptance: exact property checks, tolerance zero\n");
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  if (g_failures == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  return 1;
}
