#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "metricext/errors.hpp"
#include "metricext/retraction.hpp"
#include "test_support.hpp"

using namespace metricext;
using namespace testsupport;

namespace {

// the 4-point example: indices a=0, b=1, x=2, y=3
std::vector<Rat> table4() {
  auto q = [](long v) { return Rat(v); };
  return {q(0), q(4), q(1), q(4), q(4), q(0), q(4), q(2),
          q(1), q(4), q(0), q(4), q(4), q(2), q(4), q(0)};
}

}  // namespace

TEST_CASE("bdhm on the 4-point example, near-first order") {
  const Space x = Space::finite({"a", "b", "x", "y"});
  auto d = MetricTable::dense(4, table4(), MetricFlag::Ultra);
  REQUIRE(verify_axioms(d, MetricFlag::Ultra, 4).pass);
  const Subset a = Subset::of_ids({0, 1});

  Retraction r = bdhm_retract(x, d, a, Rat(2));
  CHECK(r.at(0) == 0);  // retraction identity
  CHECK(r.at(1) == 1);
  CHECK(r.at(2) == 0);  // rho(x) = 1, A_x = {a}
  CHECK(r.at(3) == 0);  // rho(y) = 2, A_y = {a, b}, a wins under a < b

  CHECK(check_retraction(x, d, a, r, 4).pass);
  const Rat ratio = lipschitz_ratio(x, r, d, 4);
  CHECK(ratio <= Rat(4));
}

TEST_CASE("bdhm with b in the lower band (permuted basepoint)") {
  // same table with the roster permuted so b is the basepoint: bands from b
  // put b below a, so the least element of A_y flips to b
  const Space x = Space::finite({"b", "a", "x", "y"});
  auto q = [](long v) { return Rat(v); };
  // indices now: b=0, a=1, x=2, y=3
  auto d = MetricTable::dense(4,
                              {q(0), q(4), q(4), q(2), q(4), q(0), q(1), q(4),
                               q(4), q(1), q(0), q(4), q(2), q(4), q(4), q(0)},
                              MetricFlag::Ultra);
  REQUIRE(verify_axioms(d, MetricFlag::Ultra, 4).pass);
  const Subset a = Subset::of_ids({0, 1});
  Retraction r = bdhm_retract(x, d, a, Rat(2));
  CHECK(r.at(2) == 1);  // A_x = {a} still
  CHECK(r.at(3) == 0);  // A_y = {a, b}; b now wins
  CHECK(lipschitz_ratio(x, r, d, 4) <= Rat(4));
}

TEST_CASE("bdhm argument errors") {
  const Space x = Space::finite({"a", "b"});
  auto d = MetricTable::dense(2, {Rat(0), Rat(1), Rat(1), Rat(0)}, MetricFlag::Ultra);
  CHECK_THROWS_AS(bdhm_retract(x, d, Subset::of_ids({0}), Rat(1)), MetricError);
  CHECK_THROWS_AS(bdhm_retract(x, d, Subset::empty(), Rat(2)), MetricError);
  auto m = MetricTable::dense(2, {Rat(0), Rat(1), Rat(1), Rat(0)}, MetricFlag::Metric);
  CHECK_THROWS_AS(bdhm_retract(x, m, Subset::of_ids({0}), Rat(2)), MetricError);
}

TEST_CASE("identity retraction has ratio 1") {
  const Space x = numbered_space(6);
  std::mt19937_64 rng(17);
  auto d = MetricTable::dense(6, random_ultrametric(rng, 6), MetricFlag::Ultra);
  Retraction r = bdhm_retract(x, d, Subset::of_ids({0, 1, 2, 3, 4, 5}), Rat(2));
  CHECK(lipschitz_ratio(x, r, d, 6) == Rat(1));
}

TEST_CASE("random sweep: tau^2 bound, both orders, permutation-robust") {
  std::mt19937_64 rng(23);
  const Rat taus[] = {Rat(3, 2), Rat(2), Rat(3)};
  for (int it = 0; it < 150; ++it) {
    const int n = 3 + static_cast<int>(rng() % 9);
    auto table = random_ultrametric(rng, n);
    const Space x = numbered_space(n);
    auto d = MetricTable::dense(n, table, MetricFlag::Ultra);
    const Subset a = Subset::of_ids(random_subset_ids(rng, n));
    const Rat tau = taus[rng() % 3];
    for (OrderBias bias : {OrderBias::NearFirst, OrderBias::FarFirst}) {
      Retraction r = bdhm_retract(x, d, a, tau, bias);
      CHECK(check_retraction(x, d, a, r, n).pass);
      const Rat ratio = lipschitz_ratio(x, r, d, n);
      CHECK(ratio <= tau * tau);
      CHECK(ratio <= tau);  // the discrete proper case is tau-Lipschitz outright
    }
    // permuted roster: the bound survives any tie-break change
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto ptable = permute_table(table, n, perm);
    auto pd = MetricTable::dense(n, ptable, MetricFlag::Ultra);
    std::vector<PointId> pids;
    for (PointId v : a.ids()) pids.push_back(perm[v]);
    Retraction pr = bdhm_retract(x, pd, Subset::of_ids(pids), tau);
    CHECK(lipschitz_ratio(x, pr, pd, n) <= tau * tau);
  }
}

TEST_CASE("proper_retract on the even hub") {
  const Space n = Space::naturals(1);
  Retraction r = proper_retract(n, Subset::evens(), Rat(2));
  REQUIRE(r.certified());

  // evens retract to themselves, odds to a nearby even within tau * rho
  MetricTable hub = hub_ultrametric(n);
  CHECK(r.at(0) == 0);
  CHECK(r.at(4) == 4);
  CHECK(r.at(1) == 2);
  CHECK(r.at(5) == 6);  // far-first picks the highest admissible band
  CHECK(check_retraction(n, hub, Subset::evens(), r, 40).pass);
  CHECK(lipschitz_ratio(n, r, hub, 40) <= Rat(4));  // tau^2 on the sampled prefix

  // hub distances realize D(m, n) = 2^max on distinct naturals
  CHECK(hub.at(2, 5) == 32);
  CHECK(hub.at(0, 3) == 8);

  // preimage of {0} is finite: certified scan agrees with a deep brute scan
  std::vector<PointId> pre;
  for (int k = 0; r.image_block_floor(k) <= 0; ++k) {
    auto [f, e] = n.block_span(k);
    for (PointId p = f; p < e; ++p)
      if (r.at(p) == 0) pre.push_back(p);
  }
  CHECK(pre == std::vector<PointId>{0});
  for (PointId p = 0; p < n.ensure_blocks(48); ++p)
    if (r.at(p) == 0) CHECK(p == 0);

  // metric properness: preimages of balls in A are finite at every radius
  for (int radius : {1, 4, 16, 64}) {
    auto target = ball(n, hub, 0, Rat(radius));
    std::vector<PointId> certified;
    int kmax = 0;
    while (r.image_block_floor(kmax) <= n.block_of(target.back())) ++kmax;
    for (int k = 0; k < kmax; ++k) {
      auto [f, e] = n.block_span(k);
      for (PointId p = f; p < e; ++p)
        if (std::find(target.begin(), target.end(), r.at(p)) != target.end())
          certified.push_back(p);
    }
    // brute double-depth scan finds nothing new
    for (PointId p = 0; p < n.ensure_blocks(2 * kmax + 8); ++p)
      if (std::find(target.begin(), target.end(), r.at(p)) != target.end())
        CHECK(std::find(certified.begin(), certified.end(), p) != certified.end());
  }

  CHECK_THROWS_AS(proper_retract(n, Subset::of_ids({0, 2}), Rat(2)), MetricError);
  Retraction id = proper_retract(n, Subset::everything(), Rat(2));
  CHECK(id.at(17) == 17);
}

TEST_CASE("extend_proper_map, infinite A") {
  const Space x = Space::naturals(1);
  const Space y = Space::naturals(1);
  // f(2k) = k, proper with the halving certificate
  PointMap f;
  f.at = [](PointId a) { return a / 2; };
  f.block_floor = [](int j) { return j / 2; };
  f.desc = "f(2k) = k";

  PointMap big = extend_proper_map(x, Subset::evens(), f, y, Rat(2));
  CHECK(big.at(0) == 0);
  CHECK(big.at(6) == 3);   // restriction
  CHECK(big.at(5) == 3);   // f(r(5)) = f(6)
  CHECK(big.at(1) == 1);   // f(r(1)) = f(2)
  REQUIRE(big.block_floor);
  auto pre = map_preimage(x, big, {0}, y);
  CHECK(pre == std::vector<PointId>{0});
  auto pre3 = map_preimage(x, big, {3}, y);
  for (PointId p : pre3) CHECK(big.at(p) == 3);
  CHECK(pre3 == std::vector<PointId>{5, 6});

  // A = X returns f itself
  PointMap same = extend_proper_map(x, Subset::everything(), f, y, Rat(2));
  CHECK(same.at(8) == 4);

  CHECK_THROWS_AS(extend_proper_map(x, Subset::evens(), f, Space::finite({"only"}), Rat(2)),
                  MetricError);
}

TEST_CASE("extend_proper_map, finite A via the product construction") {
  const Space x = Space::naturals(1);
  const Space y = Space::naturals(1);
  PointMap f;
  f.at = [](PointId) { return 0; };  // f(0) = 0 on A = {0}
  f.block_floor = [](int) { return 0; };
  f.desc = "f(0) = 0";

  PointMap big = extend_proper_map(x, Subset::of_ids({0}), f, y, Rat(2));
  CHECK(big.at(0) == 0);  // restriction
  // values escape to infinity along the blocks
  CHECK(big.at(2) == 1);
  CHECK(big.at(3) == 2);
  CHECK(big.at(10) == 9);
  REQUIRE(big.block_floor);
  auto pre = map_preimage(x, big, {0}, y);
  for (PointId p : pre) CHECK(big.at(p) == 0);
  CHECK(pre.size() >= 1);
  CHECK(pre.size() <= 2);
  // every preimage of a point is finite and exact at double depth
  for (PointId target : {0, 3, 7}) {
    auto certified = map_preimage(x, big, {target}, y);
    for (PointId p = 0; p < x.ensure_blocks(40); ++p)
      if (big.at(p) == target)
        CHECK(std::find(certified.begin(), certified.end(), p) != certified.end());
  }
}

TEST_CASE("extend_value_map_proper over an infinite A") {
  const Space x = Space::naturals(1);
  const SporadicSet t(Rat(2), Rat(1));
  // f(a) = 2^(a/2) on evens, witnessed per ambient block
  RealFunction f;
  f.at = [t](PointId a) { return t.ladder(a / 2); };
  f.witness = ProperWitness::from([t](int k) { return t.ladder(k / 2); }, "2^(k/2)");
  RealFunction big = extend_value_map_proper(x, Subset::evens(), f, t, Rat(2));
  CHECK(big.at(4) == 4);   // restriction
  CHECK(big.at(3) == 4);   // r(3) = 4
  REQUIRE(big.witness);
  // witness is a genuine tail bound
  for (int k = 0; k < 24; ++k) {
    auto [fst, end] = x.block_span(k);
    for (PointId p = fst; p < end; ++p) CHECK(big.at(p) >= big.witness->at(k));
  }
}
