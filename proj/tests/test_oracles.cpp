#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ldtsp/oracles.hpp"
#include "ldtsp/rng.hpp"
#include "support.hpp"

using namespace ldtsp;

TEST_CASE("brute force on the hand-checked pair") {
  Instance inst = testing::tiny_instance();
  OracleResult r = brute_force(inst);
  // Dropping the heavier package first wins: depot,2,1,depot.
  CHECK(r.tour.sequence == std::vector<int>{3, 2, 1, 3});
  CHECK(r.cost == doctest::Approx(0.35 + 0.16 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("exhaustive search and the subset DP agree") {
  for (int n = 2; n <= 8; ++n) {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      for (double gamma : {0.0, 2.0, 10.0}) {
        Instance inst = testing::random_instance(n + 1, seed * 100 + n, gamma);
        OracleResult bf = brute_force(inst);
        OracleResult hk = held_karp(inst);
        CHECK(hk.cost == doctest::Approx(bf.cost).epsilon(1e-12));
        CHECK(validate_tour(inst, bf.tour.sequence));
        CHECK(validate_tour(inst, hk.tour.sequence));
        // Both certify against the direct evaluator.
        std::vector<int> hk_targets(hk.tour.sequence.begin() + 1,
                                    hk.tour.sequence.end() - 1);
        CHECK(verify_solution(inst, hk_targets, hk.cost, 1e-9));
      }
    }
  }
}

TEST_CASE("single-target instance") {
  NodeSet ns = testing::unit_square_nodes(2, 5);
  Instance inst = make_instance(ns, 2, {0.4}, 3.0, 0.1);
  OracleResult bf = brute_force(inst);
  OracleResult hk = held_karp(inst);
  const double d = inst.dist(2, 1);
  const double expected = 0.1 * (inst.depot_mass() * d + inst.unladen * d);
  CHECK(bf.cost == doctest::Approx(expected).epsilon(1e-14));
  CHECK(hk.cost == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("orientation gap follows the closed form") {
  // For two targets: cost(1,2) - cost(2,1)
  //   = alpha * (Mbar * (d(D,1) - d(D,2)) + (m2 - m1) * d(1,2)).
  SplitMix64 rng(31337);
  for (int trial = 0; trial < 20; ++trial) {
    NodeSet ns = testing::unit_square_nodes(3, rng.next());
    const double m1 = 0.1 * (1 + rng.next_below(10));
    const double m2 = 0.1 * (1 + rng.next_below(10));
    Instance inst = make_instance(ns, 3, {m1, m2}, 2.0 + 3.0 * rng.next_double(), 0.1);
    const auto [t12, c12] = evaluate_tour(inst, {1, 2});
    const auto [t21, c21] = evaluate_tour(inst, {2, 1});
    const double mbar = inst.total_mass();
    const double expected = inst.alpha * (mbar * (inst.dist(3, 1) - inst.dist(3, 2)) +
                                          (m2 - m1) * inst.dist(1, 2));
    CHECK(c12 - c21 == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("hazmat mode makes the return leg free") {
  NodeSet ns = testing::unit_square_nodes(4, 77);
  Instance inst = make_instance(ns, 4, {0.3, 0.6, 0.2}, 0.0, 0.1);
  CHECK(inst.unladen == 0.0);
  auto [tour, cost] = evaluate_tour(inst, {1, 2, 3});
  double manual = 0.1 * (inst.depot_mass() * inst.dist(4, 1) +
                         (inst.depot_mass() - 0.3) * inst.dist(1, 2) +
                         0.2 * inst.dist(2, 3));
  CHECK(cost == doctest::Approx(manual).epsilon(1e-14));
  CHECK(tour.masses.back() == 0.0);

  OracleResult bf = brute_force(inst);
  OracleResult hk = held_karp(inst);
  CHECK(hk.cost == doctest::Approx(bf.cost).epsilon(1e-12));
}

TEST_CASE("verify_solution accepts and rejects") {
  Instance inst = testing::tiny_instance();
  auto [tour, cost] = evaluate_tour(inst, {2, 1});
  CHECK(verify_solution(inst, {2, 1}, cost));
  CHECK(!verify_solution(inst, {2, 1}, cost + 1e-6));
  CHECK(!verify_solution(inst, {1, 2}, cost));
  CHECK(!verify_solution(inst, {1, 1}, cost));
  CHECK(!verify_solution(inst, {1}, cost));
}

TEST_CASE("oracles are deterministic") {
  Instance inst = testing::random_instance(7, 404, 5.0);
  OracleResult a = brute_force(inst);
  OracleResult b = brute_force(inst);
  CHECK(a.tour.sequence == b.tour.sequence);
  CHECK(a.cost == b.cost);
  OracleResult c = held_karp(inst);
  OracleResult d = held_karp(inst);
  CHECK(c.tour.sequence == d.tour.sequence);
  CHECK(c.cost == d.cost);
}
