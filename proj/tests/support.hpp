#pragma once
// Shared fixtures for the unit tests: deterministic instances on the unit
// square and a tiny hand-checkable three-node layout.

#include <string>
#include <vector>

#include "ldtsp/instance.hpp"
#include "ldtsp/rng.hpp"

namespace ldtsp::testing {

inline NodeSet unit_square_nodes(int n, std::uint64_t seed,
                                 const std::string& name = "random") {
  SplitMix64 rng(seed);
  NodeSet ns;
  ns.name = name;
  ns.metric = Metric::euclid_exact;
  ns.coords.reserve(n);
  for (int id = 1; id <= n; ++id) {
    const double x = rng.next_double();
    const double y = rng.next_double();
    ns.coords.push_back({id, x, y});
  }
  return ns;
}

/// n nodes on the unit square, depot = n, masses from {0.1, ..., 1.0},
/// unladen mass gamma * sum(m). Fully determined by (n, seed, gamma).
inline Instance random_instance(int n, std::uint64_t seed, double gamma,
                                double alpha = 0.1) {
  NodeSet ns = unit_square_nodes(n, seed);
  const auto masses = generate_masses(n - 1, seed ^ 0x9E3779B9ULL);
  return make_instance(ns, n, masses, gamma, alpha);
}

/// Depot 3 at the origin, target 1 at (1,0) with m=0.2, target 2 at (0,1)
/// with m=0.5, M = 1.4 (gamma 2), alpha 0.1. Leg costs are easy to check
/// by hand: d(3,1) = d(2,3) = 1, d(1,2) = sqrt(2).
inline Instance tiny_instance() {
  NodeSet ns;
  ns.name = "tiny";
  ns.metric = Metric::euclid_exact;
  ns.coords = {{1, 1.0, 0.0}, {2, 0.0, 1.0}, {3, 0.0, 0.0}};
  return make_instance(ns, 3, {0.2, 0.5}, 2.0, 0.1);
}

} // namespace ldtsp::testing
