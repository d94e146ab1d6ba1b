#include "ldtsp/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ldtsp {

OracleResult brute_force(const Instance& inst) {
  if (inst.n_targets() > 10)
    throw std::invalid_argument("brute_force: limited to 10 targets");
  std::vector<int> order = inst.targets();
  std::vector<int> best_order;
  double best = std::numeric_limits<double>::infinity();
  do {
    const auto [tour, cost] = evaluate_tour(inst, order);
    if (cost < best) {
      best = cost;
      best_order = order;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  auto [tour, cost] = evaluate_tour(inst, best_order);
  return {std::move(tour), cost};
}

OracleResult held_karp(const Instance& inst) {
  const auto targets = inst.targets();
  const int n = static_cast<int>(targets.size());
  if (n > 20) throw std::invalid_argument("held_karp: limited to 20 targets");
  const int depot = inst.depot;
  const std::uint32_t full = (n >= 32) ? 0u : ((1u << n) - 1u);
  const double inf = std::numeric_limits<double>::infinity();

  // depart[S]: vehicle mass after serving exactly the targets in S.
  std::vector<double> depart(std::size_t{1} << n);
  depart[0] = inst.depot_mass();
  for (std::uint32_t s = 1; s <= full; ++s) {
    const int low = std::countr_zero(s);
    depart[s] = depart[s & (s - 1)] - inst.mass_of(targets[low]);
  }

  // dp[S][k]: cheapest way to serve S ending at target k (bit k in S).
  std::vector<double> dp((std::size_t{1} << n) * n, inf);
  std::vector<std::uint8_t> parent((std::size_t{1} << n) * n, 255);
  for (int k = 0; k < n; ++k)
    dp[(std::size_t{1u << k}) * n + k] =
        inst.alpha * inst.depot_mass() * inst.dist(depot, targets[k]);

  for (std::uint32_t s = 1; s <= full; ++s) {
    for (int j = 0; j < n; ++j) {
      if (!(s & (1u << j))) continue;
      const double base = dp[std::size_t{s} * n + j];
      if (base == inf) continue;
      const double mass = depart[s];
      for (int k = 0; k < n; ++k) {
        if (s & (1u << k)) continue;
        const std::uint32_t s2 = s | (1u << k);
        const double cand =
            base + inst.alpha * mass * inst.dist(targets[j], targets[k]);
        double& slot = dp[std::size_t{s2} * n + k];
        if (cand < slot) {
          slot = cand;
          parent[std::size_t{s2} * n + k] = static_cast<std::uint8_t>(j);
        }
      }
    }
  }

  int last = -1;
  double best = inf;
  for (int k = 0; k < n; ++k) {
    const double cand = dp[std::size_t{full} * n + k] +
                        inst.alpha * inst.unladen * inst.dist(targets[k], depot);
    if (cand < best) {
      best = cand;
      last = k;
    }
  }

  std::vector<int> order(n);
  std::uint32_t s = full;
  for (int pos = n - 1; pos >= 0; --pos) {
    order[pos] = targets[last];
    const int prev = parent[std::size_t{s} * n + last];
    s &= ~(1u << last);
    last = prev;
  }
  auto [tour, cost] = evaluate_tour(inst, order);
  return {std::move(tour), cost};
}

bool verify_solution(const Instance& inst, const std::vector<int>& target_sequence,
                     double cost, double tol) {
  try {
    const auto [tour, actual] = evaluate_tour(inst, target_sequence);
    return std::fabs(actual - cost) <= tol;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

} // namespace ldtsp
