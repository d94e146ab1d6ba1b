#include "ldtsp/heuristics.hpp"

#include <algorithm>
#include <stdexcept>

namespace ldtsp {

std::vector<int> nearest_neighbor(const Instance& inst) {
  std::vector<int> remaining = inst.targets();
  std::vector<int> order;
  order.reserve(remaining.size());
  int at = inst.depot;
  while (!remaining.empty()) {
    std::size_t pick = 0;
    for (std::size_t k = 1; k < remaining.size(); ++k)
      if (inst.dist(at, remaining[k]) < inst.dist(at, remaining[pick])) pick = k;
    at = remaining[pick]; // ids ascend, so the first minimum is the smallest id
    order.push_back(at);
    remaining.erase(remaining.begin() + pick);
  }
  return order;
}

std::vector<int> two_opt(const Instance& inst, std::vector<int> order) {
  const int n = static_cast<int>(order.size());
  if (n != inst.n_targets()) throw std::invalid_argument("two_opt: bad order length");
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 0; i < n - 1 && !improved; ++i) {
      const int prev = (i == 0) ? inst.depot : order[i - 1];
      for (int j = i + 1; j < n; ++j) {
        const int next = (j == n - 1) ? inst.depot : order[j + 1];
        const double delta = inst.dist(prev, order[j]) + inst.dist(order[i], next) -
                             inst.dist(prev, order[i]) - inst.dist(order[j], next);
        if (delta < -1e-12) {
          std::reverse(order.begin() + i, order.begin() + j + 1);
          improved = true;
          break;
        }
      }
    }
  }
  return order;
}

std::pair<Tour, double> warm_start(const Instance& inst) {
  std::vector<int> order = two_opt(inst, nearest_neighbor(inst));
  auto forward = evaluate_tour(inst, order);
  std::vector<int> rev(order.rbegin(), order.rend());
  auto backward = evaluate_tour(inst, rev);
  return (backward.second < forward.second) ? std::move(backward) : std::move(forward);
}

} // namespace ldtsp
