#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ldtsp/model.hpp"

namespace ldtsp {

enum class SolveStatus {
  optimal,            ///< proven within gap_tolerance
  limit_feasible,     ///< stopped at a limit with an incumbent in hand
  limit_no_incumbent, ///< stopped at a limit before any feasible solution
  infeasible          ///< root relaxation infeasible (malformed instance)
};

struct SolveConfig {
  ModelVariant variant = ModelVariant::core_milp;
  double time_limit_s = 600.0;
  double gap_tolerance = 1e-6; ///< relative; search stops at this gap
  double integrality_tol = 1e-6;
  std::int64_t node_limit = 0; ///< 0 = unlimited
  bool use_warm_start = true;  ///< seed the incumbent with a 2-opt tour
  /// Progress lines "t=<sec> nodes=<k> bound=<v> incumbent=<v> gap=<pct>".
  std::function<void(const std::string&)> event_sink;
  bool suppress_event_time = false; ///< write t=0.000 (reproducible logs)
};

struct SolveReport {
  SolveStatus status = SolveStatus::limit_no_incumbent;
  std::optional<Tour> incumbent;
  double incumbent_cost = 0.0; ///< meaningful iff incumbent is set
  double best_bound = 0.0;
  double gap_pct = 0.0;
  std::int64_t nodes = 0;    ///< branch-and-bound nodes solved
  int cuts = 0;              ///< subtour cuts added (baseline2)
  std::int64_t lp_iterations = 0;
  double wall_s = 0.0;
};

/// 100 * (incumbent - bound) / incumbent, the reported optimality gap.
double gap_percent(double incumbent, double bound);

/// Exact branch-and-bound over the chosen MILP variant: best-bound node
/// selection with a depth-first dive every 10th node, most-fractional
/// branching (ties to the lexicographically smallest edge), warm-started
/// simplex re-solves, and for baseline2 lazily separated subtour cuts
/// shared across the tree.
SolveReport solve(const Instance& inst, const SolveConfig& cfg = {});

/// Subtour separation for an edge-use vector x (dense, (i-1)*N + (j-1)).
/// Runs one depot-to-target max flow per target; every cut below
/// 1 - tol yields the depot-side set of the minimum cut. Returned sets
/// are ascending and unique within the call.
std::vector<std::vector<int>> separate_dfj(int n_nodes, int depot,
                                           const std::vector<double>& edge_x,
                                           double tol = 1e-6);

struct AStarReport {
  Tour tour;
  double cost = 0.0;
  std::int64_t expanded = 0; ///< states popped
};

/// A* over (visited subset, last node) with the admissible, consistent
/// bound alpha * M * mst({last} + unvisited + depot). States are deduped
/// by best known cost. Exact; intended for n_targets <= 15.
AStarReport astar_search(const Instance& inst);

/// The heuristic's spanning-tree term: alpha * M * (MST length of the
/// given nodes under the instance metric).
double mst_bound(const Instance& inst, const std::vector<int>& nodes);

} // namespace ldtsp
