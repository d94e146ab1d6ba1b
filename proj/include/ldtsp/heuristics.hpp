#pragma once

#include <utility>
#include <vector>

#include "ldtsp/model.hpp"

namespace ldtsp {

/// Greedy construction: starting at the depot, repeatedly visit the
/// nearest unvisited target; distance ties go to the smaller node id.
std::vector<int> nearest_neighbor(const Instance& inst);

/// First-improvement 2-opt on the closed tour's plain distance (the
/// symmetric objective that segment reversal preserves). Scans i
/// ascending then j ascending, restarts after every applied move, stops
/// at local optimality.
std::vector<int> two_opt(const Instance& inst, std::vector<int> order);

/// Primal bound for the solver: 2-opt from nearest-neighbor, then the
/// cheaper of the two orientations under the load-dependent objective.
std::pair<Tour, double> warm_start(const Instance& inst);

} // namespace ldtsp
