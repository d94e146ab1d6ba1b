#pragma once

#include <vector>

#include "ldtsp/model.hpp"

namespace ldtsp {

struct OracleResult {
  Tour tour;
  double cost = 0.0;
};

/// Exhaustive search over every target permutation, in lexicographic
/// order; the first optimum encountered wins ties. Intended for
/// n_targets <= 10 (10! = 3.6M orders).
OracleResult brute_force(const Instance& inst);

/// Dynamic program over (visited subset, last target) states. The mass
/// departing a node depends only on the set of targets already served,
/// so the load-dependent objective fits the classic recurrence.
/// O(2^n n^2) time, O(2^n n) memory; intended for n_targets <= 20.
OracleResult held_karp(const Instance& inst);

/// True iff target_sequence is a permutation of the targets and its
/// load-dependent cost matches `cost` within tol.
bool verify_solution(const Instance& inst, const std::vector<int>& target_sequence,
                     double cost, double tol = 1e-9);

} // namespace ldtsp
