#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ldtsp {

enum class Metric { euclid_exact, euclid_tsplib_rounded, geo_tsplib };

struct Node {
  int id; ///< 1-based, contiguous
  double x;
  double y;
};

struct NodeSet {
  std::string name;
  Metric metric = Metric::euclid_exact;
  std::vector<Node> coords; ///< ordered by id
  int size() const { return static_cast<int>(coords.size()); }
};

/// Dense symmetric distance matrix indexed by 1-based node ids.
struct DistanceMatrix {
  int n = 0;
  std::vector<double> d; ///< row-major, n*n

  double operator()(int i, int j) const { return d[(i - 1) * n + (j - 1)]; }
  double& at(int i, int j) { return d[(i - 1) * n + (j - 1)]; }
};

/// A delivery instance: geometry plus per-target package masses, the
/// unladen vehicle mass M and the cost scale alpha. The vehicle departs
/// the depot at mass M + sum(m_t) and sheds m_t at each target.
struct Instance {
  NodeSet nodes;
  int depot = 0;              ///< 1-based id
  std::vector<double> masses; ///< size N, indexed by id-1; depot slot is 0
  double unladen = 0.0;       ///< M
  double alpha = 0.1;
  std::optional<double> gamma; ///< set iff M was derived as gamma * sum(m_t)
  DistanceMatrix dist;

  int size() const { return nodes.size(); }
  int n_targets() const { return nodes.size() - 1; }
  double mass_of(int id) const { return masses[id - 1]; }
  double total_mass() const; ///< sum of package masses
  double depot_mass() const { return unladen + total_mass(); }
  std::vector<int> targets() const; ///< non-depot ids, ascending
};

/// Parses a TSPLIB-style document with EDGE_WEIGHT_TYPE EUC_2D or GEO.
/// EUC_2D maps to Metric::euclid_exact (unrounded distances); pass the
/// result through a metric override for the TSPLIB rounding convention.
/// Throws std::runtime_error with a line reference on malformed input.
NodeSet parse_tsplib(const std::string& text);

/// Pairwise distances for the node set's metric. geo_tsplib follows the
/// TSPLIB great-circle recipe: degree.minute coordinates, PI = 3.141592,
/// radius 6378.388 km, final value truncated to an integer.
DistanceMatrix compute_distances(const NodeSet& nodes);

/// n_targets package masses drawn uniformly from {0.1, 0.2, ..., 1.0}
/// via SplitMix64(seed), one draw per target: 0.1 * (1 + next() % 10).
std::vector<double> generate_masses(int n_targets, std::uint64_t seed);

/// Builds an instance with unladen mass M = gamma * sum(masses).
/// target_masses are ordered by ascending target id and must be positive.
Instance make_instance(const NodeSet& nodes, int depot,
                       const std::vector<double>& target_masses, double gamma,
                       double alpha);

/// Same, with M given directly (gamma left unset).
Instance make_instance_unladen(const NodeSet& nodes, int depot,
                               const std::vector<double>& target_masses,
                               double unladen, double alpha);

/// Native instance file, UTF-8 text. Round-trips bit-exactly:
/// read_instance(write_instance(x)) == x for every field.
std::string write_instance(const Instance& inst);
Instance read_instance(const std::string& text);

} // namespace ldtsp
