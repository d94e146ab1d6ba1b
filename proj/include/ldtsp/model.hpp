#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ldtsp/instance.hpp"

namespace ldtsp {

/// Variable kinds of the routing formulations:
///  - edge_use:    binary x_ij, edge (i,j) traversed
///  - depart_mass: continuous zeta_ij = (mass leaving i) * x_ij
///  - arrive_mass: continuous eta_ij  = (mass after the drop at j) * x_ij
///  - node_mass:   continuous M_i, vehicle mass after the drop at i
/// Edge kinds always have i != j; node_mass appears only in the MINLP.
enum class VarKind : std::uint8_t { edge_use, depart_mass, arrive_mass, node_mass };

struct VarId {
  VarKind kind = VarKind::edge_use;
  int i = 0; ///< tail node id (or the node, for node_mass)
  int j = 0; ///< head node id; 0 for node_mass
  auto operator<=>(const VarId&) const = default;
};

struct LinearTerm {
  VarId var;
  double coeff;
};

enum class Sense : std::uint8_t { le, eq, ge };

struct LinearConstraint {
  std::string tag; ///< provenance label, e.g. "degree-out", "mass-drop", "dfj"
  std::vector<LinearTerm> terms;
  Sense sense = Sense::eq;
  double rhs = 0.0;
};

struct VarDecl {
  VarId id;
  double lb;
  double ub;
  bool integral;
};

/// One bilinear objective term coeff * a * b.
struct QuadTerm {
  VarId a;
  VarId b;
  double coeff;
};

/// Solver-agnostic model IR, minimization sense. quad_objective is empty
/// for the MILP variants and carries the mass-times-edge products for the
/// MINLP (which is export-only).
struct LinearModel {
  std::vector<VarDecl> vars;
  std::vector<LinearConstraint> constraints;
  std::vector<LinearTerm> objective;
  std::vector<QuadTerm> quad_objective;

  std::map<VarId, int> index; ///< VarId -> position in vars
  int index_of(const VarId& v) const;
  void rebuild_index();
};

enum class ModelVariant { core_milp, baseline1_milp, baseline2_milp_dfj, minlp };

/// Depot-rooted tour. sequence = depot, targets..., depot (N+1 entries);
/// masses[k] is the mass departing sequence[k] (the final entry repeats
/// the unladen mass M, the arrival mass at the depot).
struct Tour {
  std::vector<int> sequence;
  std::vector<double> masses;
};

/// Builds the MILP over binary x and continuous zeta/eta edge variables.
/// baseline1 appends the per-edge linking rows that are redundant at
/// integrality; baseline2 builds the same rows and is solved with lazy
/// subtour separation (cuts are not part of the built model).
LinearModel build_milp(const Instance& inst, ModelVariant variant);

/// The bilinear-objective origin formulation over x and node masses M_i.
/// Export-only; the mass-drop rows linearize the absolute value as two
/// inequalities.
LinearModel build_minlp(const Instance& inst);

/// Subtour cut: at least one selected edge must leave S. S must contain
/// the depot and be a proper nonempty subset of the nodes.
LinearConstraint dfj_cut(const std::vector<int>& subset, int n_nodes, int depot);

/// Cost of visiting the targets in the given order: the vehicle departs
/// the depot at M + sum(m_t), sheds m_t at each target, and each leg
/// costs alpha * (departure mass) * distance.
std::pair<Tour, double> evaluate_tour(const Instance& inst,
                                      const std::vector<int>& target_sequence);

/// True iff sequence is depot-rooted, returns to the depot and visits
/// every target exactly once.
bool validate_tour(const Instance& inst, const std::vector<int>& sequence);

/// The (x, zeta, eta) assignment induced by a tour: x the edge indicator,
/// zeta/eta the mass schedule on used edges, zero elsewhere.
std::map<VarId, double> induced_point(const Instance& inst, const Tour& tour);

/// Evaluates a linear constraint at a point (absent vars read as 0).
double constraint_activity(const LinearConstraint& c, const std::map<VarId, double>& point);
bool constraint_satisfied(const LinearConstraint& c, const std::map<VarId, double>& point,
                          double tol = 1e-9);

/// LP-format text (Minimize / Subject To / Bounds / Binaries / End).
/// Variables are named x_i_j, z_i_j, e_i_j, M_i; rows are named after
/// their tag. Output is byte-deterministic for identical models.
std::string export_lp(const LinearModel& model);

/// Fixed-field MPS text (columns 2-3, 5-12, 15-22, 25-36, 40-47, 50-61;
/// values printed with 6 significant digits to fit the 12-char fields).
/// Bilinear objectives emit a QMATRIX section with both symmetric entries,
/// read as one half of x'Qx.
std::string export_mps(const LinearModel& model, const std::string& name);

} // namespace ldtsp
