#pragma once

#include <utility>
#include <vector>

#include "ldtsp/model.hpp"

namespace ldtsp {

/// Linear program in bounded form:
///
///   min  obj' x   s.t.   row_lb <= A x <= row_ub,  col_lb <= x <= col_ub
///
/// Columns are stored sparsely; rows may be appended (cutting planes) and
/// column bounds tightened (branching) between solves. Equalities have
/// row_lb == row_ub; one-sided rows use +/- infinity.
struct LpProblem {
  std::vector<double> obj;
  std::vector<double> col_lb, col_ub;
  std::vector<double> row_lb, row_ub;
  std::vector<std::vector<std::pair<int, double>>> cols; ///< (row, value) per column

  int n_cols() const { return static_cast<int>(obj.size()); }
  int n_rows() const { return static_cast<int>(row_lb.size()); }

  void set_col_bounds(int col, double lb, double ub);
  /// Appends a row given as (column, value) pairs; returns its index.
  int append_row(const std::vector<std::pair<int, double>>& terms, double lb, double ub);
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

/// Simplex basis snapshot: a status per structural column and per row
/// slack. Re-solving from a parent's basis after a bound change or an
/// appended row (whose slack enters basic) converges in few iterations.
enum class VarStatus : unsigned char { basic, at_lower, at_upper };

struct Basis {
  std::vector<VarStatus> col_status;
  std::vector<VarStatus> row_status;
  bool empty() const { return col_status.empty(); }
};

struct LpResult {
  LpStatus status = LpStatus::iteration_limit;
  double objective = 0.0;
  std::vector<double> x;             ///< structural values
  std::vector<double> row_activity;  ///< A x
  std::vector<double> duals;         ///< row multipliers y
  std::vector<double> reduced_costs; ///< obj - A' y
  Basis basis;
  int iterations = 0;
};

struct LpConfig {
  double tol = 1e-7; ///< feasibility and optimality tolerance (rows scaled to max |a| = 1)
  int max_iterations = 0; ///< 0 = 200 * (rows + cols)
};

/// LP relaxation of a MILP model: integrality dropped, columns in model
/// variable order (so column k corresponds to model.vars[k]).
LpProblem relax(const LinearModel& model);

/// Converts a model constraint to (column, value) terms of the given model.
std::vector<std::pair<int, double>> row_terms(const LinearModel& model,
                                              const LinearConstraint& c);

/// Bounded-variable primal simplex (revised, product-form inverse over a
/// sparse basis factorization). Composite phase 1 drives out-of-bound
/// basic variables to feasibility, phase 2 optimizes. Largest-coefficient
/// pricing with Bland's rule after a run of degenerate steps.
LpResult solve_lp(const LpProblem& lp, const LpConfig& cfg = {});

/// Warm start from a previous basis (of this problem or of a problem with
/// fewer rows; missing row statuses default to basic slacks).
LpResult solve_lp(const LpProblem& lp, const LpConfig& cfg, const Basis& warm);

/// Largest KKT violation of a claimed optimal result: primal bounds and
/// rows, dual consistency (reduced_costs == obj - A' duals), and the
/// complementary sign conditions. Small values certify optimality
/// independently of the solver's pivoting path.
double kkt_violation(const LpProblem& lp, const LpResult& res);

} // namespace ldtsp
