#include "ldtsp/lp.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ldtsp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kZeroTol = 1e-11;
constexpr double kHarrisSlack = 1e-8;
} // namespace

void LpProblem::set_col_bounds(int col, double lb, double ub) {
  if (col < 0 || col >= n_cols()) throw std::out_of_range("lp: column index out of range");
  if (lb > ub) throw std::invalid_argument("lp: crossing column bounds");
  col_lb[col] = lb;
  col_ub[col] = ub;
}

int LpProblem::append_row(const std::vector<std::pair<int, double>>& terms, double lb,
                          double ub) {
  if (lb > ub) throw std::invalid_argument("lp: crossing row bounds");
  const int r = n_rows();
  row_lb.push_back(lb);
  row_ub.push_back(ub);
  for (const auto& [c, v] : terms) {
    if (c < 0 || c >= n_cols()) throw std::out_of_range("lp: row term column out of range");
    if (v != 0.0) cols[c].emplace_back(r, v);
  }
  return r;
}

std::vector<std::pair<int, double>> row_terms(const LinearModel& model,
                                              const LinearConstraint& c) {
  std::vector<std::pair<int, double>> terms;
  terms.reserve(c.terms.size());
  for (const auto& t : c.terms) terms.emplace_back(model.index_of(t.var), t.coeff);
  std::sort(terms.begin(), terms.end());
  // Merge duplicate columns so each appears once in the matrix.
  std::vector<std::pair<int, double>> merged;
  for (const auto& [col, v] : terms) {
    if (!merged.empty() && merged.back().first == col)
      merged.back().second += v;
    else
      merged.emplace_back(col, v);
  }
  return merged;
}

LpProblem relax(const LinearModel& model) {
  LpProblem lp;
  const int nc = static_cast<int>(model.vars.size());
  lp.obj.assign(nc, 0.0);
  lp.col_lb.resize(nc);
  lp.col_ub.resize(nc);
  lp.cols.resize(nc);
  for (int k = 0; k < nc; ++k) {
    lp.col_lb[k] = model.vars[k].lb;
    lp.col_ub[k] = model.vars[k].ub;
  }
  for (const auto& t : model.objective) lp.obj[model.index_of(t.var)] += t.coeff;
  for (const auto& c : model.constraints) {
    double lb = -kInf, ub = kInf;
    switch (c.sense) {
    case Sense::le: ub = c.rhs; break;
    case Sense::ge: lb = c.rhs; break;
    case Sense::eq: lb = ub = c.rhs; break;
    }
    lp.append_row(row_terms(model, c), lb, ub);
  }
  return lp;
}

// ---------------------------------------------------------------------------
// Revised primal simplex with bounded variables.
//
// The working system is [A | -I] (x; s) = 0 with s the row-activity slacks,
// so the right-hand side is always zero and every row bound lives on a
// slack. The basis inverse is kept as a sparse LU factorization of the
// basis matrix plus a product-form eta list, refactorized periodically.
// ---------------------------------------------------------------------------
namespace {

class Simplex {
public:
  Simplex(const LpProblem& lp, const LpConfig& cfg) : lp_(lp) {
    m_ = lp.n_rows();
    n_ = lp.n_cols();
    nt_ = n_ + m_;
    tol_ = cfg.tol;
    max_iters_ = cfg.max_iterations > 0 ? cfg.max_iterations : 200 * (m_ + n_ + 1);

    // Row equilibration: scale every row to max |a_ij| = 1.
    rscale_.assign(m_, 1.0);
    for (int j = 0; j < n_; ++j)
      for (const auto& [r, v] : lp.cols[j])
        rscale_[r] = std::max(rscale_[r], std::fabs(v));
    for (double& s : rscale_) s = 1.0 / s;

    acols_.resize(n_);
    for (int j = 0; j < n_; ++j) {
      acols_[j].reserve(lp.cols[j].size());
      for (const auto& [r, v] : lp.cols[j]) acols_[j].emplace_back(r, v * rscale_[r]);
    }

    lb_.resize(nt_);
    ub_.resize(nt_);
    cost_.assign(nt_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lb_[j] = lp.col_lb[j];
      ub_[j] = lp.col_ub[j];
      cost_[j] = lp.obj[j];
    }
    for (int i = 0; i < m_; ++i) {
      lb_[n_ + i] = lp.row_lb[i] * rscale_[i];
      ub_[n_ + i] = lp.row_ub[i] * rscale_[i];
    }

    stat_.assign(nt_, VarStatus::at_lower);
    x_.assign(nt_, 0.0);
    w_ = Eigen::VectorXd::Zero(m_);
    y_ = Eigen::VectorXd::Zero(m_);
    rhs_ = Eigen::VectorXd::Zero(m_);
  }

  LpResult run(const Basis* warm) {
    LpResult res;
    if (m_ == 0) return solve_unconstrained();

    load_basis(warm);
    if (!factorize()) {
      reset_slack_basis();
      if (!factorize()) throw std::runtime_error("lp: slack basis factorization failed");
    }
    set_nonbasic_values();
    compute_basic_values();

    int iters = 0;
    bool phase1 = true;
    int degenerate_run = 0;
    int slack_restarts = 0;
    LpStatus status = LpStatus::iteration_limit;

    // Last-resort repair after a failed refactorization: the accumulated
    // basis went numerically singular, which the diagonal slack basis
    // cannot. Restarting loses the current vertex but keeps the solve
    // self-contained; two strikes and the caller gets iteration_limit.
    const auto restart_from_slack = [&]() -> bool {
      if (++slack_restarts > 2) return false;
      reset_slack_basis();
      if (!factorize()) throw std::runtime_error("lp: slack basis factorization failed");
      set_nonbasic_values();
      compute_basic_values();
      phase1 = true;
      degenerate_run = 0;
      return true;
    };

    while (iters < max_iters_) {
      if (phase1 && infeasibility() <= tol_) phase1 = false;

      // Pricing costs: real objective in phase 2; in phase 1 a +/-1 cost
      // on each out-of-bounds basic variable (direction of its violation).
      Eigen::VectorXd cb = Eigen::VectorXd::Zero(m_);
      for (int p = 0; p < m_; ++p) {
        const int v = basic_[p];
        if (phase1) {
          if (x_[v] < lb_[v] - tol_)
            cb[p] = -1.0;
          else if (x_[v] > ub_[v] + tol_)
            cb[p] = 1.0;
        } else {
          cb[p] = cost_[v];
        }
      }
      y_ = cb;
      btran(y_);

      const bool bland = degenerate_run > 3 * (m_ + 1);
      int q = -1;
      int dir = 0;
      double best = tol_;
      for (int v = 0; v < nt_; ++v) {
        if (stat_[v] == VarStatus::basic) continue;
        if (ub_[v] - lb_[v] <= 0.0) continue; // fixed, cannot move
        const double d = (phase1 ? 0.0 : cost_[v]) - dot_col(v, y_);
        int s = 0;
        if (stat_[v] == VarStatus::at_lower && d < -tol_)
          s = 1;
        else if (stat_[v] == VarStatus::at_upper && d > tol_)
          s = -1;
        if (s == 0) continue;
        if (bland) {
          q = v;
          dir = s;
          break;
        }
        if (std::fabs(d) > best) {
          best = std::fabs(d);
          q = v;
          dir = s;
        }
      }
      if (q < 0) {
        if (phase1) {
          status = infeasibility() <= tol_ ? LpStatus::optimal : LpStatus::infeasible;
          if (status == LpStatus::optimal) {
            phase1 = false;
            continue; // feasible: rerun pricing with the real costs
          }
        } else {
          status = LpStatus::optimal;
        }
        break;
      }

      // FTRAN: direction of the basic variables when q moves.
      scatter_col(q, w_);
      ftran(w_);

      // Ratio test. Basic k changes at rate g = -dir * w[p]; in phase 1 an
      // out-of-bounds variable blocks when it reaches the bound it
      // violates (turning feasible), otherwise the usual nearest bound.
      // Two-pass Harris scheme: pass 1 finds the smallest step at which
      // every blocker stays within a small slack of its bound, pass 2
      // picks the admissible row with the largest pivot magnitude. The
      // slack trades a bounded feasibility drift for a well-conditioned
      // basis; leaving variables snap exactly onto their bound, so drift
      // does not accumulate across pivots. Rows with pivots below
      // kPivotTol never leave the basis at all: pivoting on noise wrecks
      // the factorization. Under Bland's rule the slack is dropped and
      // ties break on the smallest basic variable index so the
      // anti-cycling argument stays intact.
      rt_.clear();
      double t_room = kInf;
      bool gray_blocker = false;
      for (int p = 0; p < m_; ++p) {
        if (std::fabs(w_[p]) < kZeroTol) continue;
        const int v = basic_[p];
        const double g = -dir * w_[p];
        double cand;
        bool hit_upper = false;
        if (phase1 && x_[v] < lb_[v] - tol_) {
          if (g > 0.0) cand = (lb_[v] - x_[v]) / g;
          else continue;
        } else if (phase1 && x_[v] > ub_[v] + tol_) {
          if (g < 0.0) {
            cand = (ub_[v] - x_[v]) / g;
            hit_upper = true;
          } else {
            continue;
          }
        } else if (g > 0.0) {
          if (ub_[v] >= kInf) continue;
          cand = (ub_[v] - x_[v]) / g;
          hit_upper = true;
        } else {
          if (lb_[v] <= -kInf) continue;
          cand = (lb_[v] - x_[v]) / g;
        }
        if (std::fabs(w_[p]) < kPivotTol) {
          gray_blocker = true;
          continue;
        }
        rt_.push_back({p, cand, hit_upper});
        const double relaxed = bland ? cand : cand + kHarrisSlack / std::fabs(g);
        t_room = std::min(t_room, relaxed);
      }
      double t_limit = kInf;
      int leave = -1;
      bool leave_upper = false;
      for (const auto& c : rt_) {
        if (c.t > t_room) continue;
        if (leave < 0 || (bland ? basic_[c.p] < basic_[leave]
                                : std::fabs(w_[c.p]) > std::fabs(w_[leave]))) {
          leave = c.p;
          t_limit = c.t;
          leave_upper = c.upper;
        }
      }
      if (leave >= 0) t_limit = std::max(t_limit, 0.0);

      const double flip = (lb_[q] > -kInf && ub_[q] < kInf) ? ub_[q] - lb_[q] : kInf;
      ++iters;
      if (t_limit >= kInf && flip >= kInf) {
        if (gray_blocker) {
          // Only noise-level coefficients block this ray. Recompute them
          // from a fresh factorization before trusting the conclusion.
          if (!etas_.empty()) {
            if (!refresh() && !restart_from_slack()) {
              status = LpStatus::iteration_limit;
              break;
            }
            --iters;
            continue;
          }
          status = LpStatus::iteration_limit;
          break;
        }
        status = phase1 ? LpStatus::infeasible : LpStatus::unbounded;
        break;
      }
      if (flip <= t_limit) {
        apply_step(q, dir, flip);
        stat_[q] = (stat_[q] == VarStatus::at_lower) ? VarStatus::at_upper
                                                     : VarStatus::at_lower;
        x_[q] = (stat_[q] == VarStatus::at_lower) ? lb_[q] : ub_[q];
        degenerate_run = 0;
        continue;
      }

      degenerate_run = (t_limit <= 1e-10) ? degenerate_run + 1 : 0;
      apply_step(q, dir, t_limit);
      const int out = basic_[leave];
      stat_[out] = leave_upper ? VarStatus::at_upper : VarStatus::at_lower;
      x_[out] = leave_upper ? ub_[out] : lb_[out];
      basic_[leave] = q;
      stat_[q] = VarStatus::basic;
      etas_.push_back({leave, w_});
      if (static_cast<int>(etas_.size()) >= 120) {
        if (!refresh() && !restart_from_slack()) {
          status = LpStatus::iteration_limit;
          break;
        }
      }
    }

    return extract(status, iters);
  }

private:
  const LpProblem& lp_;
  int m_, n_, nt_;
  double tol_;
  int max_iters_;
  std::vector<std::vector<std::pair<int, double>>> acols_;
  std::vector<double> rscale_, lb_, ub_, cost_;
  std::vector<int> basic_;
  std::vector<VarStatus> stat_;
  std::vector<double> x_;
  Eigen::SparseMatrix<double> bmat_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  struct Eta {
    int r;
    Eigen::VectorXd w;
  };
  std::vector<Eta> etas_;
  struct Ratio {
    int p;
    double t;
    bool upper;
  };
  std::vector<Ratio> rt_;
  bool factor_ok_ = false;
  Eigen::VectorXd w_, y_, rhs_, tmp_;

  double dot_col(int v, const Eigen::VectorXd& y) const {
    if (v >= n_) return -y[v - n_];
    double d = 0.0;
    for (const auto& [r, a] : acols_[v]) d += a * y[r];
    return d;
  }

  void scatter_col(int v, Eigen::VectorXd& out) const {
    out.setZero();
    if (v >= n_) {
      out[v - n_] = -1.0;
      return;
    }
    for (const auto& [r, a] : acols_[v]) out[r] = a;
  }

  void ftran(Eigen::VectorXd& v) {
    tmp_ = lu_.solve(v);
    v.swap(tmp_);
    for (const auto& e : etas_) {
      const double p = v[e.r] / e.w[e.r];
      if (p != 0.0) v -= p * e.w;
      v[e.r] = p;
    }
  }

  void btran(Eigen::VectorXd& v) {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      const double dot = it->w.dot(v);
      v[it->r] = (v[it->r] - (dot - it->w[it->r] * v[it->r])) / it->w[it->r];
    }
    tmp_ = lu_.transpose().solve(v);
    v.swap(tmp_);
  }

  void reset_slack_basis() {
    basic_.resize(m_);
    for (int v = 0; v < nt_; ++v) stat_[v] = VarStatus::at_lower;
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      stat_[n_ + i] = VarStatus::basic;
    }
  }

  void load_basis(const Basis* warm) {
    if (!warm || warm->empty() || static_cast<int>(warm->col_status.size()) != n_ ||
        static_cast<int>(warm->row_status.size()) > m_) {
      reset_slack_basis();
      return;
    }
    for (int j = 0; j < n_; ++j) stat_[j] = warm->col_status[j];
    for (int i = 0; i < m_; ++i)
      stat_[n_ + i] = i < static_cast<int>(warm->row_status.size())
                          ? warm->row_status[i]
                          : VarStatus::basic; // slacks of rows appended since
    basic_.clear();
    for (int v = 0; v < nt_; ++v)
      if (stat_[v] == VarStatus::basic) basic_.push_back(v);
    // Repair inconsistent counts: demote surplus from the back, promote
    // nonbasic slacks to fill a shortfall.
    while (static_cast<int>(basic_.size()) > m_) {
      const int v = basic_.back();
      basic_.pop_back();
      stat_[v] = (lb_[v] > -kInf || ub_[v] >= kInf) ? VarStatus::at_lower : VarStatus::at_upper;
    }
    for (int i = 0; i < m_ && static_cast<int>(basic_.size()) < m_; ++i) {
      if (stat_[n_ + i] != VarStatus::basic) {
        stat_[n_ + i] = VarStatus::basic;
        basic_.push_back(n_ + i);
      }
    }
  }

  void set_nonbasic_values() {
    for (int v = 0; v < nt_; ++v) {
      if (stat_[v] == VarStatus::basic) continue;
      if (stat_[v] == VarStatus::at_upper && ub_[v] < kInf) {
        x_[v] = ub_[v];
      } else if (lb_[v] > -kInf) {
        stat_[v] = VarStatus::at_lower;
        x_[v] = lb_[v];
      } else if (ub_[v] < kInf) {
        stat_[v] = VarStatus::at_upper;
        x_[v] = ub_[v];
      } else {
        x_[v] = 0.0; // free nonbasic
      }
    }
  }

  bool factorize() {
    etas_.clear();
    std::vector<Eigen::Triplet<double>> trips;
    for (int p = 0; p < m_; ++p) {
      const int v = basic_[p];
      if (v >= n_) {
        trips.emplace_back(v - n_, p, -1.0);
      } else {
        for (const auto& [r, a] : acols_[v]) trips.emplace_back(r, p, a);
      }
    }
    bmat_.resize(m_, m_);
    bmat_.setFromTriplets(trips.begin(), trips.end());
    lu_.compute(bmat_);
    factor_ok_ = lu_.info() == Eigen::Success;
    return factor_ok_;
  }

  /// Refactorize the current basis and recompute basic values (also
  /// clears accumulated drift). Returns false on numerical failure.
  bool refresh() {
    if (!factorize()) return false;
    compute_basic_values();
    return true;
  }

  void compute_basic_values() {
    rhs_.setZero();
    for (int v = 0; v < nt_; ++v) {
      if (stat_[v] == VarStatus::basic || x_[v] == 0.0) continue;
      if (v >= n_) {
        rhs_[v - n_] += x_[v];
      } else {
        for (const auto& [r, a] : acols_[v]) rhs_[r] -= a * x_[v];
      }
    }
    ftran(rhs_);
    for (int p = 0; p < m_; ++p) x_[basic_[p]] = rhs_[p];
  }

  double infeasibility() const {
    double f = 0.0;
    for (int p = 0; p < m_; ++p) {
      const int v = basic_[p];
      if (x_[v] < lb_[v]) f = std::max(f, lb_[v] - x_[v]);
      if (x_[v] > ub_[v]) f = std::max(f, x_[v] - ub_[v]);
    }
    return f;
  }

  void apply_step(int q, int dir, double t) {
    if (t == 0.0) return;
    x_[q] += dir * t;
    for (int p = 0; p < m_; ++p)
      if (w_[p] != 0.0) x_[basic_[p]] -= dir * t * w_[p];
  }

  LpResult solve_unconstrained() {
    LpResult res;
    res.status = LpStatus::optimal;
    res.x.resize(n_);
    res.reduced_costs = lp_.obj;
    res.basis.col_status.assign(n_, VarStatus::at_lower);
    for (int j = 0; j < n_; ++j) {
      if (lp_.obj[j] >= 0.0) {
        if (lp_.col_lb[j] <= -kInf && lp_.obj[j] > 0.0) {
          res.status = LpStatus::unbounded;
          return res;
        }
        res.x[j] = std::max(lp_.col_lb[j], std::min(0.0, lp_.col_ub[j]));
      } else {
        if (lp_.col_ub[j] >= kInf) {
          res.status = LpStatus::unbounded;
          return res;
        }
        res.x[j] = lp_.col_ub[j];
        res.basis.col_status[j] = VarStatus::at_upper;
      }
      res.objective += lp_.obj[j] * res.x[j];
    }
    return res;
  }

  LpResult extract(LpStatus status, int iters) {
    LpResult res;
    res.status = status;
    res.iterations = iters;
    res.basis.col_status.assign(stat_.begin(), stat_.begin() + n_);
    res.basis.row_status.assign(stat_.begin() + n_, stat_.end());
    if (status != LpStatus::optimal && status != LpStatus::iteration_limit) return res;

    res.x.assign(x_.begin(), x_.begin() + n_);
    res.row_activity.resize(m_);
    for (int i = 0; i < m_; ++i) res.row_activity[i] = x_[n_ + i] / rscale_[i];
    res.objective = 0.0;
    for (int j = 0; j < n_; ++j) res.objective += lp_.obj[j] * res.x[j];

    // Final duals from the real costs (phase 2) on the final basis. A
    // dead factorization (refactorization failed right before bailing
    // out) cannot back-solve; leave the duals empty in that case.
    if (!factor_ok_) return res;
    Eigen::VectorXd cb(m_);
    for (int p = 0; p < m_; ++p) cb[p] = cost_[basic_[p]];
    btran(cb);
    res.duals.resize(m_);
    for (int i = 0; i < m_; ++i) res.duals[i] = cb[i] * rscale_[i];
    res.reduced_costs.resize(n_);
    for (int j = 0; j < n_; ++j) {
      double d = lp_.obj[j];
      for (const auto& [r, a] : lp_.cols[j]) d -= a * res.duals[r];
      res.reduced_costs[j] = d;
    }
    return res;
  }
};

} // namespace

LpResult solve_lp(const LpProblem& lp, const LpConfig& cfg) {
  Simplex s(lp, cfg);
  return s.run(nullptr);
}

LpResult solve_lp(const LpProblem& lp, const LpConfig& cfg, const Basis& warm) {
  Simplex s(lp, cfg);
  return s.run(&warm);
}

double kkt_violation(const LpProblem& lp, const LpResult& res) {
  const int n = lp.n_cols();
  const int m = lp.n_rows();
  if (static_cast<int>(res.x.size()) != n) return kInf;
  double viol = 0.0;

  for (int j = 0; j < n; ++j) {
    viol = std::max(viol, lp.col_lb[j] - res.x[j]);
    viol = std::max(viol, res.x[j] - lp.col_ub[j]);
  }

  std::vector<double> act(m, 0.0);
  for (int j = 0; j < n; ++j)
    for (const auto& [r, a] : lp.cols[j]) act[r] += a * res.x[j];
  for (int i = 0; i < m; ++i) {
    if (lp.row_lb[i] > -kInf) viol = std::max(viol, lp.row_lb[i] - act[i]);
    if (lp.row_ub[i] < kInf) viol = std::max(viol, act[i] - lp.row_ub[i]);
  }

  if (static_cast<int>(res.duals.size()) != m || static_cast<int>(res.reduced_costs.size()) != n)
    return viol > 0 ? viol : 0.0;

  // Dual consistency: reduced costs must equal obj - A' y.
  for (int j = 0; j < n; ++j) {
    double d = lp.obj[j];
    for (const auto& [r, a] : lp.cols[j]) d -= a * res.duals[r];
    viol = std::max(viol, std::fabs(d - res.reduced_costs[j]));
  }

  // Sign conditions. A variable strictly inside its bounds needs zero
  // reduced cost; at the lower bound d >= 0, at the upper d <= 0. Row
  // multipliers mirror this through the activity.
  const double gap_eps = 1e-7;
  for (int j = 0; j < n; ++j) {
    const bool at_lb = res.x[j] <= lp.col_lb[j] + gap_eps;
    const bool at_ub = res.x[j] >= lp.col_ub[j] - gap_eps;
    const double d = res.reduced_costs[j];
    if (!at_lb && !at_ub) viol = std::max(viol, std::fabs(d));
    else if (at_lb && !at_ub) viol = std::max(viol, -d);
    else if (at_ub && !at_lb) viol = std::max(viol, d);
  }
  for (int i = 0; i < m; ++i) {
    const bool at_lb = lp.row_lb[i] > -kInf && act[i] <= lp.row_lb[i] + gap_eps;
    const bool at_ub = lp.row_ub[i] < kInf && act[i] >= lp.row_ub[i] - gap_eps;
    const double y = res.duals[i];
    if (!at_lb && !at_ub) viol = std::max(viol, std::fabs(y));
    else if (at_lb && !at_ub) viol = std::max(viol, -y);
    else if (at_ub && !at_lb) viol = std::max(viol, y);
  }
  return std::max(viol, 0.0);
}

} // namespace ldtsp
