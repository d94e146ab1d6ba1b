#include "ldtsp/solver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "ldtsp/heuristics.hpp"
#include "ldtsp/lp.hpp"

namespace ldtsp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double gap_percent(double incumbent, double bound) {
  if (incumbent == bound) return 0.0;
  if (!std::isfinite(incumbent) || incumbent == 0.0) return kInf;
  return 100.0 * (incumbent - bound) / incumbent;
}

// ---------------------------------------------------------------------------
// Subtour separation
// ---------------------------------------------------------------------------

namespace {

/// Edmonds-Karp max flow on a dense capacity matrix; returns the flow
/// value and fills `cut_side` with the source side of a minimum cut.
double max_flow(std::vector<std::vector<double>> cap, int s, int t,
                std::vector<int>& cut_side) {
  const int n = static_cast<int>(cap.size());
  double flow = 0.0;
  std::vector<int> prev(n);
  for (;;) {
    std::fill(prev.begin(), prev.end(), -1);
    prev[s] = s;
    std::queue<int> bfs;
    bfs.push(s);
    while (!bfs.empty() && prev[t] < 0) {
      const int u = bfs.front();
      bfs.pop();
      for (int v = 0; v < n; ++v) {
        if (prev[v] < 0 && cap[u][v] > 1e-12) {
          prev[v] = u;
          bfs.push(v);
        }
      }
    }
    if (prev[t] < 0) break;
    double push = kInf;
    for (int v = t; v != s; v = prev[v]) push = std::min(push, cap[prev[v]][v]);
    for (int v = t; v != s; v = prev[v]) {
      cap[prev[v]][v] -= push;
      cap[v][prev[v]] += push;
    }
    flow += push;
  }
  cut_side.clear();
  for (int v = 0; v < n; ++v)
    if (prev[v] >= 0) cut_side.push_back(v);
  return flow;
}

} // namespace

std::vector<std::vector<int>> separate_dfj(int n_nodes, int depot,
                                           const std::vector<double>& edge_x,
                                           double tol) {
  if (static_cast<int>(edge_x.size()) != n_nodes * n_nodes)
    throw std::invalid_argument("separate_dfj: edge_x must be N*N");
  std::vector<std::vector<double>> cap(n_nodes, std::vector<double>(n_nodes, 0.0));
  for (int i = 0; i < n_nodes; ++i)
    for (int j = 0; j < n_nodes; ++j)
      if (i != j) cap[i][j] = std::clamp(edge_x[i * n_nodes + j], 0.0, 1.0);

  std::vector<std::vector<int>> cuts;
  std::set<std::vector<int>> seen;
  std::vector<int> side;
  for (int t = 0; t < n_nodes; ++t) {
    if (t == depot - 1) continue;
    const double flow = max_flow(cap, depot - 1, t, side);
    if (flow >= 1.0 - tol) continue;
    std::vector<int> subset;
    subset.reserve(side.size());
    for (int v : side) subset.push_back(v + 1);
    std::sort(subset.begin(), subset.end());
    if (static_cast<int>(subset.size()) >= n_nodes) continue; // numerical edge
    if (seen.insert(subset).second) cuts.push_back(std::move(subset));
  }
  return cuts;
}

// ---------------------------------------------------------------------------
// A* search
// ---------------------------------------------------------------------------

double mst_bound(const Instance& inst, const std::vector<int>& nodes) {
  const int k = static_cast<int>(nodes.size());
  if (k <= 1) return 0.0;
  std::vector<double> key(k, kInf);
  std::vector<bool> used(k, false);
  key[0] = 0.0;
  double len = 0.0;
  for (int it = 0; it < k; ++it) {
    int u = -1;
    for (int v = 0; v < k; ++v)
      if (!used[v] && (u < 0 || key[v] < key[u])) u = v;
    used[u] = true;
    len += key[u];
    for (int v = 0; v < k; ++v)
      if (!used[v]) key[v] = std::min(key[v], inst.dist(nodes[u], nodes[v]));
  }
  return inst.alpha * inst.unladen * len;
}

AStarReport astar_search(const Instance& inst) {
  const auto targets = inst.targets();
  const int n = static_cast<int>(targets.size());
  if (n > 25) throw std::invalid_argument("astar_search: limited to 25 targets");
  const std::uint32_t full = (1u << n) - 1u;
  const int kStart = n;     // "last" index for the initial depot state
  const int kGoal = n + 1;  // completed-tour pseudo state

  // depart[mask]: mass leaving the last-served target of `mask`.
  std::vector<double> depart(std::size_t{1} << n);
  depart[0] = inst.depot_mass();
  for (std::uint32_t s = 1; s <= full; ++s)
    depart[s] = depart[s & (s - 1)] - inst.mass_of(targets[std::countr_zero(s)]);

  auto key_of = [](std::uint32_t mask, int last) {
    return (static_cast<std::uint64_t>(mask) << 5) | static_cast<std::uint32_t>(last);
  };

  // The spanning-tree term depends only on {last} + unvisited + depot,
  // a node subset; cache it by that subset's bitmask (depot implied).
  std::unordered_map<std::uint32_t, double> mst_cache;
  auto heuristic = [&](std::uint32_t mask, int last) {
    if (last == kGoal) return 0.0;
    std::uint32_t subset = (~mask) & full;
    if (last != kStart) subset |= 1u << last;
    auto it = mst_cache.find(subset | (last == kStart ? (1u << 30) : 0u));
    if (it != mst_cache.end()) return it->second;
    std::vector<int> ids;
    ids.push_back(inst.depot);
    if (last != kStart && !((~mask & full) & (1u << last))) ids.push_back(targets[last]);
    for (int k = 0; k < n; ++k)
      if (!(mask & (1u << k))) ids.push_back(targets[k]);
    const double h = mst_bound(inst, ids);
    mst_cache.emplace(subset | (last == kStart ? (1u << 30) : 0u), h);
    return h;
  };

  struct Entry {
    double f;
    double g;
    std::uint64_t key;
    bool operator>(const Entry& o) const {
      return f != o.f ? f > o.f : key > o.key; // deterministic tie order
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
  std::unordered_map<std::uint64_t, double> best_g;
  std::unordered_map<std::uint64_t, std::uint64_t> came_from;

  const std::uint64_t start_key = key_of(0, kStart);
  best_g[start_key] = 0.0;
  open.push({heuristic(0, kStart), 0.0, start_key});

  AStarReport rep;
  std::uint64_t goal_key = key_of(full, kGoal);
  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    const std::uint32_t mask = static_cast<std::uint32_t>(e.key >> 5);
    const int last = static_cast<int>(e.key & 31u);
    auto bit = best_g.find(e.key);
    if (bit == best_g.end() || e.g > bit->second + 1e-15) continue; // stale
    ++rep.expanded;
    if (last == kGoal) break;

    const int from_id = (last == kStart) ? inst.depot : targets[last];
    const double mass = depart[mask];
    if (mask == full) {
      const double g2 = e.g + inst.alpha * inst.unladen * inst.dist(from_id, inst.depot);
      auto it = best_g.find(goal_key);
      if (it == best_g.end() || g2 < it->second - 1e-15) {
        best_g[goal_key] = g2;
        came_from[goal_key] = e.key;
        open.push({g2, g2, goal_key});
      }
      continue;
    }
    for (int k = 0; k < n; ++k) {
      if (mask & (1u << k)) continue;
      const std::uint32_t mask2 = mask | (1u << k);
      const double g2 = e.g + inst.alpha * mass * inst.dist(from_id, targets[k]);
      const std::uint64_t key2 = key_of(mask2, k);
      auto it = best_g.find(key2);
      if (it != best_g.end() && g2 >= it->second - 1e-15) continue;
      best_g[key2] = g2;
      came_from[key2] = e.key;
      open.push({g2 + heuristic(mask2, k), g2, key2});
    }
  }

  auto it = best_g.find(goal_key);
  if (it == best_g.end()) throw std::logic_error("astar_search: goal unreachable");

  std::vector<int> order;
  for (std::uint64_t key = came_from.at(goal_key); key != start_key;
       key = came_from.at(key))
    order.push_back(targets[key & 31u]);
  std::reverse(order.begin(), order.end());
  auto [tour, cost] = evaluate_tour(inst, order);
  rep.tour = std::move(tour);
  rep.cost = cost;
  return rep;
}

// ---------------------------------------------------------------------------
// Branch and bound
// ---------------------------------------------------------------------------

namespace {

struct BBNode {
  int parent = -1;
  int branch_col = -1;
  double fix_val = 0.0;
  double bound = 0.0;
  Basis basis;
};

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string event_line(double t, std::int64_t nodes, double bound, double incumbent,
                       double gap) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "t=%.3f nodes=%lld bound=%.9g incumbent=%.9g gap=%.4f",
                t, static_cast<long long>(nodes), bound, incumbent, gap);
  return buf;
}

} // namespace

SolveReport solve(const Instance& inst, const SolveConfig& cfg) {
  if (cfg.variant == ModelVariant::minlp)
    throw std::invalid_argument("solve: the bilinear formulation is export-only");
  Clock clock;
  SolveReport rep;

  LinearModel model = build_milp(inst, cfg.variant);
  LpProblem lp = relax(model);
  const std::vector<double> root_lb = lp.col_lb;
  const std::vector<double> root_ub = lp.col_ub;
  const int n = inst.size();

  // Binary edge columns, in model order (lexicographic by (i, j)).
  std::vector<int> edge_cols;
  for (int c = 0; c < static_cast<int>(model.vars.size()); ++c)
    if (model.vars[c].integral) edge_cols.push_back(c);

  double inc_cost = kInf;
  std::optional<Tour> inc_tour;
  if (cfg.use_warm_start && inst.n_targets() >= 1) {
    auto [tour, cost] = warm_start(inst);
    inc_tour = std::move(tour);
    inc_cost = cost;
  }

  const bool separating = cfg.variant == ModelVariant::baseline2_milp_dfj;
  std::set<std::vector<int>> cut_pool;

  std::vector<BBNode> nodes(1);
  using QEntry = std::pair<double, int>;
  std::priority_queue<QEntry, std::vector<QEntry>, std::greater<QEntry>> open;
  open.push({0.0, 0});

  double last_emitted_bound = -kInf;
  auto emit = [&](double bound) {
    if (!cfg.event_sink) return;
    const double t = cfg.suppress_event_time ? 0.0 : clock.seconds();
    cfg.event_sink(event_line(t, rep.nodes, bound, inc_cost, gap_percent(inc_cost, bound)));
  };

  std::vector<int> touched; // columns with non-root bounds
  auto restore = [&]() {
    for (int c : touched) lp.set_col_bounds(c, root_lb[c], root_ub[c]);
    touched.clear();
  };
  auto apply_chain = [&](int id) {
    restore();
    for (int at = id; at > 0; at = nodes[at].parent) {
      lp.set_col_bounds(nodes[at].branch_col, nodes[at].fix_val, nodes[at].fix_val);
      touched.push_back(nodes[at].branch_col);
    }
  };

  auto prune_bound = [&]() { return inc_cost * (1.0 - cfg.gap_tolerance); };

  int pending = -1; // dive continuation
  double pending_bound = kInf;
  SolveStatus stop_status = SolveStatus::optimal;
  double final_bound = kInf;

  while (true) {
    int id = -1;
    double global_bound;
    if (pending >= 0) {
      id = pending;
      pending = -1;
      global_bound = std::min(pending_bound, open.empty() ? kInf : open.top().first);
    } else if (!open.empty()) {
      id = open.top().second;
      global_bound = open.top().first;
      open.pop();
    } else {
      // Tree exhausted: the incumbent is optimal (or none exists).
      final_bound = std::isfinite(inc_cost) ? inc_cost : kInf;
      stop_status = std::isfinite(inc_cost) ? SolveStatus::optimal : SolveStatus::infeasible;
      break;
    }
    final_bound = std::min(global_bound, std::isfinite(inc_cost) ? inc_cost : kInf);

    if (std::isfinite(inc_cost) && global_bound >= prune_bound() - 1e-12) {
      // Everything open is within tolerance of the incumbent.
      stop_status = SolveStatus::optimal;
      break;
    }
    if (rep.nodes > 0) { // the root relaxation always gets solved
      if (cfg.time_limit_s > 0.0 && clock.seconds() >= cfg.time_limit_s) {
        stop_status =
            std::isfinite(inc_cost) ? SolveStatus::limit_feasible : SolveStatus::limit_no_incumbent;
        break;
      }
      if (cfg.node_limit > 0 && rep.nodes >= cfg.node_limit) {
        stop_status =
            std::isfinite(inc_cost) ? SolveStatus::limit_feasible : SolveStatus::limit_no_incumbent;
        break;
      }
    }

    apply_chain(id);
    LpConfig lpcfg;
    LpResult res = nodes[id].basis.empty() ? solve_lp(lp, lpcfg)
                                           : solve_lp(lp, lpcfg, nodes[id].basis);
    nodes[id].basis = Basis{}; // chains stay, bases are one-shot
    ++rep.nodes;
    rep.lp_iterations += res.iterations;
    if (res.status == LpStatus::iteration_limit) {
      res = solve_lp(lp, lpcfg); // one cold retry before giving up
      rep.lp_iterations += res.iterations;
      if (res.status == LpStatus::iteration_limit)
        throw std::runtime_error("solve: simplex failed to converge");
    }
    if (res.status == LpStatus::infeasible) continue;
    if (res.status == LpStatus::unbounded)
      throw std::runtime_error("solve: relaxation unbounded");

    double bound = std::max(nodes[id].bound, res.objective);

    // Lazy subtour separation (baseline2): cuts join a pool shared by the
    // whole tree, so re-solve until this node's relaxation respects them.
    if (separating) {
      const int max_rounds = (id == 0) ? 20 : 5;
      for (int round = 0; round < max_rounds; ++round) {
        std::vector<double> edge_x(n * n, 0.0);
        for (int c : edge_cols) {
          const VarId v = model.vars[c].id;
          edge_x[(v.i - 1) * n + (v.j - 1)] = res.x[c];
        }
        auto subsets = separate_dfj(n, inst.depot, edge_x);
        int added = 0;
        for (auto& s : subsets) {
          if (!cut_pool.insert(s).second) continue;
          LinearConstraint cut = dfj_cut(s, n, inst.depot);
          lp.append_row(row_terms(model, cut), 1.0, kInf);
          ++added;
        }
        if (added == 0) break;
        rep.cuts += added;
        res = solve_lp(lp, lpcfg, res.basis);
        rep.lp_iterations += res.iterations;
        if (res.status != LpStatus::optimal) break;
        bound = std::max(bound, res.objective);
      }
      if (res.status == LpStatus::infeasible) continue;
      if (res.status != LpStatus::optimal)
        throw std::runtime_error("solve: separation re-solve failed");
    }

    if (std::isfinite(inc_cost) && bound >= prune_bound() - 1e-12) continue;

    // Most fractional binary; ties to the smallest (i, j).
    int branch_col = -1;
    double best_frac = cfg.integrality_tol;
    for (int c : edge_cols) {
      const double f = std::min(res.x[c], 1.0 - res.x[c]);
      if (f > best_frac) {
        best_frac = f;
        branch_col = c;
      }
    }

    if (branch_col < 0) {
      // Integral: walk the successor map from the depot.
      std::vector<int> next(n + 1, 0);
      for (int c : edge_cols)
        if (res.x[c] > 0.5) next[model.vars[c].id.i] = model.vars[c].id.j;
      std::vector<int> order;
      std::vector<bool> seen(n + 1, false);
      int at = inst.depot;
      bool closed_early = false;
      for (int step = 0; step < n; ++step) {
        seen[at] = true;
        at = next[at];
        if (at == inst.depot) {
          closed_early = step + 1 < n;
          break;
        }
        order.push_back(at);
      }
      if (closed_early) {
        // A depot-side subtour slipped through (numerics); cut it off and
        // requeue this node for another pass.
        std::vector<int> subset;
        for (int v = 1; v <= n; ++v)
          if (seen[v]) subset.push_back(v);
        if (cut_pool.insert(subset).second) {
          lp.append_row(row_terms(model, dfj_cut(subset, n, inst.depot)), 1.0, kInf);
          ++rep.cuts;
        }
        nodes[id].basis = res.basis;
        pending = id;
        pending_bound = bound;
        continue;
      }
      auto [tour, cost] = evaluate_tour(inst, order);
      if (cost < inc_cost - 1e-12) {
        inc_cost = cost;
        inc_tour = std::move(tour);
        emit(final_bound);
      }
      continue;
    }

    BBNode one;
    one.parent = id;
    one.branch_col = branch_col;
    one.fix_val = 1.0;
    one.bound = bound;
    BBNode zero = one;
    zero.fix_val = 0.0;
    one.basis = res.basis;
    zero.basis = std::move(res.basis);

    const int id_one = static_cast<int>(nodes.size());
    nodes.push_back(std::move(one));
    const int id_zero = static_cast<int>(nodes.size());
    nodes.push_back(std::move(zero));

    if (rep.nodes % 10 == 0) {
      pending = id_one; // dive: keep following the x=1 branch
      pending_bound = bound;
      open.push({bound, id_zero});
    } else {
      open.push({bound, id_one});
      open.push({bound, id_zero});
    }

    if (cfg.event_sink && (bound > last_emitted_bound + 1e-9 || rep.nodes % 100 == 0)) {
      last_emitted_bound = bound;
      emit(final_bound);
    }
  }

  rep.status = stop_status;
  rep.incumbent = std::move(inc_tour);
  rep.incumbent_cost = std::isfinite(inc_cost) ? inc_cost : 0.0;
  rep.best_bound = std::isfinite(final_bound) ? final_bound : 0.0;
  rep.gap_pct = std::isfinite(inc_cost) ? gap_percent(inc_cost, rep.best_bound) : kInf;
  if (!std::isfinite(rep.gap_pct)) rep.gap_pct = 0.0;
  rep.wall_s = clock.seconds();
  if (cfg.event_sink) emit(rep.best_bound);
  return rep;
}

} // namespace ldtsp
