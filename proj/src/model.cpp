#include "ldtsp/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "ldtsp/format.hpp"

namespace ldtsp {

int LinearModel::index_of(const VarId& v) const {
  auto it = index.find(v);
  if (it == index.end()) throw std::logic_error("model: unknown variable");
  return it->second;
}

void LinearModel::rebuild_index() {
  index.clear();
  for (int k = 0; k < static_cast<int>(vars.size()); ++k)
    index.emplace(vars[k].id, k);
}

namespace {

VarId xvar(int i, int j) { return VarId{VarKind::edge_use, i, j}; }
VarId zvar(int i, int j) { return VarId{VarKind::depart_mass, i, j}; }
VarId evar(int i, int j) { return VarId{VarKind::arrive_mass, i, j}; }
VarId mvar(int i) { return VarId{VarKind::node_mass, i, 0}; }

// All directed edges in lexicographic order.
std::vector<std::pair<int, int>> edge_list(int n) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1));
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != j) edges.emplace_back(i, j);
  return edges;
}

void add_degree_rows(LinearModel& m, int n) {
  for (int i = 1; i <= n; ++i) {
    LinearConstraint c{"degree-out", {}, Sense::eq, 1.0};
    for (int j = 1; j <= n; ++j)
      if (j != i) c.terms.push_back({xvar(i, j), 1.0});
    m.constraints.push_back(std::move(c));
  }
  for (int j = 1; j <= n; ++j) {
    LinearConstraint c{"degree-in", {}, Sense::eq, 1.0};
    for (int i = 1; i <= n; ++i)
      if (i != j) c.terms.push_back({xvar(i, j), 1.0});
    m.constraints.push_back(std::move(c));
  }
}

} // namespace

LinearModel build_milp(const Instance& inst, ModelVariant variant) {
  if (variant == ModelVariant::minlp)
    throw std::invalid_argument("build_milp: use build_minlp for the bilinear formulation");
  const int n = inst.size();
  const int depot = inst.depot;
  const double big = inst.depot_mass(); // M + Mbar
  const double unladen = inst.unladen;
  const auto edges = edge_list(n);
  const auto targets = inst.targets();

  LinearModel m;
  for (const auto& [i, j] : edges) m.vars.push_back({xvar(i, j), 0.0, 1.0, true});
  for (const auto& [i, j] : edges) m.vars.push_back({zvar(i, j), 0.0, big, false});
  for (const auto& [i, j] : edges) m.vars.push_back({evar(i, j), 0.0, big, false});
  m.rebuild_index();

  for (const auto& [i, j] : edges)
    m.objective.push_back({zvar(i, j), inst.alpha * inst.dist(i, j)});

  add_degree_rows(m, n);

  // The depot legs carry known masses: full load out, unladen back.
  for (int j : targets)
    m.constraints.push_back(
        {"depot-zeta", {{zvar(depot, j), 1.0}, {xvar(depot, j), -big}}, Sense::eq, 0.0});
  for (int j : targets)
    m.constraints.push_back(
        {"depot-eta", {{evar(j, depot), 1.0}, {xvar(j, depot), -unladen}}, Sense::eq, 0.0});

  // Crossing edge (i,j) drops m_j at j: zeta - eta = m_j on used edges.
  for (const auto& [i, j] : edges)
    if (j != depot)
      m.constraints.push_back({"mass-drop",
                               {{zvar(i, j), 1.0},
                                {evar(i, j), -1.0},
                                {xvar(i, j), -inst.mass_of(j)}},
                               Sense::eq,
                               0.0});

  // Incoming eta and outgoing zeta of a target both sum to its mass.
  for (int j : targets) {
    LinearConstraint c{"mass-balance", {}, Sense::eq, 0.0};
    for (int i = 1; i <= n; ++i)
      if (i != j) c.terms.push_back({evar(i, j), 1.0});
    for (int k = 1; k <= n; ++k)
      if (k != j) c.terms.push_back({zvar(j, k), -1.0});
    m.constraints.push_back(std::move(c));
  }

  // Couple the mass variables to the edge indicator on every edge.
  for (const auto& [i, j] : edges) {
    m.constraints.push_back(
        {"zeta-lb", {{zvar(i, j), 1.0}, {xvar(i, j), -unladen}}, Sense::ge, 0.0});
    m.constraints.push_back(
        {"zeta-ub", {{zvar(i, j), 1.0}, {xvar(i, j), -big}}, Sense::le, 0.0});
    m.constraints.push_back(
        {"eta-lb", {{evar(i, j), 1.0}, {xvar(i, j), -unladen}}, Sense::ge, 0.0});
    m.constraints.push_back(
        {"eta-ub", {{evar(i, j), 1.0}, {xvar(i, j), -big}}, Sense::le, 0.0});
  }

  if (variant == ModelVariant::baseline1_milp || variant == ModelVariant::baseline2_milp_dfj) {
    // Per-edge linking rows; redundant at integrality but kept by the
    // baseline formulations. The eta rows run over incoming edges of j.
    for (const auto& [i, j] : edges) {
      LinearConstraint lo{"zeta-link-lb", {}, Sense::ge, unladen};
      LinearConstraint hi{"zeta-link-ub", {}, Sense::le, big};
      for (int k = 1; k <= n; ++k) {
        if (k == i || k == j) continue;
        lo.terms.push_back({zvar(i, k), 1.0});
        hi.terms.push_back({zvar(i, k), 1.0});
      }
      lo.terms.push_back({xvar(i, j), unladen});
      hi.terms.push_back({xvar(i, j), big});
      m.constraints.push_back(std::move(lo));
      m.constraints.push_back(std::move(hi));

      LinearConstraint elo{"eta-link-lb", {}, Sense::ge, unladen};
      LinearConstraint ehi{"eta-link-ub", {}, Sense::le, big};
      for (int k = 1; k <= n; ++k) {
        if (k == i || k == j) continue;
        elo.terms.push_back({evar(k, j), 1.0});
        ehi.terms.push_back({evar(k, j), 1.0});
      }
      elo.terms.push_back({xvar(i, j), unladen});
      ehi.terms.push_back({xvar(i, j), big});
      m.constraints.push_back(std::move(elo));
      m.constraints.push_back(std::move(ehi));
    }
  }
  return m;
}

LinearModel build_minlp(const Instance& inst) {
  const int n = inst.size();
  const int depot = inst.depot;
  const double big = inst.depot_mass();
  const double mbar = inst.total_mass();
  const auto edges = edge_list(n);

  LinearModel m;
  for (const auto& [i, j] : edges) m.vars.push_back({xvar(i, j), 0.0, 1.0, true});
  for (int i = 1; i <= n; ++i) {
    if (i == depot)
      m.vars.push_back({mvar(i), big, big, false}); // fixed departure mass
    else
      m.vars.push_back({mvar(i), inst.unladen, big, false});
  }
  m.rebuild_index();

  for (const auto& [i, j] : edges)
    m.quad_objective.push_back({mvar(i), xvar(i, j), inst.alpha * inst.dist(i, j)});

  add_degree_rows(m, n);

  // |M_i - M_j - m_j x_ij| <= Mbar (1 - x_ij), split into two rows.
  for (const auto& [i, j] : edges) {
    if (j == depot) continue;
    const double mj = inst.mass_of(j);
    m.constraints.push_back({"mass-drop-ub",
                             {{mvar(i), 1.0}, {mvar(j), -1.0}, {xvar(i, j), mbar - mj}},
                             Sense::le,
                             mbar});
    m.constraints.push_back({"mass-drop-lb",
                             {{mvar(i), -1.0}, {mvar(j), 1.0}, {xvar(i, j), mbar + mj}},
                             Sense::le,
                             mbar});
  }
  return m;
}

LinearConstraint dfj_cut(const std::vector<int>& subset, int n_nodes, int depot) {
  std::set<int> inside(subset.begin(), subset.end());
  if (inside.size() != subset.size())
    throw std::invalid_argument("dfj_cut: duplicate ids in subset");
  for (int id : inside)
    if (id < 1 || id > n_nodes) throw std::invalid_argument("dfj_cut: id out of range");
  if (!inside.count(depot)) throw std::invalid_argument("dfj_cut: subset must contain the depot");
  if (static_cast<int>(inside.size()) >= n_nodes)
    throw std::invalid_argument("dfj_cut: subset must be a proper subset");

  LinearConstraint c{"dfj", {}, Sense::ge, 1.0};
  for (int i : inside)
    for (int j = 1; j <= n_nodes; ++j)
      if (!inside.count(j)) c.terms.push_back({xvar(i, j), 1.0});
  return c;
}

std::pair<Tour, double> evaluate_tour(const Instance& inst,
                                      const std::vector<int>& target_sequence) {
  const int n_t = inst.n_targets();
  if (static_cast<int>(target_sequence.size()) != n_t)
    throw std::invalid_argument("evaluate_tour: sequence must list every target once");
  std::vector<bool> seen(inst.size(), false);
  for (int id : target_sequence) {
    if (id < 1 || id > inst.size() || id == inst.depot)
      throw std::invalid_argument("evaluate_tour: invalid target id " + std::to_string(id));
    if (seen[id - 1])
      throw std::invalid_argument("evaluate_tour: duplicate target id " + std::to_string(id));
    seen[id - 1] = true;
  }

  Tour tour;
  tour.sequence.reserve(n_t + 2);
  tour.sequence.push_back(inst.depot);
  tour.sequence.insert(tour.sequence.end(), target_sequence.begin(), target_sequence.end());
  tour.sequence.push_back(inst.depot);

  tour.masses.resize(tour.sequence.size());
  double mass = inst.depot_mass();
  tour.masses[0] = mass;
  for (int k = 0; k < n_t; ++k) {
    mass -= inst.mass_of(target_sequence[k]);
    tour.masses[k + 1] = mass;
  }
  // After the last delivery the load is exactly M; the running difference
  // may sit a few ulp off (and below zero when M = 0), so snap it.
  tour.masses[n_t] = inst.unladen;
  tour.masses.back() = inst.unladen;

  double cost = 0.0;
  for (std::size_t k = 0; k + 1 < tour.sequence.size(); ++k)
    cost += inst.alpha * tour.masses[k] * inst.dist(tour.sequence[k], tour.sequence[k + 1]);
  return {std::move(tour), cost};
}

bool validate_tour(const Instance& inst, const std::vector<int>& sequence) {
  if (static_cast<int>(sequence.size()) != inst.size() + 1) return false;
  if (sequence.front() != inst.depot || sequence.back() != inst.depot) return false;
  std::vector<int> count(inst.size(), 0);
  for (std::size_t k = 0; k + 1 < sequence.size(); ++k) {
    int id = sequence[k];
    if (id < 1 || id > inst.size()) return false;
    ++count[id - 1];
  }
  for (int id = 1; id <= inst.size(); ++id)
    if (count[id - 1] != 1) return false;
  return true;
}

std::map<VarId, double> induced_point(const Instance& inst, const Tour& tour) {
  if (!validate_tour(inst, tour.sequence))
    throw std::invalid_argument("induced_point: not a valid tour");
  std::map<VarId, double> p;
  for (std::size_t k = 0; k + 1 < tour.sequence.size(); ++k) {
    const int i = tour.sequence[k];
    const int j = tour.sequence[k + 1];
    p[xvar(i, j)] = 1.0;
    p[zvar(i, j)] = tour.masses[k];
    p[evar(i, j)] = tour.masses[k + 1];
  }
  return p;
}

double constraint_activity(const LinearConstraint& c, const std::map<VarId, double>& point) {
  double a = 0.0;
  for (const auto& t : c.terms) {
    auto it = point.find(t.var);
    if (it != point.end()) a += t.coeff * it->second;
  }
  return a;
}

bool constraint_satisfied(const LinearConstraint& c, const std::map<VarId, double>& point,
                          double tol) {
  const double a = constraint_activity(c, point);
  switch (c.sense) {
  case Sense::le: return a <= c.rhs + tol;
  case Sense::ge: return a >= c.rhs - tol;
  case Sense::eq: return std::fabs(a - c.rhs) <= tol;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

namespace {

std::string var_name(const VarId& v) {
  switch (v.kind) {
  case VarKind::edge_use:
    return "x_" + std::to_string(v.i) + "_" + std::to_string(v.j);
  case VarKind::depart_mass:
    return "z_" + std::to_string(v.i) + "_" + std::to_string(v.j);
  case VarKind::arrive_mass:
    return "e_" + std::to_string(v.i) + "_" + std::to_string(v.j);
  case VarKind::node_mass:
    return "M_" + std::to_string(v.i);
  }
  return {};
}

std::string sanitize_tag(const std::string& tag) {
  std::string s = tag;
  for (char& c : s)
    if (c == '-') c = '_';
  return s;
}

// Row names: sanitized tag plus a per-tag ordinal, in build order.
std::vector<std::string> row_names(const LinearModel& m) {
  std::vector<std::string> names;
  names.reserve(m.constraints.size());
  std::map<std::string, int> counters;
  for (const auto& c : m.constraints)
    names.push_back(sanitize_tag(c.tag) + "_" + std::to_string(++counters[c.tag]));
  return names;
}

void append_term(std::string& line, bool first, double coeff, const std::string& name) {
  if (first) {
    if (coeff < 0.0)
      line += "- " + fmt_shortest(-coeff) + " " + name;
    else
      line += fmt_shortest(coeff) + " " + name;
  } else {
    if (coeff < 0.0)
      line += " - " + fmt_shortest(-coeff) + " " + name;
    else
      line += " + " + fmt_shortest(coeff) + " " + name;
  }
}

void flush_wrapped(std::string& out, std::string& line) {
  out += line;
  out += "\n";
  line.clear();
}

} // namespace

std::string export_lp(const LinearModel& model) {
  std::string out;
  out += "\\ ldtsp model export\n";
  out += "Minimize\n";

  std::string line = " obj: ";
  bool first = true;
  for (const auto& t : model.objective) {
    append_term(line, first, t.coeff, var_name(t.var));
    first = false;
    if (line.size() > 200) {
      out += line + "\n";
      line = "   ";
    }
  }
  if (!model.quad_objective.empty()) {
    line += first ? "[ " : " + [ ";
    bool qfirst = true;
    for (const auto& q : model.quad_objective) {
      // Bracketed quadratic terms are halved by the trailing "/ 2".
      append_term(line, qfirst, 2.0 * q.coeff, var_name(q.a) + " * " + var_name(q.b));
      qfirst = false;
      if (line.size() > 200) {
        out += line + "\n";
        line = "   ";
      }
    }
    line += " ] / 2";
    first = false;
  }
  if (first) line += "0 x_dummy"; // no objective terms; never hit by our builders
  flush_wrapped(out, line);

  out += "Subject To\n";
  const auto names = row_names(model);
  for (std::size_t r = 0; r < model.constraints.size(); ++r) {
    const auto& c = model.constraints[r];
    line = " " + names[r] + ": ";
    bool f = true;
    for (const auto& t : c.terms) {
      append_term(line, f, t.coeff, var_name(t.var));
      f = false;
      if (line.size() > 200) {
        out += line + "\n";
        line = "   ";
      }
    }
    switch (c.sense) {
    case Sense::le: line += " <= "; break;
    case Sense::ge: line += " >= "; break;
    case Sense::eq: line += " = "; break;
    }
    line += fmt_shortest(c.rhs);
    flush_wrapped(out, line);
  }

  out += "Bounds\n";
  for (const auto& v : model.vars) {
    if (v.lb == v.ub)
      out += " " + var_name(v.id) + " = " + fmt_shortest(v.lb) + "\n";
    else
      out += " " + fmt_shortest(v.lb) + " <= " + var_name(v.id) + " <= " + fmt_shortest(v.ub) +
             "\n";
  }

  bool any_int = false;
  for (const auto& v : model.vars)
    if (v.integral) { any_int = true; break; }
  if (any_int) {
    out += "Binaries\n";
    int on_line = 0;
    line.clear();
    for (const auto& v : model.vars) {
      if (!v.integral) continue;
      line += " " + var_name(v.id);
      if (++on_line == 8) {
        flush_wrapped(out, line);
        on_line = 0;
      }
    }
    if (on_line > 0) flush_wrapped(out, line);
  }
  out += "End\n";
  return out;
}

namespace {

// Fixed MPS fields, 1-based start columns 2, 5, 15, 25, 40, 50.
std::string mps_line(const std::string& f1, const std::string& f2, const std::string& f3,
                     const std::string& f4 = {}, const std::string& f5 = {},
                     const std::string& f6 = {}) {
  std::string line;
  auto put = [&](const std::string& s, std::size_t col) {
    if (s.empty()) return;
    if (line.size() + 1 < col)
      line.append(col - 1 - line.size(), ' ');
    else if (!line.empty())
      line += ' ';
    line += s;
  };
  put(f1, 2);
  put(f2, 5);
  put(f3, 15);
  put(f4, 25);
  put(f5, 40);
  put(f6, 50);
  return line + "\n";
}

std::string mps_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf);
}

} // namespace

std::string export_mps(const LinearModel& model, const std::string& name) {
  std::string out = "NAME          " + name + "\n";

  const auto rnames = row_names(model);
  out += "ROWS\n";
  out += mps_line("N", "obj", "");
  for (std::size_t r = 0; r < model.constraints.size(); ++r) {
    const char* s = model.constraints[r].sense == Sense::le   ? "L"
                    : model.constraints[r].sense == Sense::ge ? "G"
                                                              : "E";
    out += mps_line(s, rnames[r], "");
  }

  // Column-major view of the constraint matrix plus objective row.
  const int ncols = static_cast<int>(model.vars.size());
  std::vector<std::vector<std::pair<std::string, double>>> entries(ncols);
  for (const auto& t : model.objective)
    entries[model.index_of(t.var)].emplace_back("obj", t.coeff);
  for (std::size_t r = 0; r < model.constraints.size(); ++r)
    for (const auto& t : model.constraints[r].terms)
      entries[model.index_of(t.var)].emplace_back(rnames[r], t.coeff);

  out += "COLUMNS\n";
  bool in_int = false;
  int marker_no = 0;
  for (int c = 0; c < ncols; ++c) {
    const auto& v = model.vars[c];
    if (v.integral != in_int) {
      ++marker_no;
      out += mps_line("", "MARKER" + std::to_string(marker_no), "'MARKER'", "", "",
                      v.integral ? "'INTORG'" : "'INTEND'");
      in_int = v.integral;
    }
    const std::string cname = var_name(v.id);
    const auto& es = entries[c];
    for (std::size_t k = 0; k < es.size(); k += 2) {
      if (k + 1 < es.size())
        out += mps_line("", cname, es[k].first, mps_num(es[k].second), es[k + 1].first,
                        mps_num(es[k + 1].second));
      else
        out += mps_line("", cname, es[k].first, mps_num(es[k].second));
    }
    if (es.empty()) out += mps_line("", cname, "obj", mps_num(0.0));
  }
  if (in_int) {
    ++marker_no;
    out += mps_line("", "MARKER" + std::to_string(marker_no), "'MARKER'", "", "", "'INTEND'");
  }

  out += "RHS\n";
  for (std::size_t r = 0; r < model.constraints.size(); ++r)
    if (model.constraints[r].rhs != 0.0)
      out += mps_line("", "RHS", rnames[r], mps_num(model.constraints[r].rhs));

  out += "BOUNDS\n";
  for (const auto& v : model.vars) {
    const std::string cname = var_name(v.id);
    if (v.lb == v.ub) {
      out += mps_line("FX", "BND", cname, mps_num(v.lb));
    } else {
      if (v.lb != 0.0) out += mps_line("LO", "BND", cname, mps_num(v.lb));
      out += mps_line("UP", "BND", cname, mps_num(v.ub));
    }
  }

  if (!model.quad_objective.empty()) {
    // Both symmetric entries; readers take one half of x'Qx.
    out += "QMATRIX\n";
    for (const auto& q : model.quad_objective) {
      out += mps_line("", var_name(q.a), var_name(q.b), mps_num(q.coeff));
      out += mps_line("", var_name(q.b), var_name(q.a), mps_num(q.coeff));
    }
  }
  out += "ENDATA\n";
  return out;
}

} // namespace ldtsp
