#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ldtsp/format.hpp"
#include "ldtsp/model.hpp"
#include "support.hpp"

using namespace ldtsp;

namespace {

int count_tag(const LinearModel& m, const std::string& tag) {
  int k = 0;
  for (const auto& c : m.constraints)
    if (c.tag == tag) ++k;
  return k;
}

bool point_feasible(const LinearModel& m, const std::map<VarId, double>& p,
                    double tol = 1e-9) {
  for (const auto& c : m.constraints)
    if (!constraint_satisfied(c, p, tol)) return false;
  return true;
}

double objective_at(const LinearModel& m, const std::map<VarId, double>& p) {
  double v = 0.0;
  for (const auto& t : m.objective) {
    auto it = p.find(t.var);
    if (it != p.end()) v += t.coeff * it->second;
  }
  for (const auto& q : m.quad_objective) {
    auto a = p.find(q.a);
    auto b = p.find(q.b);
    if (a != p.end() && b != p.end()) v += q.coeff * a->second * b->second;
  }
  return v;
}

} // namespace

TEST_CASE("tour evaluation and the mass schedule") {
  Instance inst = testing::tiny_instance();

  auto [t12, c12] = evaluate_tour(inst, {1, 2});
  CHECK(t12.sequence == std::vector<int>{3, 1, 2, 3});
  REQUIRE(t12.masses.size() == 4);
  CHECK(t12.masses[0] == doctest::Approx(2.1).epsilon(1e-15));
  CHECK(t12.masses[1] == doctest::Approx(1.9).epsilon(1e-15));
  CHECK(t12.masses[2] == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(t12.masses[3] == doctest::Approx(1.4).epsilon(1e-15));
  // 0.1 * (2.1 * 1 + 1.9 * sqrt(2) + 1.4 * 1)
  CHECK(c12 == doctest::Approx(0.35 + 0.19 * std::sqrt(2.0)).epsilon(1e-14));

  auto [t21, c21] = evaluate_tour(inst, {2, 1});
  CHECK(c21 == doctest::Approx(0.35 + 0.16 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(c21 < c12); // dropping the heavier package first is cheaper here

  CHECK_THROWS_AS(evaluate_tour(inst, {1}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_tour(inst, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_tour(inst, {1, 3}), std::invalid_argument);
}

TEST_CASE("validate_tour") {
  Instance inst = testing::tiny_instance();
  CHECK(validate_tour(inst, {3, 1, 2, 3}));
  CHECK(validate_tour(inst, {3, 2, 1, 3}));
  CHECK(!validate_tour(inst, {3, 1, 2}));
  CHECK(!validate_tour(inst, {1, 2, 3, 1}));
  CHECK(!validate_tour(inst, {3, 1, 1, 3}));
  CHECK(!validate_tour(inst, {3, 1, 4, 3}));
}

TEST_CASE("core MILP has the expected shape") {
  Instance inst = testing::tiny_instance();
  LinearModel m = build_milp(inst, ModelVariant::core_milp);

  CHECK(m.vars.size() == 18); // 3 kinds x 6 directed edges
  CHECK(m.objective.size() == 6);
  CHECK(m.quad_objective.empty());
  // n = 2 targets, N = 3 nodes, |E| = 6:
  // 6 degree + 2 depot-zeta + 2 depot-eta + 4 mass-drop + 2 mass-balance
  // + 24 coupling rows = 40.
  CHECK(m.constraints.size() == 40);
  CHECK(count_tag(m, "degree-out") == 3);
  CHECK(count_tag(m, "degree-in") == 3);
  CHECK(count_tag(m, "depot-zeta") == 2);
  CHECK(count_tag(m, "depot-eta") == 2);
  CHECK(count_tag(m, "mass-drop") == 4);
  CHECK(count_tag(m, "mass-balance") == 2);
  CHECK(count_tag(m, "zeta-lb") == 6);
  CHECK(count_tag(m, "eta-ub") == 6);

  for (const auto& v : m.vars) {
    if (v.id.kind == VarKind::edge_use) {
      CHECK(v.integral);
      CHECK(v.lb == 0.0);
      CHECK(v.ub == 1.0);
    } else {
      CHECK(!v.integral);
      CHECK(v.lb == 0.0);
      CHECK(v.ub == doctest::Approx(2.1).epsilon(1e-15));
    }
  }
  CHECK(m.index_of(VarId{VarKind::edge_use, 1, 2}) == 0);
  CHECK_THROWS_AS(m.index_of(VarId{VarKind::node_mass, 1, 0}), std::logic_error);
}

TEST_CASE("tours induce feasible points with matching objective") {
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
    Instance inst = testing::random_instance(5, seed, 2.0);
    for (auto variant : {ModelVariant::core_milp, ModelVariant::baseline1_milp,
                         ModelVariant::baseline2_milp_dfj}) {
      LinearModel m = build_milp(inst, variant);
      // A couple of arbitrary visiting orders.
      for (auto order : {std::vector<int>{1, 2, 3, 4}, std::vector<int>{4, 2, 1, 3},
                         std::vector<int>{3, 1, 4, 2}}) {
        auto [tour, cost] = evaluate_tour(inst, order);
        auto point = induced_point(inst, tour);
        CHECK(point_feasible(m, point));
        CHECK(objective_at(m, point) == doctest::Approx(cost).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("baseline rows are satisfied at integrality and count out") {
  Instance inst = testing::tiny_instance();
  LinearModel core = build_milp(inst, ModelVariant::core_milp);
  LinearModel b1 = build_milp(inst, ModelVariant::baseline1_milp);
  LinearModel b2 = build_milp(inst, ModelVariant::baseline2_milp_dfj);
  CHECK(b1.constraints.size() == core.constraints.size() + 4 * 6);
  CHECK(b2.constraints.size() == b1.constraints.size());
  CHECK(count_tag(b1, "zeta-link-lb") == 6);
  CHECK(count_tag(b1, "eta-link-ub") == 6);
  // The first rows coincide with the core model.
  for (std::size_t r = 0; r < core.constraints.size(); ++r)
    CHECK(b1.constraints[r].tag == core.constraints[r].tag);
  CHECK_THROWS_AS(build_milp(inst, ModelVariant::minlp), std::invalid_argument);
}

TEST_CASE("MINLP shape and feasibility of the induced point") {
  Instance inst = testing::tiny_instance();
  LinearModel m = build_minlp(inst);
  CHECK(m.vars.size() == 9); // 6 edges + 3 node masses
  CHECK(m.objective.empty());
  CHECK(m.quad_objective.size() == 6);
  // 6 degree rows + 2 rows per edge into a target (4 such edges).
  CHECK(m.constraints.size() == 14);

  const VarDecl& depot_mass = m.vars[m.index_of(VarId{VarKind::node_mass, 3, 0})];
  CHECK(depot_mass.lb == depot_mass.ub);
  CHECK(depot_mass.lb == doctest::Approx(2.1).epsilon(1e-15));
  const VarDecl& t1_mass = m.vars[m.index_of(VarId{VarKind::node_mass, 1, 0})];
  CHECK(t1_mass.lb == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(t1_mass.ub == doctest::Approx(2.1).epsilon(1e-15));

  auto [tour, cost] = evaluate_tour(inst, {1, 2});
  auto point = induced_point(inst, tour);
  // Extend with the node masses along the tour: depart-depot mass at the
  // depot, post-drop mass at each target.
  point[VarId{VarKind::node_mass, 3, 0}] = tour.masses[0];
  point[VarId{VarKind::node_mass, 1, 0}] = tour.masses[1];
  point[VarId{VarKind::node_mass, 2, 0}] = tour.masses[2];
  CHECK(point_feasible(m, point));
  CHECK(objective_at(m, point) == doctest::Approx(cost).epsilon(1e-12));
}

TEST_CASE("subtour cuts separate disconnected selections") {
  // Four nodes, depot 4. The split {4,1} / {2,3} satisfies all degree rows
  // but no edge leaves the depot's side.
  LinearConstraint cut = dfj_cut({4, 1}, 4, 4);
  CHECK(cut.sense == Sense::ge);
  CHECK(cut.rhs == 1.0);
  CHECK(cut.terms.size() == 4); // {1,4} x {2,3}

  std::map<VarId, double> split;
  split[VarId{VarKind::edge_use, 4, 1}] = 1.0;
  split[VarId{VarKind::edge_use, 1, 4}] = 1.0;
  split[VarId{VarKind::edge_use, 2, 3}] = 1.0;
  split[VarId{VarKind::edge_use, 3, 2}] = 1.0;
  CHECK(!constraint_satisfied(cut, split));

  std::map<VarId, double> tour;
  tour[VarId{VarKind::edge_use, 4, 1}] = 1.0;
  tour[VarId{VarKind::edge_use, 1, 2}] = 1.0;
  tour[VarId{VarKind::edge_use, 2, 3}] = 1.0;
  tour[VarId{VarKind::edge_use, 3, 4}] = 1.0;
  CHECK(constraint_satisfied(cut, tour));

  CHECK_THROWS_AS(dfj_cut({1, 2}, 4, 4), std::invalid_argument);    // depot missing
  CHECK_THROWS_AS(dfj_cut({1, 2, 3, 4}, 4, 4), std::invalid_argument); // full set
  CHECK_THROWS_AS(dfj_cut({4, 4}, 4, 4), std::invalid_argument);    // duplicate
  CHECK_THROWS_AS(dfj_cut({4, 5}, 4, 4), std::invalid_argument);    // out of range
}

TEST_CASE("all tours satisfy any valid subtour cut") {
  Instance inst = testing::random_instance(5, 99, 2.0);
  std::vector<int> order = {1, 2, 3, 4};
  do {
    auto [tour, cost] = evaluate_tour(inst, order);
    auto point = induced_point(inst, tour);
    for (const auto& subset :
         {std::vector<int>{5}, std::vector<int>{5, 1}, std::vector<int>{5, 2, 3},
          std::vector<int>{5, 1, 2, 4}})
      CHECK(constraint_satisfied(dfj_cut(subset, 5, 5), point));
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("LP export is deterministic and structured") {
  Instance inst = testing::tiny_instance();
  LinearModel m = build_milp(inst, ModelVariant::core_milp);
  const std::string lp = export_lp(m);
  CHECK(lp == export_lp(build_milp(inst, ModelVariant::core_milp)));
  CHECK(lp.find("Minimize") != std::string::npos);
  CHECK(lp.find("Subject To") != std::string::npos);
  CHECK(lp.find("Bounds") != std::string::npos);
  CHECK(lp.find("Binaries") != std::string::npos);
  CHECK(lp.rfind("End\n") == lp.size() - 4);
  CHECK(lp.find(" degree_out_1: 1 x_1_2 + 1 x_1_3 = 1\n") != std::string::npos);
  const std::string big = fmt_shortest(inst.depot_mass());
  CHECK(lp.find(" 0 <= z_1_2 <= " + big) != std::string::npos);
  CHECK(lp.find("M_1") == std::string::npos); // no node-mass vars in the MILP

  const std::string qp = export_lp(build_minlp(inst));
  CHECK(qp.find("[ ") != std::string::npos);
  CHECK(qp.find("] / 2") != std::string::npos);
  CHECK(qp.find("M_3 = " + big) != std::string::npos); // fixed depot mass
}

TEST_CASE("LP export matches the audited golden file") {
  Instance inst = testing::tiny_instance();
  const std::string lp = export_lp(build_milp(inst, ModelVariant::core_milp));
  std::ifstream in(std::string(LDTSP_GOLDEN_DIR) + "/tiny_core.lp", std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(lp == buf.str());
}

TEST_CASE("MPS export structure and field alignment") {
  Instance inst = testing::tiny_instance();
  const std::string mps = export_mps(build_milp(inst, ModelVariant::core_milp), "tiny");
  CHECK(mps.rfind("NAME", 0) == 0);
  for (const char* section : {"ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"})
    CHECK(mps.find(std::string("\n") + section) != std::string::npos);
  CHECK(mps.find("'INTORG'") != std::string::npos);
  CHECK(mps.find("'INTEND'") != std::string::npos);
  CHECK(mps.find("QMATRIX") == std::string::npos);

  // Fixed fields: names start at column 5 (index 4), row names at 15,
  // values at 25 on COLUMNS lines.
  std::istringstream lines(mps);
  std::string line;
  bool checked = false;
  while (std::getline(lines, line)) {
    if (line.rfind("    x_1_2", 0) == 0) {
      CHECK(line.size() > 24);
      CHECK(line[14] != ' ');
      CHECK(line[24] != ' ');
      checked = true;
      break;
    }
  }
  CHECK(checked);

  const std::string qmps = export_mps(build_minlp(inst), "tinyq");
  CHECK(qmps.find("QMATRIX") != std::string::npos);
  CHECK(qmps.find("ENDATA\n") != std::string::npos);
}
