#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ldtsp/heuristics.hpp"
#include "ldtsp/instance.hpp"
#include "ldtsp/model.hpp"
#include "ldtsp/oracles.hpp"
#include "ldtsp/solver.hpp"

namespace py = pybind11;
using namespace ldtsp;

namespace {

ModelVariant milp_variant(const std::string& name) {
  if (name == "core") return ModelVariant::core_milp;
  if (name == "baseline1") return ModelVariant::baseline1_milp;
  if (name == "baseline2") return ModelVariant::baseline2_milp_dfj;
  throw std::invalid_argument("unknown variant: " + name +
                              " (expected core, baseline1 or baseline2)");
}

std::string status_str(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::limit_feasible: return "feasible_time_limit";
    case SolveStatus::limit_no_incumbent: return "no_incumbent";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

} // namespace

PYBIND11_MODULE(_ldtsp, m) {
  m.doc() = "Exact solvers for the load-dependent traveling salesman problem";

  py::class_<Tour>(m, "Tour")
      .def_readonly("sequence", &Tour::sequence,
                    "Depot-rooted node order, depot repeated at the end.")
      .def_readonly("masses", &Tour::masses,
                    "Departure mass per sequence position; last entry is the "
                    "arrival (unladen) mass.")
      .def("__repr__", [](const Tour& t) {
        std::ostringstream ss;
        ss << "Tour([";
        for (std::size_t i = 0; i < t.sequence.size(); ++i) ss << (i ? "," : "") << t.sequence[i];
        ss << "])";
        return ss.str();
      });

  py::class_<Instance>(m, "Instance")
      .def_property_readonly("name", [](const Instance& i) { return i.nodes.name; })
      .def_readonly("depot", &Instance::depot)
      .def_readonly("alpha", &Instance::alpha)
      .def_readonly("unladen", &Instance::unladen)
      .def_property_readonly("gamma",
                             [](const Instance& i) -> py::object {
                               return i.gamma ? py::cast(*i.gamma) : py::none();
                             })
      .def_property_readonly("n_targets", &Instance::n_targets)
      .def_property_readonly("size", &Instance::size)
      .def("targets", &Instance::targets, "Non-depot node ids, ascending.")
      .def("mass_of", &Instance::mass_of, py::arg("id"), "Package mass at a target.")
      .def("distance", [](const Instance& i, int a, int b) { return i.dist(a, b); },
           py::arg("a"), py::arg("b"))
      .def_property_readonly("depot_mass", &Instance::depot_mass)
      .def("__repr__", [](const Instance& i) {
        std::ostringstream ss;
        ss << "Instance(name='" << i.nodes.name << "', targets=" << i.n_targets()
           << ", depot=" << i.depot << ")";
        return ss.str();
      });

  py::class_<SolveReport>(m, "SolveReport")
      .def_property_readonly("status",
                             [](const SolveReport& r) { return status_str(r.status); })
      .def_property_readonly("tour",
                             [](const SolveReport& r) -> py::object {
                               return r.incumbent ? py::cast(*r.incumbent) : py::none();
                             })
      .def_property_readonly("cost",
                             [](const SolveReport& r) -> py::object {
                               return r.incumbent ? py::cast(r.incumbent_cost) : py::none();
                             })
      .def_readonly("best_bound", &SolveReport::best_bound)
      .def_readonly("gap_pct", &SolveReport::gap_pct)
      .def_readonly("nodes", &SolveReport::nodes)
      .def_readonly("cuts", &SolveReport::cuts)
      .def_readonly("lp_iterations", &SolveReport::lp_iterations)
      .def_readonly("wall_s", &SolveReport::wall_s)
      .def("__repr__", [](const SolveReport& r) {
        std::ostringstream ss;
        ss << "SolveReport(status='" << status_str(r.status) << "', nodes=" << r.nodes << ")";
        return ss.str();
      });

  m.def("read_instance", &read_instance, py::arg("text"),
        "Parse a native instance document into an Instance.");
  m.def("write_instance", &write_instance, py::arg("instance"),
        "Serialize an Instance; read_instance round-trips bit-exactly.");
  m.def(
      "generate_instance",
      [](const std::string& tsplib_text, std::uint64_t seed, double gamma, double alpha,
         int depot) {
        NodeSet nodes = parse_tsplib(tsplib_text);
        if (depot == 0) depot = nodes.size();
        return make_instance(nodes, depot, generate_masses(nodes.size() - 1, seed), gamma,
                             alpha);
      },
      py::arg("tsplib_text"), py::arg("seed"), py::arg("gamma"), py::arg("alpha") = 0.1,
      py::arg("depot") = 0,
      "Build an instance from TSPLIB text: package masses drawn from "
      "{0.1,...,1.0} with the given seed, unladen mass gamma * total package "
      "mass, depot defaulting to the last node.");

  m.def(
      "evaluate_tour",
      [](const Instance& inst, const std::vector<int>& targets) {
        auto [tour, cost] = evaluate_tour(inst, targets);
        return py::make_tuple(tour, cost);
      },
      py::arg("instance"), py::arg("targets"),
      "Cost and mass schedule of visiting the targets in order; returns "
      "(Tour, cost).");
  m.def("validate_tour", &validate_tour, py::arg("instance"), py::arg("sequence"),
        "True iff sequence is a depot-rooted closed tour over all targets.");

  m.def(
      "solve",
      [](const Instance& inst, const std::string& variant, double time_limit,
         double gap_tolerance, bool warm_start, std::int64_t node_limit,
         bool suppress_event_time, const py::object& on_event) {
        SolveConfig cfg;
        cfg.variant = milp_variant(variant);
        cfg.time_limit_s = time_limit;
        cfg.gap_tolerance = gap_tolerance;
        cfg.use_warm_start = warm_start;
        cfg.node_limit = node_limit;
        cfg.suppress_event_time = suppress_event_time;
        if (!on_event.is_none())
          cfg.event_sink = [on_event](const std::string& line) { on_event(line); };
        return solve(inst, cfg);
      },
      py::arg("instance"), py::arg("variant") = "core", py::arg("time_limit") = 600.0,
      py::arg("gap_tolerance") = 1e-6, py::arg("warm_start") = true,
      py::arg("node_limit") = 0, py::arg("suppress_event_time") = false,
      py::arg("on_event") = py::none(),
      "Exact branch-and-bound solve; variant is core, baseline1 or baseline2. "
      "on_event receives each event-log line.");

  m.def(
      "astar",
      [](const Instance& inst) {
        AStarReport r = astar_search(inst);
        return py::make_tuple(r.tour, r.cost, r.expanded);
      },
      py::arg("instance"),
      "Exact A* search benchmark; returns (Tour, cost, expanded_states).");

  m.def(
      "brute_force",
      [](const Instance& inst) {
        OracleResult r = brute_force(inst);
        return py::make_tuple(r.tour, r.cost);
      },
      py::arg("instance"), "Exhaustive permutation oracle (n_targets <= 10).");
  m.def(
      "held_karp",
      [](const Instance& inst) {
        OracleResult r = held_karp(inst);
        return py::make_tuple(r.tour, r.cost);
      },
      py::arg("instance"), "Dynamic-programming oracle (n_targets <= 20).");
  m.def(
      "warm_start",
      [](const Instance& inst) {
        auto [tour, cost] = warm_start(inst);
        return py::make_tuple(tour, cost);
      },
      py::arg("instance"), "Nearest-neighbor + 2-opt primal bound; (Tour, cost).");

  m.def(
      "export_model",
      [](const Instance& inst, const std::string& variant, const std::string& format) {
        LinearModel model =
            variant == "minlp" ? build_minlp(inst) : build_milp(inst, milp_variant(variant));
        if (format == "lp") return export_lp(model);
        if (format == "mps") return export_mps(model, inst.nodes.name);
        throw std::invalid_argument("unknown format: " + format + " (expected lp or mps)");
      },
      py::arg("instance"), py::arg("variant") = "core", py::arg("format") = "lp",
      "Serialize the optimization model (variant core, baseline1 or minlp) "
      "in LP or MPS format.");
}
