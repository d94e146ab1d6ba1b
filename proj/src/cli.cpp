#include "ldtsp/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "ldtsp/energy.hpp"
#include "ldtsp/format.hpp"
#include "ldtsp/instance.hpp"
#include "ldtsp/model.hpp"
#include "ldtsp/rng.hpp"
#include "ldtsp/solver.hpp"

namespace fs = std::filesystem;

namespace ldtsp {

namespace {

constexpr const char* kCsvHeader =
    "instance,variant,gamma,alpha,seed,status,cost,bound,gap_pct,nodes,cuts,"
    "lp_iters,wall_s";

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out.flush()) throw std::runtime_error("write failed: " + path);
}

std::string fmt_fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string fmt_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Effective unladen mass factor, whether the instance stored gamma or
/// the unladen mass directly.
double effective_gamma(const Instance& inst) {
  if (inst.gamma) return *inst.gamma;
  const double bar = inst.total_mass();
  return bar > 0.0 ? inst.unladen / bar : 0.0;
}

// ---------------------------------------------------------------------------
// Solve plumbing shared by `solve` and `bench`
// ---------------------------------------------------------------------------

struct CellSpec {
  std::string instance_path;
  std::string variant = "core"; ///< core | baseline1 | baseline2 | astar
  double time_limit = 600.0;
  double gap_tol = 1e-6;
  bool warm_start = true;
  std::int64_t node_limit = 0;
  std::int64_t seed = 0;    ///< bookkeeping label for the CSV row
  bool record_wall = false; ///< real wall seconds in the CSV (off: 0.000)
};

struct CellOutcome {
  std::string status; ///< optimal | feasible_time_limit | no_incumbent | infeasible
  bool has_cost = false;
  double cost = 0.0;
  double bound = 0.0;
  double gap_pct = 0.0;
  std::int64_t nodes = 0;
  std::int64_t cuts = 0;
  std::int64_t lp_iters = 0;
  double wall = 0.0; ///< measured, independent of record_wall
  std::vector<int> tour;
  std::vector<std::pair<double, double>> gap_curve; ///< (t, gap_pct) events
};

ModelVariant variant_from_flag(const std::string& flag) {
  if (flag == "core") return ModelVariant::core_milp;
  if (flag == "baseline1") return ModelVariant::baseline1_milp;
  if (flag == "baseline2") return ModelVariant::baseline2_milp_dfj;
  throw std::invalid_argument("unknown variant: " + flag);
}

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::limit_feasible: return "feasible_time_limit";
    case SolveStatus::limit_no_incumbent: return "no_incumbent";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

int exit_code_for(const std::string& status) {
  if (status == "optimal") return 0;
  if (status == "feasible_time_limit") return 2;
  return 3;
}

/// Runs one solve (B&B variant or the A* benchmark) and normalizes the
/// outcome. `event_line` receives each raw event-log line if non-null.
CellOutcome run_cell(const Instance& inst, const CellSpec& spec, bool suppress_event_time,
                     const std::function<void(const std::string&)>& event_line) {
  CellOutcome o;
  if (spec.variant == "astar") {
    const auto t0 = std::chrono::steady_clock::now();
    AStarReport rep = astar_search(inst);
    o.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.status = "optimal";
    o.has_cost = true;
    o.cost = rep.cost;
    o.bound = rep.cost;
    o.gap_pct = 0.0;
    o.nodes = rep.expanded;
    o.tour = rep.tour.sequence;
    o.gap_curve.push_back({suppress_event_time ? 0.0 : o.wall, 0.0});
    return o;
  }

  SolveConfig cfg;
  cfg.variant = variant_from_flag(spec.variant);
  cfg.time_limit_s = spec.time_limit;
  cfg.gap_tolerance = spec.gap_tol;
  cfg.use_warm_start = spec.warm_start;
  cfg.node_limit = spec.node_limit;
  cfg.suppress_event_time = suppress_event_time;
  cfg.event_sink = [&](const std::string& line) {
    if (event_line) event_line(line);
    double t = 0.0, bound = 0.0, incumbent = 0.0, gap = 0.0;
    long long nodes = 0;
    if (std::sscanf(line.c_str(), "t=%lf nodes=%lld bound=%lf incumbent=%lf gap=%lf", &t,
                    &nodes, &bound, &incumbent, &gap) == 5 &&
        std::isfinite(gap))
      o.gap_curve.push_back({t, gap});
  };

  SolveReport rep = solve(inst, cfg);
  o.status = status_name(rep.status);
  o.has_cost = rep.incumbent.has_value();
  if (o.has_cost) {
    o.cost = rep.incumbent_cost;
    o.tour = rep.incumbent->sequence;
  }
  o.bound = rep.best_bound;
  o.gap_pct = rep.gap_pct;
  o.nodes = rep.nodes;
  o.cuts = rep.cuts;
  o.lp_iters = rep.lp_iterations;
  o.wall = rep.wall_s;
  return o;
}

std::string csv_row(const Instance& inst, const CellSpec& spec, const CellOutcome& o) {
  std::string row = inst.nodes.name;
  row += ',' + spec.variant;
  row += ',' + fmt_shortest(effective_gamma(inst));
  row += ',' + fmt_shortest(inst.alpha);
  row += ',' + std::to_string(spec.seed);
  row += ',' + o.status;
  row += ',';
  if (o.has_cost) row += fmt_shortest(o.cost);
  row += ',';
  if (std::isfinite(o.bound)) row += fmt_shortest(o.bound);
  row += ',';
  row += std::isfinite(o.gap_pct) ? fmt_shortest(o.gap_pct) : "inf";
  row += ',' + std::to_string(o.nodes);
  row += ',' + std::to_string(o.cuts);
  row += ',' + std::to_string(o.lp_iters);
  row += ',' + fmt_fixed3(spec.record_wall ? o.wall : 0.0);
  return row;
}

/// Appends a row, writing the header first when the file is new/empty.
void append_csv(const std::string& path, const std::string& row) {
  bool fresh = true;
  if (fs::exists(path)) {
    std::error_code ec;
    fresh = fs::file_size(path, ec) == 0 || ec;
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (fresh) out << kCsvHeader << '\n';
  out << row << '\n';
  if (!out.flush()) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Native SVG charts
// ---------------------------------------------------------------------------

constexpr int kSvgW = 640;
constexpr int kSvgH = 400;
constexpr int kMarginL = 62, kMarginR = 18, kMarginT = 34, kMarginB = 52;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

void svg_open(std::string& s, const std::string& title) {
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kSvgW) +
       "\" height=\"" + std::to_string(kSvgH) + "\" viewBox=\"0 0 " + std::to_string(kSvgW) +
       ' ' + std::to_string(kSvgH) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(kSvgW / 2) +
       "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
       title + "</text>\n";
}

void svg_axes(std::string& s, const std::string& xlabel, const std::string& ylabel,
              double xmin, double xmax, double ymin, double ymax) {
  const int x0 = kMarginL, x1 = kSvgW - kMarginR;
  const int y0 = kSvgH - kMarginB, y1 = kMarginT;
  s += "<line x1=\"" + std::to_string(x0) + "\" y1=\"" + std::to_string(y0) + "\" x2=\"" +
       std::to_string(x1) + "\" y2=\"" + std::to_string(y0) +
       "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  s += "<line x1=\"" + std::to_string(x0) + "\" y1=\"" + std::to_string(y0) + "\" x2=\"" +
       std::to_string(x0) + "\" y2=\"" + std::to_string(y1) +
       "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xmin + (xmax - xmin) * k / 4.0;
    const double fy = ymin + (ymax - ymin) * k / 4.0;
    const int px = x0 + (x1 - x0) * k / 4;
    const int py = y0 - (y0 - y1) * k / 4;
    s += "<text x=\"" + std::to_string(px) + "\" y=\"" + std::to_string(y0 + 16) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + fmt_g6(fx) +
         "</text>\n";
    s += "<text x=\"" + std::to_string(x0 - 6) + "\" y=\"" + std::to_string(py + 3) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + fmt_g6(fy) +
         "</text>\n";
  }
  s += "<text x=\"" + std::to_string((x0 + x1) / 2) + "\" y=\"" + std::to_string(kSvgH - 14) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + xlabel +
       "</text>\n";
  s += "<text x=\"16\" y=\"" + std::to_string((y0 + y1) / 2) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 "
       "16 " +
       std::to_string((y0 + y1) / 2) + ")\">" + ylabel + "</text>\n";
}

/// Multi-series line chart; axes auto-scale to the data with a zero floor.
std::string render_line_chart(const std::string& title, const std::string& xlabel,
                              const std::string& ylabel, const std::vector<Series>& series) {
  double xmax = 0.0, ymax = 0.0;
  for (const auto& sr : series)
    for (const auto& [px, py] : sr.points) {
      xmax = std::max(xmax, px);
      ymax = std::max(ymax, py);
    }
  if (xmax <= 0.0) xmax = 1.0;
  if (ymax <= 0.0) ymax = 1.0;
  const int x0 = kMarginL, x1 = kSvgW - kMarginR;
  const int y0 = kSvgH - kMarginB, y1 = kMarginT;
  std::string s;
  svg_open(s, title);
  svg_axes(s, xlabel, ylabel, 0.0, xmax, 0.0, ymax);
  int color = 0;
  int legend_y = y1 + 8;
  for (const auto& sr : series) {
    const char* c = kPalette[color % 8];
    ++color;
    if (!sr.points.empty()) {
      std::string pts;
      for (const auto& [px, py] : sr.points) {
        const double sx = x0 + (x1 - x0) * (px / xmax);
        const double sy = y0 - (y0 - y1) * (py / ymax);
        pts += fmt_g6(sx) + "," + fmt_g6(sy) + " ";
      }
      s += "<polyline fill=\"none\" stroke=\"";
      s += c;
      s += "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }
    s += "<rect x=\"" + std::to_string(x1 - 150) + "\" y=\"" + std::to_string(legend_y - 8) +
         "\" width=\"10\" height=\"10\" fill=\"";
    s += c;
    s += "\"/>\n<text x=\"" + std::to_string(x1 - 136) + "\" y=\"" + std::to_string(legend_y) +
         "\" font-family=\"sans-serif\" font-size=\"10\">" + sr.label + "</text>\n";
    legend_y += 14;
  }
  s += "</svg>\n";
  return s;
}

/// Vertical bar chart, one bar per labelled value.
std::string render_bar_chart(const std::string& title, const std::string& xlabel,
                             const std::string& ylabel,
                             const std::vector<std::pair<std::string, double>>& bars) {
  double ymax = 0.0;
  for (const auto& [label, v] : bars) ymax = std::max(ymax, v);
  if (ymax <= 0.0) ymax = 1.0;
  const int x0 = kMarginL, x1 = kSvgW - kMarginR;
  const int y0 = kSvgH - kMarginB, y1 = kMarginT;
  std::string s;
  svg_open(s, title);
  svg_axes(s, xlabel, ylabel, 0.0, static_cast<double>(bars.size()), 0.0, ymax);
  const double slot = static_cast<double>(x1 - x0) / std::max<std::size_t>(bars.size(), 1);
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double h = (y0 - y1) * (bars[i].second / ymax);
    const double bx = x0 + slot * i + slot * 0.15;
    s += "<rect x=\"" + fmt_g6(bx) + "\" y=\"" + fmt_g6(y0 - h) + "\" width=\"" +
         fmt_g6(slot * 0.7) + "\" height=\"" + fmt_g6(h) + "\" fill=\"";
    s += kPalette[i % 8];
    s += "\"/>\n";
    s += "<text x=\"" + fmt_g6(x0 + slot * i + slot * 0.5) + "\" y=\"" +
         std::to_string(y0 + 28) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">" + bars[i].first +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_generate(const std::string& tsplib_path, std::uint64_t seed, double gamma, double alpha,
                 int depot, const std::string& out_path, std::ostream& out) {
  NodeSet nodes = parse_tsplib(slurp(tsplib_path));
  if (depot == 0) depot = nodes.size(); // the last node hosts the depot
  std::vector<double> masses = generate_masses(nodes.size() - 1, seed);
  Instance inst = make_instance(nodes, depot, masses, gamma, alpha);
  spit(out_path, write_instance(inst));
  out << "wrote " << out_path << " (" << inst.n_targets() << " targets, gamma="
      << fmt_shortest(gamma) << ", seed=" << seed << ")\n";
  return 0;
}

int cmd_solve(const CellSpec& spec, bool no_wall_time, const std::string& log_path,
              const std::string& csv_path, std::ostream& out) {
  Instance inst = read_instance(slurp(spec.instance_path));
  std::string log;
  CellOutcome o = run_cell(inst, spec, no_wall_time, [&](const std::string& line) {
    log += line + "\n";
    out << line << '\n';
  });
  const double wall_shown = no_wall_time ? 0.0 : o.wall;
  out << "status=" << o.status;
  out << " cost=" << (o.has_cost ? fmt_shortest(o.cost) : "-");
  out << " bound=" << (std::isfinite(o.bound) ? fmt_shortest(o.bound) : "-");
  out << " gap_pct=" << (std::isfinite(o.gap_pct) ? fmt_shortest(o.gap_pct) : "inf");
  out << " nodes=" << o.nodes << " cuts=" << o.cuts << " lp_iters=" << o.lp_iters
      << " wall_s=" << fmt_fixed3(wall_shown) << '\n';
  if (!o.tour.empty()) {
    out << "tour=";
    for (std::size_t i = 0; i < o.tour.size(); ++i)
      out << (i ? "," : "") << o.tour[i];
    out << '\n';
  }
  if (!log_path.empty()) spit(log_path, log);
  if (!csv_path.empty()) {
    CellSpec row_spec = spec;
    row_spec.record_wall = !no_wall_time;
    append_csv(csv_path, csv_row(inst, row_spec, o));
  }
  return exit_code_for(o.status);
}

int cmd_evaluate(const std::string& instance_path, const std::string& sequence,
                 std::ostream& out, std::ostream& err) {
  Instance inst = read_instance(slurp(instance_path));
  std::vector<int> ids;
  std::stringstream ss(sequence);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      ids.push_back(std::stoi(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      err << "evaluate: bad id '" << tok << "' in --sequence\n";
      return 4;
    }
  }
  std::vector<int> seq;
  seq.push_back(inst.depot);
  seq.insert(seq.end(), ids.begin(), ids.end());
  seq.push_back(inst.depot);
  if (!validate_tour(inst, seq)) {
    err << "evaluate: --sequence must be a permutation of the targets\n";
    return 4;
  }
  auto [tour, cost] = evaluate_tour(inst, ids);
  for (std::size_t k = 0; k + 1 < tour.sequence.size(); ++k) {
    const int a = tour.sequence[k], b = tour.sequence[k + 1];
    const double m = tour.masses[k];
    const double d = inst.dist(a, b);
    out << "leg " << (k + 1) << ": " << a << " -> " << b
        << " depart_mass=" << fmt_shortest(m) << " distance=" << fmt_shortest(d)
        << " energy=" << fmt_shortest(edge_energy(inst.alpha, m, d)) << '\n';
  }
  out << "total_cost=" << fmt_shortest(cost) << '\n';
  return 0;
}

int cmd_export(const std::string& instance_path, const std::string& variant,
               const std::string& format, const std::string& out_path, std::ostream& out) {
  Instance inst = read_instance(slurp(instance_path));
  LinearModel model = variant == "minlp" ? build_minlp(inst)
                                         : build_milp(inst, variant_from_flag(variant));
  const std::string text =
      format == "lp" ? export_lp(model) : export_mps(model, inst.nodes.name);
  spit(out_path, text);
  out << "wrote " << out_path << " (" << model.vars.size() << " variables, "
      << model.constraints.size() << " rows)\n";
  return 0;
}

int cmd_bench(const std::string& manifest_path, const std::string& out_dir, std::ostream& out,
              std::ostream& err) {
  nlohmann::json doc = nlohmann::json::parse(slurp(manifest_path));
  const nlohmann::json& cells = doc.is_array() ? doc : doc.at("cells");
  if (!cells.is_array() || cells.empty())
    throw std::runtime_error("manifest: expected a non-empty cell array");

  const fs::path base = fs::path(manifest_path).parent_path();
  fs::create_directories(out_dir);

  std::string csv = std::string(kCsvHeader) + "\n";
  std::vector<Series> gap_series;
  std::vector<std::pair<std::string, double>> wall_bars;

  for (const auto& cell : cells) {
    CellSpec spec;
    spec.instance_path = cell.at("instance").get<std::string>();
    if (fs::path(spec.instance_path).is_relative())
      spec.instance_path = (base / spec.instance_path).string();
    spec.variant = cell.value("variant", spec.variant);
    spec.time_limit = cell.value("time_limit", spec.time_limit);
    spec.gap_tol = cell.value("gap_tol", spec.gap_tol);
    spec.warm_start = cell.value("warm_start", spec.warm_start);
    spec.node_limit = cell.value("node_limit", spec.node_limit);
    spec.seed = cell.value("seed", spec.seed);
    spec.record_wall = cell.value("record_wall", spec.record_wall);
    try {
      Instance inst = read_instance(slurp(spec.instance_path));
      CellOutcome o = run_cell(inst, spec, false, nullptr);
      csv += csv_row(inst, spec, o) + "\n";
      const std::string label = inst.nodes.name + " g=" + fmt_g6(effective_gamma(inst)) + " " +
                                spec.variant;
      auto curve = o.gap_curve;
      if (o.has_cost && std::isfinite(o.gap_pct)) curve.push_back({o.wall, o.gap_pct});
      gap_series.push_back({label, std::move(curve)});
      wall_bars.push_back({label, o.wall});
      out << label << ": " << o.status << '\n';
    } catch (const std::exception& e) {
      err << "bench cell failed (" << spec.instance_path << "): " << e.what() << '\n';
      csv += fs::path(spec.instance_path).filename().string() + ',' + spec.variant + ",,," +
             std::to_string(spec.seed) + ",error,,,,0,0,0," + fmt_fixed3(0.0) + "\n";
    }
  }

  spit((fs::path(out_dir) / "results.csv").string(), csv);
  spit((fs::path(out_dir) / "gap_vs_time.svg").string(),
       render_line_chart("Optimality gap over time", "wall time [s]", "gap [%]", gap_series));
  spit((fs::path(out_dir) / "time_vs_gamma.svg").string(),
       render_bar_chart("Computation time by cell", "cell", "wall time [s]", wall_bars));
  out << "wrote " << (fs::path(out_dir) / "results.csv").string() << " and 2 charts\n";
  return 0;
}

int cmd_verify_energy(int profiles, std::uint64_t seed, std::ostream& out) {
  SplitMix64 rng(seed);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.next_double(); };
  constexpr double kPi = 3.14159265358979323846;
  double worst = 0.0, worst_still = 0.0;
  for (int k = 0; k < profiles; ++k) {
    HeadingProfile profile;
    profile.duration = uniform(1.0, 6.0);
    const int pieces = 1 + static_cast<int>(rng.next() % 6);
    for (int p = 0; p <= pieces; ++p) {
      const double t = (p == pieces) ? profile.duration : profile.duration * p / pieces;
      profile.samples.push_back({t, uniform(-kPi, kPi)});
    }
    const double dt = profile.duration / 1e4;
    for (DragMode mode : {DragMode::aerodynamic, DragMode::rolling}) {
      DragParams drag;
      drag.mode = mode;
      for (double vw : {0.0, 1.0}) {
        PowerModel pm = build_power_model(drag, 2.0, vw);
        SimResult sim = simulate(pm, profile, {}, dt);
        const double rel = energy_identity_residual(pm, profile, {}, dt) / std::fabs(sim.energy);
        worst = std::max(worst, rel);
        if (vw == 0.0) worst_still = std::max(worst_still, rel);
      }
    }
  }
  const bool pass = worst <= 1e-4 && worst_still <= 1e-12;
  out << "profiles=" << profiles << " max_rel_residual=" << fmt_shortest(worst)
      << " max_rel_residual_still=" << fmt_shortest(worst_still) << " -> "
      << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? 0 : 1;
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact solvers for the load-dependent traveling salesman problem"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Build an instance from a TSPLIB file");
  std::string gen_tsplib, gen_out;
  std::uint64_t gen_seed = 1;
  double gen_gamma = 0.0, gen_alpha = 0.1;
  int gen_depot = 0;
  gen->add_option("tsplib", gen_tsplib, "TSPLIB EUC_2D/GEO file")->required();
  gen->add_option("--seed", gen_seed, "mass-draw seed");
  gen->add_option("--gamma", gen_gamma, "unladen mass factor M / sum(m_t)")->required();
  gen->add_option("--alpha", gen_alpha, "cost scale");
  gen->add_option("--depot", gen_depot, "depot node id (default: last node)");
  gen->add_option("--out", gen_out, "output instance path")->required();

  // solve
  auto* sol = app.add_subcommand("solve", "Run an exact solver on an instance");
  CellSpec spec;
  std::string sol_warm = "on", sol_log, sol_csv;
  bool sol_no_wall = false;
  sol->add_option("instance", spec.instance_path, "native instance file")->required();
  sol->add_option("--variant", spec.variant, "core|baseline1|baseline2|astar")
      ->check(CLI::IsMember({"core", "baseline1", "baseline2", "astar"}));
  sol->add_option("--time-limit", spec.time_limit, "seconds");
  sol->add_option("--gap-tol", spec.gap_tol, "relative optimality gap");
  sol->add_option("--warm-start", sol_warm, "on|off")->check(CLI::IsMember({"on", "off"}));
  sol->add_option("--node-limit", spec.node_limit, "0 = unlimited");
  sol->add_option("--seed", spec.seed, "bookkeeping label for the CSV row");
  sol->add_option("--log", sol_log, "write the event log here");
  sol->add_option("--out-csv", sol_csv, "append a result row here");
  sol->add_flag("--no-wall-time", sol_no_wall,
                "report wall_s=0 and t=0.000 events (reproducible output)");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Cost and mass schedule of a given sequence");
  std::string ev_instance, ev_sequence;
  ev->add_option("instance", ev_instance, "native instance file")->required();
  ev->add_option("--sequence", ev_sequence, "comma-separated target ids")->required();

  // export
  auto* ex = app.add_subcommand("export", "Write the optimization model to a file");
  std::string ex_instance, ex_variant = "core", ex_format = "lp", ex_out;
  ex->add_option("instance", ex_instance, "native instance file")->required();
  ex->add_option("--variant", ex_variant, "core|baseline1|minlp")
      ->check(CLI::IsMember({"core", "baseline1", "minlp"}));
  ex->add_option("--format", ex_format, "lp|mps")->check(CLI::IsMember({"lp", "mps"}));
  ex->add_option("--out", ex_out, "output path")->required();

  // bench
  auto* be = app.add_subcommand("bench", "Run a manifest of solves; emit CSV and SVG charts");
  std::string be_manifest, be_out = "bench_out";
  be->add_option("manifest", be_manifest, "JSON manifest")->required();
  be->add_option("--out-dir", be_out, "output directory");

  // verify-energy
  auto* ve = app.add_subcommand("verify-energy", "Check the energy/time identity numerically");
  int ve_profiles = 100;
  std::uint64_t ve_seed = 1;
  ve->add_option("--profiles", ve_profiles, "number of random heading profiles")
      ->check(CLI::PositiveNumber);
  ve->add_option("--seed", ve_seed, "profile seed");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 4;
  }

  try {
    if (gen->parsed())
      return cmd_generate(gen_tsplib, gen_seed, gen_gamma, gen_alpha, gen_depot, gen_out, out);
    if (sol->parsed()) {
      spec.warm_start = sol_warm == "on";
      return cmd_solve(spec, sol_no_wall, sol_log, sol_csv, out);
    }
    if (ev->parsed()) return cmd_evaluate(ev_instance, ev_sequence, out, err);
    if (ex->parsed()) return cmd_export(ex_instance, ex_variant, ex_format, ex_out, out);
    if (be->parsed()) return cmd_bench(be_manifest, be_out, out, err);
    if (ve->parsed()) return cmd_verify_energy(ve_profiles, ve_seed, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 4;
}

} // namespace ldtsp
