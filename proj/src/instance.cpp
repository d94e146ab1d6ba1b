#include "ldtsp/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ldtsp/format.hpp"
#include "ldtsp/rng.hpp"

namespace ldtsp {

double Instance::total_mass() const {
  return std::accumulate(masses.begin(), masses.end(), 0.0);
}

std::vector<int> Instance::targets() const {
  std::vector<int> ids;
  ids.reserve(n_targets());
  for (int id = 1; id <= size(); ++id)
    if (id != depot) ids.push_back(id);
  return ids;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Locale-independent numeric parsing (decimal point only).
bool parse_double(const std::string& tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

bool parse_int(const std::string& tok, int& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

[[noreturn]] void fail_at(int line_no, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

void validate(const Instance& inst) {
  const int n = inst.size();
  if (n < 2) throw std::invalid_argument("instance: needs at least 2 nodes");
  if (inst.depot < 1 || inst.depot > n)
    throw std::invalid_argument("instance: depot id out of range");
  if (static_cast<int>(inst.masses.size()) != n)
    throw std::invalid_argument("instance: mass vector size mismatch");
  for (int id = 1; id <= n; ++id) {
    if (id == inst.depot) {
      if (inst.masses[id - 1] != 0.0)
        throw std::invalid_argument("instance: depot must carry no mass entry");
    } else if (!(inst.masses[id - 1] > 0.0)) {
      throw std::invalid_argument("instance: target masses must be strictly positive");
    }
  }
  if (!(inst.alpha > 0.0)) throw std::invalid_argument("instance: alpha must be positive");
  if (inst.unladen < 0.0) throw std::invalid_argument("instance: unladen mass must be nonnegative");
  if (inst.gamma) {
    if (*inst.gamma < 0.0) throw std::invalid_argument("instance: gamma must be nonnegative");
    if (std::fabs(inst.unladen - *inst.gamma * inst.total_mass()) > 1e-9)
      throw std::invalid_argument("instance: recorded gamma inconsistent with unladen mass");
  }
}

} // namespace

NodeSet parse_tsplib(const std::string& text) {
  NodeSet ns;
  std::string ewt;
  int dimension = -1;
  bool saw_name = false, saw_coords = false;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool in_coords = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line == "EOF") break;

    if (in_coords) {
      std::istringstream ls(line);
      std::string t_id, t_x, t_y;
      if (!(ls >> t_id >> t_x >> t_y)) fail_at(line_no, "malformed coordinate line");
      int id;
      double x, y;
      if (!parse_int(t_id, id) || !parse_double(t_x, x) || !parse_double(t_y, y))
        fail_at(line_no, "malformed numeric field in coordinate line");
      ns.coords.push_back(Node{id, x, y});
      if (dimension > 0 && static_cast<int>(ns.coords.size()) == dimension)
        in_coords = false;
      continue;
    }

    auto colon = line.find(':');
    if (colon != std::string::npos) {
      std::string key = trim(line.substr(0, colon));
      std::string val = trim(line.substr(colon + 1));
      if (key == "NAME") {
        ns.name = val;
        saw_name = true;
      } else if (key == "DIMENSION") {
        if (!parse_int(val, dimension) || dimension < 2)
          fail_at(line_no, "bad DIMENSION value");
      } else if (key == "EDGE_WEIGHT_TYPE") {
        ewt = val;
      }
      // TYPE, COMMENT, DISPLAY_DATA_TYPE etc. are ignored.
    } else if (line == "NODE_COORD_SECTION") {
      if (ewt.empty()) fail_at(line_no, "NODE_COORD_SECTION before EDGE_WEIGHT_TYPE");
      in_coords = true;
      saw_coords = true;
    } else {
      fail_at(line_no, "unrecognized line: " + line);
    }
  }

  if (!saw_name) throw std::runtime_error("missing NAME");
  if (dimension < 0) throw std::runtime_error("missing DIMENSION");
  if (!saw_coords) throw std::runtime_error("missing NODE_COORD_SECTION");
  if (ewt == "EUC_2D")
    ns.metric = Metric::euclid_exact;
  else if (ewt == "GEO")
    ns.metric = Metric::geo_tsplib;
  else
    throw std::runtime_error("unsupported EDGE_WEIGHT_TYPE: " + ewt);
  if (static_cast<int>(ns.coords.size()) != dimension)
    fail_at(line_no, "DIMENSION mismatch: header says " + std::to_string(dimension) +
                         ", got " + std::to_string(ns.coords.size()) + " coordinates");
  for (int k = 0; k < ns.size(); ++k)
    if (ns.coords[k].id != k + 1)
      throw std::runtime_error("node ids must be contiguous starting at 1");
  return ns;
}

namespace {

// TSPLIB GEO: coordinates are DDD.MM (degrees and minutes).
double geo_radians(double coord) {
  constexpr double kPi = 3.141592; // the TSPLIB constant, not M_PI
  double deg = std::trunc(coord);
  double min = coord - deg;
  return kPi * (deg + 5.0 * min / 3.0) / 180.0;
}

double geo_distance(const Node& a, const Node& b) {
  constexpr double kRadius = 6378.388;
  const double lat_i = geo_radians(a.x), lon_i = geo_radians(a.y);
  const double lat_j = geo_radians(b.x), lon_j = geo_radians(b.y);
  const double q1 = std::cos(lon_i - lon_j);
  const double q2 = std::cos(lat_i - lat_j);
  const double q3 = std::cos(lat_i + lat_j);
  return std::trunc(kRadius * std::acos(0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)) + 1.0);
}

} // namespace

DistanceMatrix compute_distances(const NodeSet& nodes) {
  const int n = nodes.size();
  DistanceMatrix m;
  m.n = n;
  m.d.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const Node& a = nodes.coords[i - 1];
      const Node& b = nodes.coords[j - 1];
      double v = 0.0;
      switch (nodes.metric) {
      case Metric::euclid_exact:
        v = std::hypot(a.x - b.x, a.y - b.y);
        break;
      case Metric::euclid_tsplib_rounded:
        v = std::floor(std::hypot(a.x - b.x, a.y - b.y) + 0.5);
        break;
      case Metric::geo_tsplib:
        v = geo_distance(a, b);
        break;
      }
      m.at(i, j) = v;
      m.at(j, i) = v;
    }
  }
  return m;
}

std::vector<double> generate_masses(int n_targets, std::uint64_t seed) {
  if (n_targets < 1) throw std::invalid_argument("generate_masses: n_targets must be >= 1");
  SplitMix64 rng(seed);
  std::vector<double> masses(n_targets);
  for (double& m : masses)
    m = 0.1 * static_cast<double>(1 + rng.next_below(10));
  return masses;
}

namespace {

Instance assemble(const NodeSet& nodes, int depot,
                  const std::vector<double>& target_masses, double unladen,
                  std::optional<double> gamma, double alpha) {
  Instance inst;
  inst.nodes = nodes;
  inst.depot = depot;
  const int n = nodes.size();
  if (static_cast<int>(target_masses.size()) != n - 1)
    throw std::invalid_argument("instance: need exactly one mass per non-depot node");
  inst.masses.assign(n, 0.0);
  int k = 0;
  for (int id = 1; id <= n; ++id)
    if (id != depot) inst.masses[id - 1] = target_masses[k++];
  inst.unladen = unladen;
  inst.gamma = gamma;
  inst.alpha = alpha;
  validate(inst);
  inst.dist = compute_distances(nodes);
  return inst;
}

} // namespace

Instance make_instance(const NodeSet& nodes, int depot,
                       const std::vector<double>& target_masses, double gamma,
                       double alpha) {
  if (gamma < 0.0) throw std::invalid_argument("instance: gamma must be nonnegative");
  const double mbar = std::accumulate(target_masses.begin(), target_masses.end(), 0.0);
  return assemble(nodes, depot, target_masses, gamma * mbar, gamma, alpha);
}

Instance make_instance_unladen(const NodeSet& nodes, int depot,
                               const std::vector<double>& target_masses,
                               double unladen, double alpha) {
  return assemble(nodes, depot, target_masses, unladen, std::nullopt, alpha);
}

std::string write_instance(const Instance& inst) {
  std::string out;
  out += "LDTSP 1\n";
  out += "NAME " + inst.nodes.name + "\n";
  out += "DIMENSION " + std::to_string(inst.size()) + "\n";
  switch (inst.nodes.metric) {
  case Metric::euclid_exact: out += "METRIC EUC_2D_EXACT\n"; break;
  case Metric::euclid_tsplib_rounded: out += "METRIC EUC_2D_ROUND\n"; break;
  case Metric::geo_tsplib: out += "METRIC GEO\n"; break;
  }
  out += "DEPOT " + std::to_string(inst.depot) + "\n";
  out += "ALPHA " + fmt_sig17(inst.alpha) + "\n";
  out += "UNLADEN " + fmt_sig17(inst.unladen) + "\n";
  if (inst.gamma) out += "GAMMA " + fmt_sig17(*inst.gamma) + "\n";
  out += "NODE_COORD_SECTION\n";
  for (const Node& nd : inst.nodes.coords)
    out += std::to_string(nd.id) + " " + fmt_sig17(nd.x) + " " + fmt_sig17(nd.y) + "\n";
  out += "MASS_SECTION\n";
  for (int id = 1; id <= inst.size(); ++id)
    if (id != inst.depot)
      out += std::to_string(id) + " " + fmt_sig17(inst.masses[id - 1]) + "\n";
  out += "EOF\n";
  return out;
}

Instance read_instance(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;

  auto next_line = [&](std::string& out) {
    while (std::getline(in, raw)) {
      ++line_no;
      out = trim(raw);
      if (!out.empty()) return true;
    }
    return false;
  };

  std::string line;
  if (!next_line(line) || line != "LDTSP 1")
    throw std::runtime_error("instance file: missing or unsupported LDTSP version header");

  Instance inst;
  int dimension = -1;
  bool have_metric = false, have_depot = false, have_alpha = false, have_unladen = false;
  std::optional<double> gamma;

  // Header key/value lines up to NODE_COORD_SECTION.
  while (true) {
    if (!next_line(line)) throw std::runtime_error("instance file: missing NODE_COORD_SECTION");
    if (line == "NODE_COORD_SECTION") break;
    auto sp = line.find(' ');
    std::string key = sp == std::string::npos ? line : line.substr(0, sp);
    std::string val = sp == std::string::npos ? std::string{} : trim(line.substr(sp + 1));
    if (key == "NAME") {
      inst.nodes.name = val;
    } else if (key == "DIMENSION") {
      if (!parse_int(val, dimension) || dimension < 2) fail_at(line_no, "bad DIMENSION");
    } else if (key == "METRIC") {
      if (val == "EUC_2D_EXACT") inst.nodes.metric = Metric::euclid_exact;
      else if (val == "EUC_2D_ROUND") inst.nodes.metric = Metric::euclid_tsplib_rounded;
      else if (val == "GEO") inst.nodes.metric = Metric::geo_tsplib;
      else fail_at(line_no, "unknown METRIC " + val);
      have_metric = true;
    } else if (key == "DEPOT") {
      if (!parse_int(val, inst.depot)) fail_at(line_no, "bad DEPOT");
      have_depot = true;
    } else if (key == "ALPHA") {
      if (!parse_double(val, inst.alpha)) fail_at(line_no, "bad ALPHA");
      have_alpha = true;
    } else if (key == "UNLADEN") {
      if (!parse_double(val, inst.unladen)) fail_at(line_no, "bad UNLADEN");
      have_unladen = true;
    } else if (key == "GAMMA") {
      double g;
      if (!parse_double(val, g)) fail_at(line_no, "bad GAMMA");
      gamma = g;
    } else {
      fail_at(line_no, "unknown header key " + key);
    }
  }
  if (dimension < 0) throw std::runtime_error("instance file: missing DIMENSION");
  if (!have_metric) throw std::runtime_error("instance file: missing METRIC");
  if (!have_depot) throw std::runtime_error("instance file: missing DEPOT");
  if (!have_alpha) throw std::runtime_error("instance file: missing ALPHA");
  if (!have_unladen) throw std::runtime_error("instance file: missing UNLADEN");

  for (int k = 0; k < dimension; ++k) {
    if (!next_line(line)) throw std::runtime_error("instance file: truncated NODE_COORD_SECTION");
    std::istringstream ls(line);
    std::string t_id, t_x, t_y;
    if (!(ls >> t_id >> t_x >> t_y)) fail_at(line_no, "malformed coordinate line");
    Node nd{};
    if (!parse_int(t_id, nd.id) || !parse_double(t_x, nd.x) || !parse_double(t_y, nd.y))
      fail_at(line_no, "non-numeric coordinate field");
    if (nd.id != k + 1) fail_at(line_no, "node ids must be contiguous starting at 1");
    inst.nodes.coords.push_back(nd);
  }

  if (!next_line(line) || line != "MASS_SECTION")
    throw std::runtime_error("instance file: missing MASS_SECTION");
  inst.masses.assign(dimension, 0.0);
  std::vector<bool> seen(dimension, false);
  for (int k = 0; k < dimension - 1; ++k) {
    if (!next_line(line)) throw std::runtime_error("instance file: truncated MASS_SECTION");
    std::istringstream ls(line);
    std::string t_id, t_m;
    if (!(ls >> t_id >> t_m)) fail_at(line_no, "malformed mass line");
    int id;
    double m;
    if (!parse_int(t_id, id) || !parse_double(t_m, m))
      fail_at(line_no, "non-numeric mass field");
    if (id < 1 || id > dimension) fail_at(line_no, "mass id out of range");
    if (id == inst.depot) fail_at(line_no, "mass entry for the depot");
    if (seen[id - 1]) fail_at(line_no, "duplicate mass entry for node " + std::to_string(id));
    if (!(m > 0.0)) fail_at(line_no, "target mass must be strictly positive");
    seen[id - 1] = true;
    inst.masses[id - 1] = m;
  }
  if (!next_line(line) || line != "EOF")
    throw std::runtime_error("instance file: missing EOF terminator");

  inst.gamma = gamma;
  validate(inst);
  inst.dist = compute_distances(inst.nodes);
  return inst;
}

} // namespace ldtsp
