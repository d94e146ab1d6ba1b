#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ldtsp/cli.hpp"
#include "ldtsp/instance.hpp"
#include "ldtsp/model.hpp"
#include "ldtsp/oracles.hpp"

using namespace ldtsp;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int c = run_cli(std::move(args), o, e);
  return {c, o.str(), e.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "ldtsp_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_tsplib() {
  const fs::path p = work_dir() / "tiny7.tsp";
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << "NAME : tiny7\nTYPE : TSP\nDIMENSION : 7\nEDGE_WEIGHT_TYPE : EUC_2D\n"
         "NODE_COORD_SECTION\n"
         "1 0.0 0.0\n2 2.0 0.5\n3 1.5 2.0\n4 0.3 1.7\n5 2.2 2.4\n6 0.8 0.9\n7 1.0 1.0\n"
         "EOF\n";
  return p;
}

/// Generates the shared fixture instance (gamma 2) and returns its path.
fs::path fixture_instance() {
  const fs::path tsp = write_tsplib();
  const fs::path out = work_dir() / "tiny7_g2.ldt";
  CliRun r = run({"generate", tsp.string(), "--seed", "3", "--gamma", "2", "--out",
                  out.string()});
  REQUIRE(r.code == 0);
  return out;
}

std::string field_after(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  REQUIRE(pos != std::string::npos);
  auto end = text.find_first_of(" \n", pos + key.size());
  if (end == std::string::npos) end = text.size();
  return text.substr(pos + key.size(), end - pos - key.size());
}

} // namespace

TEST_CASE("help and usage errors") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({}).code == 4);
  CHECK(run({"frobnicate"}).code == 4);
  CHECK(run({"generate", "x.tsp", "--out", "y"}).code == 4); // --gamma missing
}

TEST_CASE("generate is deterministic and records hazmat mode") {
  const fs::path tsp = write_tsplib();
  const fs::path a = work_dir() / "gen_a.ldt";
  const fs::path b = work_dir() / "gen_b.ldt";
  REQUIRE(run({"generate", tsp.string(), "--seed", "1", "--gamma", "10", "--out",
               a.string()}).code == 0);
  REQUIRE(run({"generate", tsp.string(), "--seed", "1", "--gamma", "10", "--out",
               b.string()}).code == 0);
  CHECK(slurp(a) == slurp(b)); // bitwise

  Instance inst = read_instance(slurp(a));
  CHECK(inst.depot == 7); // defaults to the last node
  CHECK(inst.gamma == 10.0);

  const fs::path h = work_dir() / "gen_hazmat.ldt";
  REQUIRE(run({"generate", tsp.string(), "--seed", "1", "--gamma", "0", "--out",
               h.string()}).code == 0);
  CHECK(slurp(h).find("UNLADEN 0\n") != std::string::npos);

  CliRun miss = run({"generate", "no_such_file.tsp", "--gamma", "2", "--out", h.string()});
  CHECK(miss.code == 1);
  CHECK(miss.err.find("no_such_file.tsp") != std::string::npos);
}

TEST_CASE("solve reports the oracle optimum and honors --no-wall-time") {
  const fs::path inst_path = fixture_instance();
  Instance inst = read_instance(slurp(inst_path));
  const double opt = brute_force(inst).cost;

  const fs::path csv1 = work_dir() / "run1.csv";
  const fs::path csv2 = work_dir() / "run2.csv";
  const fs::path log = work_dir() / "events.log";
  fs::remove(csv1);
  fs::remove(csv2);
  std::vector<std::string> base = {"solve",     inst_path.string(), "--variant", "core",
                                   "--gap-tol", "1e-9",             "--no-wall-time"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> v = base;
    v.insert(v.end(), extra.begin(), extra.end());
    return v;
  };

  CliRun r1 = run(with({"--out-csv", csv1.string(), "--log", log.string()}));
  CHECK(r1.code == 0);
  CHECK(r1.out.find("status=optimal") != std::string::npos);
  CHECK(std::stod(field_after(r1.out, " cost=")) == doctest::Approx(opt).epsilon(1e-9));
  CHECK(field_after(r1.out, " wall_s=") == "0.000");

  // Event log: well-formed, timestamps suppressed.
  const std::string events = slurp(log);
  CHECK(events.rfind("t=0.000 nodes=", 0) == 0);

  // CSV: header plus one row, bit-identical across reruns.
  CliRun r2 = run(with({"--out-csv", csv2.string()}));
  CHECK(r2.code == 0);
  const std::string c1 = slurp(csv1);
  CHECK(c1.rfind("instance,variant,gamma,alpha,seed,status,cost,bound,gap_pct,nodes,cuts,"
                 "lp_iters,wall_s\n", 0) == 0);
  CHECK(c1.find("tiny7,core,2,") != std::string::npos);
  CHECK(c1 == slurp(csv2));

  // A second append lands on the same file without a second header.
  CliRun r3 = run(with({"--out-csv", csv1.string()}));
  CHECK(r3.code == 0);
  const std::string appended = slurp(csv1);
  CHECK(std::count(appended.begin(), appended.end(), '\n') == 3);
}

TEST_CASE("solve variants and the A* benchmark agree") {
  const fs::path inst_path = fixture_instance();
  Instance inst = read_instance(slurp(inst_path));
  const double opt = brute_force(inst).cost;
  for (const char* variant : {"baseline1", "baseline2", "astar"}) {
    CliRun r = run({"solve", inst_path.string(), "--variant", variant, "--gap-tol", "1e-9"});
    CHECK(r.code == 0);
    CHECK(std::stod(field_after(r.out, " cost=")) == doctest::Approx(opt).epsilon(1e-9));
  }
}

TEST_CASE("solve exit code distinguishes limit outcomes") {
  const fs::path inst_path = fixture_instance();
  CliRun lim = run({"solve", inst_path.string(), "--node-limit", "1", "--warm-start", "on"});
  CHECK((lim.code == 0 || lim.code == 2)); // tiny trees may finish in one node
  CliRun bare = run({"solve", inst_path.string(), "--node-limit", "1", "--warm-start", "off"});
  CHECK((bare.code == 0 || bare.code == 3));
  if (bare.code == 3) CHECK(bare.out.find("status=no_incumbent") != std::string::npos);
}

TEST_CASE("evaluate prints the mass schedule") {
  const fs::path inst_path = fixture_instance();
  Instance inst = read_instance(slurp(inst_path));
  CliRun fwd = run({"evaluate", inst_path.string(), "--sequence", "1,2,3,4,5,6"});
  REQUIRE(fwd.code == 0);
  auto [tour, cost] = evaluate_tour(inst, {1, 2, 3, 4, 5, 6});
  CHECK(std::stod(field_after(fwd.out, "total_cost=")) == doctest::Approx(cost).epsilon(1e-12));
  CHECK(fwd.out.find("leg 1: 7 -> 1") != std::string::npos);
  CHECK(fwd.out.find("depart_mass=") != std::string::npos);

  CliRun rev = run({"evaluate", inst_path.string(), "--sequence", "6,5,4,3,2,1"});
  REQUIRE(rev.code == 0);
  CHECK(field_after(rev.out, "total_cost=") != field_after(fwd.out, "total_cost="));

  CHECK(run({"evaluate", inst_path.string(), "--sequence", "1,2,3"}).code == 4);
  CHECK(run({"evaluate", inst_path.string(), "--sequence", "1,2,x,4,5,6"}).code == 4);
}

TEST_CASE("evaluate shows a free return leg in hazmat mode") {
  const fs::path tsp = write_tsplib();
  const fs::path h = work_dir() / "eval_hazmat.ldt";
  REQUIRE(run({"generate", tsp.string(), "--seed", "2", "--gamma", "0", "--out",
               h.string()}).code == 0);
  CliRun r = run({"evaluate", h.string(), "--sequence", "1,2,3,4,5,6"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("leg 7: 6 -> 7 depart_mass=0 ") != std::string::npos);
  CHECK(r.out.find("energy=0\n") != std::string::npos);
}

TEST_CASE("export writes deterministic model files") {
  const fs::path inst_path = fixture_instance();
  Instance inst = read_instance(slurp(inst_path));
  const fs::path lp1 = work_dir() / "m1.lp";
  const fs::path lp2 = work_dir() / "m2.lp";
  REQUIRE(run({"export", inst_path.string(), "--variant", "core", "--format", "lp", "--out",
               lp1.string()}).code == 0);
  REQUIRE(run({"export", inst_path.string(), "--variant", "core", "--format", "lp", "--out",
               lp2.string()}).code == 0);
  CHECK(slurp(lp1) == slurp(lp2));
  CHECK(slurp(lp1) == export_lp(build_milp(inst, ModelVariant::core_milp)));

  const fs::path q = work_dir() / "m.minlp.lp";
  REQUIRE(run({"export", inst_path.string(), "--variant", "minlp", "--format", "lp", "--out",
               q.string()}).code == 0);
  CHECK(slurp(q).find("[") != std::string::npos); // bilinear objective block

  const fs::path mps = work_dir() / "m.mps";
  REQUIRE(run({"export", inst_path.string(), "--variant", "baseline1", "--format", "mps",
               "--out", mps.string()}).code == 0);
  CHECK(slurp(mps).rfind("NAME", 0) == 0);

  CHECK(run({"export", inst_path.string(), "--variant", "astar", "--format", "lp", "--out",
             q.string()}).code == 4);
}

TEST_CASE("bench runs a manifest and survives bad cells") {
  const fs::path inst_path = fixture_instance();
  const fs::path tsp = write_tsplib();
  const fs::path g0 = work_dir() / "bench_g0.ldt";
  REQUIRE(run({"generate", tsp.string(), "--seed", "3", "--gamma", "0", "--out",
               g0.string()}).code == 0);

  const fs::path manifest = work_dir() / "manifest.json";
  {
    std::ofstream m(manifest, std::ios::binary | std::ios::trunc);
    m << "{\"cells\":[\n"
      << "{\"instance\":\"" << inst_path.filename().string() << "\",\"variant\":\"core\"},\n"
      << "{\"instance\":\"" << g0.filename().string() << "\",\"variant\":\"astar\"},\n"
      << "{\"instance\":\"missing.ldt\",\"variant\":\"core\"}\n"
      << "]}\n";
  }
  const fs::path out1 = work_dir() / "bench1";
  const fs::path out2 = work_dir() / "bench2";
  CliRun r = run({"bench", manifest.string(), "--out-dir", out1.string()});
  CHECK(r.code == 0);
  CHECK(r.err.find("missing.ldt") != std::string::npos);

  const std::string csv = slurp(out1 / "results.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4); // header + 3 cells
  CHECK(csv.find(",error,") != std::string::npos);
  CHECK(csv.find("tiny7,core,") != std::string::npos);
  CHECK(csv.find(",astar,") != std::string::npos);
  CHECK(slurp(out1 / "gap_vs_time.svg").rfind("<svg", 0) == 0);
  CHECK(slurp(out1 / "time_vs_gamma.svg").rfind("<svg", 0) == 0);

  // Deterministic CSV on a rerun (wall times are not recorded by default).
  REQUIRE(run({"bench", manifest.string(), "--out-dir", out2.string()}).code == 0);
  CHECK(csv == slurp(out2 / "results.csv"));
}

TEST_CASE("verify-energy validates the identity") {
  CliRun r = run({"verify-energy", "--profiles", "25", "--seed", "7"});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(run({"verify-energy", "--profiles", "0"}).code == 4);
}
