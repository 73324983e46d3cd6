// Exit-code and console contract of the command line tool, driven through
// the real binary.  Each case states the observable it pins.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "qmn/config.hpp"
#include "qmn/ensemble.hpp"
#include "qmn/io.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string g_qmn_path;
fs::path g_root;
int g_failures = 0;

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args, const std::string& tag) {
  fs::path log = g_root / (tag + ".log");
  std::string cmd = "\"" + g_qmn_path + "\" " + args + " > " + log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  RunResult result;
  if (status != -1 && WIFEXITED(status)) result.code = WEXITSTATUS(status);
  std::ifstream in(log, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  result.output = buf.str();
  return result;
}

void expect(bool ok, const std::string& what) {
  std::printf("%s: %s\n", ok ? "pass" : "FAIL", what.c_str());
  if (!ok) ++g_failures;
}

void expect_run(const RunResult& r, int code, const std::string& needle,
                const std::string& what) {
  bool ok = r.code == code && r.output.find(needle) != std::string::npos;
  expect(ok, what);
  if (!ok) {
    std::printf("  exit %d (wanted %d), output:\n%s", r.code, code, r.output.c_str());
  }
}

void write_json(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

ordered_json base_solver_config() {
  ordered_json j;
  j["schema"] = qmn::kConfigSchema;
  j["grid"] = {{"dim", 1}, {"half_width", 2.0}, {"points_per_axis", 101}};
  j["kernel"] = {{"family", "separable"},
                 {"amplitude", 1.0},
                 {"x_profile", {{"kind", "gauss"}}},
                 {"y_profile", {{"kind", "indicator"}, {"lo", 0.0}, {"hi", 1.0}}}};
  j["nonlinearity"] = {{"family", "affine"}, {"alpha", 0.5}, {"gamma", 1.0}};
  j["cone"] = {{"ball_radius", 1.0}, {"floor_fraction", 0.2}};
  j["solver"] = {{"tol", 1e-10},      {"max_iter", 100},    {"ensemble_iters", 5},
                 {"members", 6},      {"base_height", 1.0}, {"spread", 0.008},
                 {"kappa_budget", 64}, {"omega_slope", 0.7}, {"kappa_slope", 0.7},
                 {"q_trials", 3}};
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_integration <path-to-qmn-binary>\n");
    return 2;
  }
  g_qmn_path = argv[1];
  g_root = "cli_tmp";
  fs::remove_all(g_root);
  fs::create_directories(g_root);

  // Help succeeds, a missing subcommand is a usage error.
  expect_run(run_cli("--help", "help"), 0, "measure", "--help exits 0 and lists commands");
  expect(run_cli("", "noargs").code == 2, "missing subcommand exits 2");

  // Config with an unknown key is rejected before any work happens.
  {
    ordered_json j;
    j["schema"] = qmn::kConfigSchema;
    j["gird"] = ordered_json::object();
    write_json(g_root / "typo.json", j);
    expect_run(run_cli("axioms --config " + (g_root / "typo.json").string(),
                       "typo"),
               2, "unknown key", "unknown config key exits 2 and names the key");
  }

  // Malformed ensemble rows are reported with their row number.
  {
    ordered_json j;
    j["schema"] = qmn::kConfigSchema;
    write_json(g_root / "measure.json", j);
    std::ofstream csv(g_root / "bad.csv");
    csv << "dim,half_width,points_per_axis,codomain_dim\n"
        << "1,1,3,1\n"
        << "1,2,3\n"
        << "0,0\n";
    csv.close();
    expect_run(run_cli("measure --config " + (g_root / "measure.json").string() +
                           " --ensemble " + (g_root / "bad.csv").string(),
                       "badcsv"),
               2, "row 4", "malformed ensemble CSV exits 2 and names the row");
  }

  // A well-formed measurement run prints the combined value and writes
  // exactly the formats asked for.
  {
    qmn::GridPtr grid = qmn::make_grid(1, 2.0, 41);
    std::vector<qmn::SampledFunction> members;
    for (double scale : {1.0, 1.01}) {
      members.push_back(qmn::SampledFunction::from_scalar_fn(
          grid, [scale](std::span<const double> x) {
            return scale * std::exp(-x[0] * x[0]);
          }));
    }
    qmn::write_ensemble_csv((g_root / "ensemble.csv").string(),
                            qmn::FunctionEnsemble(grid, std::move(members)));
    auto r = run_cli("measure --config " + (g_root / "measure.json").string() +
                         " --ensemble " + (g_root / "ensemble.csv").string() +
                         " --format csv --out " + (g_root / "m1").string(),
                     "measure");
    expect_run(r, 0, "omega_total", "measure exits 0 and prints the combined value");
    expect(fs::exists(g_root / "m1" / "measure_report.csv") &&
               !fs::exists(g_root / "m1" / "measure_report.json"),
           "--format csv writes the CSV report only");
  }

  // The axiom suite passes honestly and catches the rigged functional.
  {
    ordered_json j;
    j["schema"] = qmn::kConfigSchema;
    j["grid"] = {{"dim", 1}, {"half_width", 2.0}, {"points_per_axis", 41}};
    j["suite"] = {{"trials", 10}};
    write_json(g_root / "axioms.json", j);
    std::string base = "axioms --config " + (g_root / "axioms.json").string() +
                       " --seed 5 --out " + (g_root / "ax").string();
    expect_run(run_cli(base, "axioms"), 0, "suite: pass", "axiom suite exits 0");
    expect_run(run_cli(base + " --adversarial", "adversarial"), 1, "suite: FAIL",
               "adversarial axiom run exits 1");
  }

  // Solver: the happy path certifies and exits 0.
  {
    write_json(g_root / "happy.json", base_solver_config());
    auto r = run_cli("hammerstein --config " + (g_root / "happy.json").string() +
                         " --seed 11 --out " + (g_root / "happy").string(),
                     "happy");
    expect_run(r, 0, "certificate pass", "contractive solver run certifies and exits 0");
    expect(fs::exists(g_root / "happy" / "hammerstein_report.json"),
           "solver run writes its JSON report");
  }

  // Solver: growth too strong for the kernel mass, so no invariant radius
  // brackets and the run stops with a numerical error.
  {
    ordered_json j = base_solver_config();
    j["nonlinearity"]["alpha"] = 1.2;
    write_json(g_root / "steep.json", j);
    expect_run(run_cli("hammerstein --config " + (g_root / "steep.json").string() +
                           " --seed 11 --out " + (g_root / "steep").string(),
                       "steep"),
               3, "no invariance radius", "unbracketable radius exits 3");
  }

  // Solver: square-root growth near zero expands small clusters, so the
  // empirical contraction probe flags the problem and the run exits 1.
  {
    ordered_json j = base_solver_config();
    j["nonlinearity"] = {{"family", "sqrt"}, {"gamma", 1.0}};
    j["solver"]["base_height"] = 0.01;
    j["solver"]["spread"] = 0.002;
    j["solver"]["ensemble_iters"] = 4;
    j["solver"]["members"] = 4;
    write_json(g_root / "steep_origin.json", j);
    expect_run(run_cli("hammerstein --config " +
                           (g_root / "steep_origin.json").string() + " --seed 11 --out " +
                           (g_root / "flagged").string(),
                       "flagged"),
               1, "FLAGGED", "expansive low clusters are flagged and exit 1");
  }

  if (g_failures) {
    std::printf("%d case(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all cases passed\n");
  return 0;
}
