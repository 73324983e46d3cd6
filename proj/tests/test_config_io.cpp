#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmn/config.hpp"
#include "qmn/errors.hpp"
#include "qmn/io.hpp"

using nlohmann::ordered_json;

namespace {

ordered_json minimal_config() {
  ordered_json j;
  j["schema"] = qmn::kConfigSchema;
  return j;
}

}  // namespace

TEST_CASE("configs parse with defaults and round trip") {
  auto config = qmn::parse_config(minimal_config());
  CHECK(config.grid.dim == 1);
  CHECK(config.grid.half_width == 2.0);
  CHECK(config.grid.points_per_axis == 201);
  CHECK(config.quasimeasure.k_budget == 1);
  CHECK(config.quasimeasure.delta_schedule.empty());
  CHECK(!config.kernel.has_value());
  CHECK(!config.nonlinearity.has_value());
  CHECK(!config.cone.has_value());
  CHECK(config.solver.tol == 1e-10);
  CHECK(config.solver.spread <= 0.01);  // clusters must stay admitted
  CHECK(config.suite.trials == 100);

  ordered_json j = minimal_config();
  j["grid"]["dim"] = 1;
  j["grid"]["half_width"] = 3.0;
  j["grid"]["points_per_axis"] = 121;
  j["quasimeasure"]["k_budget"] = 2;
  j["quasimeasure"]["eps_schedule"] = {0.2, 0.1};
  j["kernel"]["family"] = "separable";
  j["kernel"]["amplitude"] = 1.5;
  j["kernel"]["x_profile"]["kind"] = "gauss";
  j["kernel"]["y_profile"]["kind"] = "indicator";
  j["kernel"]["y_profile"]["lo"] = 0.0;
  j["kernel"]["y_profile"]["hi"] = 1.0;
  j["nonlinearity"]["family"] = "affine";
  j["nonlinearity"]["alpha"] = 0.25;
  j["cone"]["ball_radius"] = 1.0;
  j["cone"]["floor_fraction"] = 0.2;
  j["solver"]["ensemble_iters"] = 4;
  j["solver"]["probe_nodes"] = {10, 60, 110};
  j["suite"]["trials"] = 25;

  auto parsed = qmn::parse_config(j);
  CHECK(parsed.grid.half_width == 3.0);
  CHECK(parsed.quasimeasure.k_budget == 2);
  CHECK(parsed.quasimeasure.eps_schedule == std::vector<double>{0.2, 0.1});
  REQUIRE(parsed.kernel.has_value());
  CHECK(parsed.kernel->family == "separable");
  CHECK(parsed.kernel->amplitude == 1.5);
  CHECK(parsed.kernel->y_profile.kind == "indicator");
  REQUIRE(parsed.nonlinearity.has_value());
  CHECK(parsed.nonlinearity->alpha == 0.25);
  REQUIRE(parsed.cone.has_value());
  CHECK(parsed.cone->floor_fraction == 0.2);
  CHECK(parsed.solver.probe_nodes == std::vector<std::size_t>{10, 60, 110});
  CHECK(parsed.suite.trials == 25);

  // Serializing and reparsing reaches a fixed point.
  ordered_json once = qmn::config_to_json(parsed);
  ordered_json twice = qmn::config_to_json(qmn::parse_config(once));
  CHECK(once.dump() == twice.dump());
}

TEST_CASE("configs reject unknown keys and bad types") {
  ordered_json j = minimal_config();
  j["grid"]["dims"] = 1;
  CHECK_THROWS_WITH_AS(qmn::parse_config(j),
                       "config: unknown key \"dims\" in grid", qmn::ValidationError);

  j = minimal_config();
  j["typo"] = true;
  CHECK_THROWS_AS(qmn::parse_config(j), qmn::ValidationError);

  j = minimal_config();
  j["grid"]["dim"] = -1;
  CHECK_THROWS_AS(qmn::parse_config(j), qmn::ValidationError);

  j = minimal_config();
  j["quasimeasure"]["delta_schedule"] = "fast";
  CHECK_THROWS_AS(qmn::parse_config(j), qmn::ValidationError);

  j = minimal_config();
  j["solver"]["kappa_informational"] = "yes";
  CHECK_THROWS_AS(qmn::parse_config(j), qmn::ValidationError);

  j = ordered_json::object();
  j["schema"] = "qmn-config/2";
  CHECK_THROWS_AS(qmn::parse_config(j), qmn::ValidationError);
  CHECK_THROWS_AS(qmn::parse_config(ordered_json::object()), qmn::ValidationError);
  CHECK_THROWS_AS(qmn::parse_config(ordered_json::array()), qmn::ValidationError);
}

TEST_CASE("config files load with path-qualified errors") {
  CHECK_THROWS_AS(qmn::load_config("definitely_missing_qmn.json"), qmn::ValidationError);

  const char* path = "qmn_config_io_bad.json";
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(qmn::load_config(path), qmn::ValidationError);
  std::remove(path);

  const char* good = "qmn_config_io_good.json";
  {
    std::ofstream out(good);
    out << minimal_config().dump();
  }
  CHECK_NOTHROW(qmn::load_config(good));
  std::remove(good);
}

TEST_CASE("builders resolve defaults against the grid") {
  auto grid = qmn::build_grid(qmn::GridConfig{1, 2.0, 201});
  qmn::QuasimeasureConfig qc;
  auto params = qmn::build_params(qc, grid);
  const double h = grid->spacing();
  CHECK(params.delta_schedule == std::vector<double>{8.0 * h, 4.0 * h, 2.0 * h, h});
  CHECK(params.eps_schedule == std::vector<double>{0.1, 0.05, 0.02, 0.01});
  REQUIRE(params.saturating.depth() == 4);
  CHECK(params.saturating.level(1).size() == 51);
  CHECK(params.saturating.level(4).size() == 201);

  qc.delta_schedule = {0.5, 0.25};  // does not end at one spacing
  CHECK_THROWS_AS(qmn::build_params(qc, grid), qmn::ValidationError);
  qc.delta_schedule.clear();
  qc.saturating_levels = 0;
  CHECK_THROWS_AS(qmn::build_params(qc, grid), qmn::ValidationError);

  qmn::ProfileSpec bad_profile;
  bad_profile.kind = "bump";
  CHECK_THROWS_AS(qmn::build_profile(bad_profile), qmn::ValidationError);
  qmn::KernelSpec bad_kernel;
  bad_kernel.family = "matern";
  CHECK_THROWS_AS(qmn::build_kernel(bad_kernel), qmn::ValidationError);
  qmn::NonlinearitySpec bad_n;
  bad_n.family = "cubic";
  CHECK_THROWS_AS(qmn::build_nonlinearity(bad_n), qmn::ValidationError);

  qmn::ExperimentConfig empty;
  CHECK_THROWS_AS(qmn::build_problem(empty, grid), qmn::ValidationError);

  qmn::SolverConfig sc;
  auto probes = qmn::resolve_probe_nodes(sc, *grid);
  CHECK(probes == std::vector<std::size_t>{50, 100, 150});
  sc.probe_nodes = {500};
  CHECK_THROWS_AS(qmn::resolve_probe_nodes(sc, *grid), qmn::ValidationError);
}

TEST_CASE("doubles format exactly and round trip") {
  CHECK(qmn::format_double(0.0) == "0");
  CHECK(qmn::format_double(0.5) == "0.5");
  CHECK(qmn::format_double(-2.0) == "-2");
  for (double v : {1.0 / 3.0, 0.1, -1e-300, 1e300, 123456.789, 2.0 / 7.0}) {
    CHECK(std::stod(qmn::format_double(v)) == v);
  }
}

TEST_CASE("ensemble csv round trips byte for byte") {
  auto grid = qmn::make_grid(1, 1.0, 5);
  auto f = qmn::SampledFunction::from_scalar_fn(
      grid, [](std::span<const double> x) { return x[0] / 3.0; });
  auto g = qmn::SampledFunction::from_fn(
      grid, 1, [](std::span<const double> x, std::span<double> out) {
        out[0] = std::sqrt(std::abs(x[0]) + 0.1);
      });
  qmn::FunctionEnsemble ensemble(grid, {f, g});

  std::string text = qmn::ensemble_to_csv(ensemble);
  auto parsed = qmn::ensemble_from_csv_text(text);
  REQUIRE(parsed.size() == 2);
  CHECK(*parsed.grid() == *grid);
  CHECK(parsed.member(0).values() == f.values());
  CHECK(parsed.member(1).values() == g.values());
  CHECK(qmn::ensemble_to_csv(parsed) == text);

  // Vector-valued members keep their node-major layout.
  auto v = qmn::SampledFunction::from_fn(
      grid, 2, [](std::span<const double> x, std::span<double> out) {
        out[0] = x[0];
        out[1] = 1.0 - x[0];
      });
  qmn::FunctionEnsemble vec(grid, {v});
  auto vparsed = qmn::ensemble_from_csv_text(qmn::ensemble_to_csv(vec));
  CHECK(vparsed.codomain_dim() == 2);
  CHECK(vparsed.member(0).values() == v.values());

  // File round trip.
  const char* path = "qmn_io_roundtrip.csv";
  qmn::write_ensemble_csv(path, ensemble);
  auto loaded = qmn::read_ensemble_csv(path);
  CHECK(qmn::ensemble_to_csv(loaded) == text);
  std::remove(path);

  // CRLF input parses to the same ensemble.
  std::string crlf;
  for (char c : text) {
    if (c == '\n') crlf += "\r\n";
    else crlf += c;
  }
  auto relaxed = qmn::ensemble_from_csv_text(crlf);
  CHECK(qmn::ensemble_to_csv(relaxed) == text);
}

TEST_CASE("ensemble csv errors carry row numbers") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      qmn::ensemble_from_csv_text(text);
      FAIL(("expected a parse error mentioning " + needle));
    } catch (const qmn::ValidationError& e) {
      std::string what = e.what();
      CHECK_MESSAGE(what.find(needle) != std::string::npos, what);
    }
  };

  const std::string header = "dim,half_width,points_per_axis,codomain_dim\n";
  const std::string grid_row = "1,1,3,1\n";

  expect_error("dim,half_width\n" + grid_row + "1,2,3\n", "row 1");
  expect_error(header + grid_row, "at least one member");
  expect_error(header + "1,1,3\n" + "1,2,3\n", "row 2: expected 4 grid fields");
  expect_error(header + "1,1,3,0\n" + "1,2,3\n", "codomain_dim must be positive");
  expect_error(header + grid_row + "1,2\n", "row 3: expected 3 values, got 2");
  expect_error(header + grid_row + "1,x,3\n", "row 3");
  expect_error(header + grid_row + "1,x,3\n", "not a number");
  expect_error(header + grid_row + "1,2.0z,3\n", "trailing characters");
  expect_error(header + grid_row + "\n" + "1,2,3\n", "row 3: empty row");
}

TEST_CASE("report serializers keep the field contract") {
  qmn::QuasimeasureReport report;
  report.eta_value = 0.25;
  report.omega0_value = 0.0;
  report.chi0_value = 0.5;
  report.omega_total = 0.75;
  report.omega_table.deltas = {0.2, 0.1};
  report.omega_table.values = {0.3, 0.0};
  report.chi_table.table = {{1, 0.1, 0.5}, {2, 0.1, 0.0}};

  auto j = qmn::measure_to_json(report);
  CHECK(j["eta_value"] == 0.25);
  CHECK(j["omega0_value"] == 0.0);
  CHECK(j["chi0_value"] == 0.5);
  CHECK(j["omega_total"] == 0.75);
  CHECK(j["omega_table"]["deltas"].size() == 2);
  CHECK(j["omega_table"]["values"][1] == 0.0);
  REQUIRE(j["chi_table"].size() == 2);
  CHECK(j["chi_table"][0]["level"] == 1);
  CHECK(j["chi_table"][0]["eps"] == 0.1);
  CHECK(j["chi_table"][0]["value"] == 0.5);

  // Fractions like 0.2 print with their full 17-digit representation, so
  // build the expected rows through the same formatter.
  std::string csv = qmn::measure_to_csv(report);
  CHECK(csv.find("quantity,level,scale,value\n") == 0);
  CHECK(csv.find("eta,,,0.25\n") != std::string::npos);
  CHECK(csv.find("omega,," + qmn::format_double(0.2) + "," + qmn::format_double(0.3) +
                 "\n") != std::string::npos);
  CHECK(csv.find("chi,1," + qmn::format_double(0.1) + ",0.5\n") != std::string::npos);
  CHECK(csv.find("omega_total,,,0.75\n") != std::string::npos);

  qmn::ContractionReport contraction;
  contraction.rows = {{0.1, 0.05, 0.5, false},
                      {0.0, 0.0, std::numeric_limits<double>::quiet_NaN(), true}};
  contraction.max_ratio = 0.5;
  contraction.flagged = false;
  auto cj = qmn::contraction_to_json(contraction);
  CHECK(cj["rows"][0]["ratio"] == 0.5);
  CHECK(cj["rows"][1]["ratio"].is_null());
  CHECK(cj["flagged"] == false);

  qmn::DarboTrace trace;
  trace.probe_nodes = {10};
  trace.steps = {{1, 0.1, 0.0, 0.2, 0.3, 0.05, 0.4, 0.6},
                 {2, 0.05, 0.0, 0.1, 0.15, 0.02, 0.2, 0.0}};
  auto tj = qmn::trace_to_json(trace);
  CHECK(tj["probe_nodes"][0] == 10);
  CHECK(tj["steps"][1]["omega_total"] == 0.15);
  CHECK(tj["steps"][1]["dh_to_final"] == 0.0);
  std::string tcsv = qmn::trace_to_csv(trace);
  CHECK(tcsv.find("step,eta,omega0,chi0,omega_total,kappa,picard_residual,dh_to_final\n") ==
        0);
  CHECK(std::count(tcsv.begin(), tcsv.end(), '\n') == 3);

  qmn::CertificateReport cert{2, 0, 1, 0, true, true};
  auto certj = qmn::certificate_to_json(cert);
  CHECK(certj["steps"] == 2);
  CHECK(certj["kappa_violations"] == 1);
  CHECK(certj["kappa_informational"] == true);
  CHECK(certj["passed"] == true);

  qmn::AxiomSuiteReport axioms;
  axioms.seed = 7;
  axioms.trials = 3;
  axioms.checks = {{"monotone", 0, 1, "", }, {"duplication", 2, 0, "note"}};
  auto aj = qmn::axioms_to_json(axioms);
  CHECK(aj["seed"] == 7);
  CHECK(aj["checks"][0]["passed"] == true);
  CHECK(aj["checks"][1]["passed"] == false);
  CHECK(aj["all_passed"] == false);
  std::string acsv = qmn::axioms_to_csv(axioms);
  CHECK(acsv.find("check,failures,informational,passed\n") == 0);
  CHECK(acsv.find("monotone,0,1,1\n") != std::string::npos);
  CHECK(acsv.find("duplication,2,0,0\n") != std::string::npos);
}
