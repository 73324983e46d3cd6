// Command line front end: measures sampled ensembles, runs the functional
// axiom suite, and drives the integral-operator iteration with its
// contraction certificate.  Outputs are deterministic for a fixed config
// and seed: no timestamps, stable key order, exact decimal formatting.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmn/config.hpp"
#include "qmn/darbo.hpp"
#include "qmn/ensemble.hpp"
#include "qmn/errors.hpp"
#include "qmn/hammerstein.hpp"
#include "qmn/io.hpp"
#include "qmn/noncompactness.hpp"
#include "qmn/random.hpp"

namespace {

using nlohmann::ordered_json;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "json";
  std::uint64_t seed = 1;
};

bool want_json(const CommonOptions& opt) { return opt.format != "csv"; }
bool want_csv(const CommonOptions& opt) { return opt.format != "json"; }

std::string emit(const CommonOptions& opt, const std::string& name,
                 const std::string& content) {
  std::filesystem::create_directories(opt.out_dir);
  std::string path = (std::filesystem::path(opt.out_dir) / name).string();
  qmn::write_text_file(path, content);
  return path;
}

ordered_json report_shell(const char* command, const CommonOptions& opt,
                          const qmn::ExperimentConfig& config) {
  ordered_json root;
  root["schema"] = qmn::kReportSchema;
  root["command"] = command;
  root["seed"] = opt.seed;
  root["config"] = qmn::config_to_json(config);
  return root;
}

void write_report(const CommonOptions& opt, const char* command, ordered_json& root,
                  const std::string& csv_name, const std::string& csv_content) {
  if (want_json(opt)) {
    std::string path = emit(opt, std::string(command) + "_report.json",
                            root.dump(2) + "\n");
    std::cout << "wrote " << path << "\n";
  }
  if (want_csv(opt)) {
    std::string path = emit(opt, csv_name, csv_content);
    std::cout << "wrote " << path << "\n";
  }
}

int run_measure(const CommonOptions& opt, const std::string& ensemble_path) {
  qmn::ExperimentConfig config = qmn::load_config(opt.config_path);
  qmn::FunctionEnsemble ensemble = qmn::read_ensemble_csv(ensemble_path);

  // Geometry comes from the data file; the config grid block is ignored here.
  qmn::GridPtr grid = ensemble.grid();
  qmn::QuasimeasureParams params = qmn::build_params(config.quasimeasure, grid);
  config.quasimeasure.delta_schedule = params.delta_schedule;
  config.quasimeasure.eps_schedule = params.eps_schedule;
  config.grid.dim = grid->dim();
  config.grid.half_width = grid->half_width();
  config.grid.points_per_axis = grid->points_per_axis();

  qmn::QuasimeasureReport report = qmn::quasimeasure(ensemble, params);

  std::cout << "members " << ensemble.size() << "\n";
  std::cout << "eta " << qmn::format_double(report.eta_value) << "\n";
  std::cout << "omega0 " << qmn::format_double(report.omega0_value) << "\n";
  std::cout << "chi0 " << qmn::format_double(report.chi0_value) << "\n";
  std::cout << "omega_total " << qmn::format_double(report.omega_total) << "\n";

  ordered_json root = report_shell("measure", opt, config);
  root["ensemble"] = {{"members", ensemble.size()},
                      {"codomain_dim", ensemble.codomain_dim()}};
  root["report"] = qmn::measure_to_json(report);
  write_report(opt, "measure", root, "measure_report.csv", qmn::measure_to_csv(report));
  return 0;
}

int run_axioms(const CommonOptions& opt, std::size_t trials_override, bool adversarial) {
  qmn::ExperimentConfig config = qmn::load_config(opt.config_path);
  qmn::GridPtr grid = qmn::build_grid(config.grid);
  qmn::QuasimeasureParams params = qmn::build_params(config.quasimeasure, grid);
  config.quasimeasure.delta_schedule = params.delta_schedule;
  config.quasimeasure.eps_schedule = params.eps_schedule;
  std::size_t trials = trials_override ? trials_override : config.suite.trials;
  config.suite.trials = trials;

  qmn::AxiomSuiteReport report = qmn::axiom_suite(params, opt.seed, trials, adversarial);

  for (const auto& check : report.checks) {
    std::cout << "check " << check.id << ": " << (check.passed() ? "pass" : "FAIL")
              << " (" << check.failures << " failures, " << check.informational
              << " informational)\n";
    if (!check.note.empty()) std::cout << "  first: " << check.note << "\n";
  }
  std::cout << "suite: " << (report.all_passed() ? "pass" : "FAIL") << "\n";

  ordered_json root = report_shell("axioms", opt, config);
  root["report"] = qmn::axioms_to_json(report);
  write_report(opt, "axioms", root, "axioms_report.csv", qmn::axioms_to_csv(report));
  return report.all_passed() ? 0 : 1;
}

int run_hammerstein(const CommonOptions& opt) {
  qmn::ExperimentConfig config = qmn::load_config(opt.config_path);
  qmn::GridPtr grid = qmn::build_grid(config.grid);
  qmn::QuasimeasureParams params = qmn::build_params(config.quasimeasure, grid);
  config.quasimeasure.delta_schedule = params.delta_schedule;
  config.quasimeasure.eps_schedule = params.eps_schedule;
  qmn::HammersteinProblem problem = qmn::build_problem(config, grid);
  std::vector<std::size_t> probes = qmn::resolve_probe_nodes(config.solver, *grid);
  config.solver.probe_nodes = probes;
  const qmn::SolverConfig& sc = config.solver;

  double radius = qmn::solve_invariance_radius(problem);
  problem.radius = radius;
  double mass = qmn::sup_integral_norm(problem.kernel, *grid);
  std::cout << "invariance_radius " << qmn::format_double(radius) << "\n";
  std::cout << "sup_integral_norm " << qmn::format_double(mass) << "\n";

  qmn::KernelSectionReport sections = qmn::check_kernel_sections(problem, probes);
  std::cout << "kernel_sections " << (sections.all_pass() ? "pass" : "FAIL")
            << " (worst margin " << qmn::format_double(sections.worst_margin) << ")\n";

  qmn::EnsembleSampler sampler =
      qmn::sample_cone_cluster(problem, sc.members, sc.base_height, sc.spread);
  qmn::ContractionReport contraction = qmn::estimate_contraction(
      problem, sampler, sc.q_trials, qmn::mix_seed(opt.seed, 0x517cc1b727220a95ull),
      params);
  std::cout << "contraction_max_ratio " << qmn::format_double(contraction.max_ratio)
            << (contraction.flagged ? " FLAGGED" : "") << "\n";

  qmn::FunctionEnsemble start =
      sampler(qmn::mix_seed(opt.seed, 0x2545f4914f6cdd1dull));
  qmn::PicardResult picard =
      qmn::picard_solve(problem, start.member(0), sc.tol, sc.max_iter);
  std::cout << "picard " << (picard.converged ? "converged" : "NOT CONVERGED") << " in "
            << picard.iterations << " iterations (bound "
            << qmn::format_double(picard.aposteriori_bound) << ")\n";
  if (!picard.converged) {
    throw qmn::NumericalError("picard: no convergence within the iteration budget");
  }

  qmn::DarboTrace trace = qmn::ensemble_iterate(problem, start, sc.ensemble_iters, params,
                                                probes, sc.kappa_budget, opt.seed);
  qmn::CertificateReport certificate =
      qmn::certify(trace, qmn::ComparisonFunction::linear(sc.omega_slope),
                   qmn::ComparisonFunction::linear(sc.kappa_slope), sc.slack,
                   sc.kappa_informational);
  std::cout << "certificate " << (certificate.passed ? "pass" : "FAIL") << " ("
            << certificate.omega_violations << " omega, "
            << certificate.kappa_violations << " kappa, "
            << certificate.lipschitz_violations << " stability violations)\n";

  ordered_json root = report_shell("hammerstein", opt, config);
  root["invariance_radius"] = radius;
  root["sup_integral_norm"] = mass;
  root["kernel_sections"] = {{"worst_margin", sections.worst_margin},
                             {"failing_nodes", sections.failing_nodes},
                             {"all_pass", sections.all_pass()}};
  root["contraction"] = qmn::contraction_to_json(contraction);
  root["picard"] = qmn::picard_to_json(picard);
  root["trace"] = qmn::trace_to_json(trace);
  root["certificate"] = qmn::certificate_to_json(certificate);
  write_report(opt, "hammerstein", root, "hammerstein_trace.csv",
               qmn::trace_to_csv(trace));

  bool ok = !contraction.flagged && sections.all_pass() && certificate.passed;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noncompactness measurements for grid-sampled function ensembles"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string ensemble_path;
  std::size_t trials_override = 0;
  bool adversarial = false;

  auto add_common = [&](CLI::App* cmd, bool needs_seed) {
    cmd->add_option("--config", opt.config_path, "Config JSON path")->required();
    cmd->add_option("--out", opt.out_dir, "Output directory (default: current)");
    cmd->add_option("--format", opt.format, "Report format: json, csv or both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
    if (needs_seed) cmd->add_option("--seed", opt.seed, "Sampling seed (default: 1)");
  };

  CLI::App* measure = app.add_subcommand(
      "measure", "Measure a sampled ensemble read from CSV");
  add_common(measure, false);
  measure->add_option("--ensemble", ensemble_path, "Ensemble CSV path")->required();

  CLI::App* axioms = app.add_subcommand(
      "axioms", "Run the randomized functional axiom suite");
  add_common(axioms, true);
  axioms->add_option("--trials", trials_override, "Trial count (overrides config)");
  axioms->add_flag("--adversarial", adversarial,
                   "Check a deliberately broken functional instead; must fail");

  CLI::App* hammerstein = app.add_subcommand(
      "hammerstein", "Solve and certify an integral-operator problem");
  add_common(hammerstein, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (measure->parsed()) return run_measure(opt, ensemble_path);
    if (axioms->parsed()) return run_axioms(opt, trials_override, adversarial);
    return run_hammerstein(opt);
  } catch (const qmn::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qmn::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
