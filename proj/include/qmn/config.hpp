#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmn/ensemble.hpp"
#include "qmn/hammerstein.hpp"
#include "qmn/noncompactness.hpp"

namespace qmn {

inline constexpr const char* kConfigSchema = "qmn-config/1";
inline constexpr const char* kReportSchema = "qmn-report/1";

struct GridConfig {
  std::size_t dim = 1;
  double half_width = 2.0;
  std::size_t points_per_axis = 201;
};

struct QuasimeasureConfig {
  std::size_t k_budget = 1;
  std::vector<double> delta_schedule;  // empty: {8h, 4h, 2h, h}
  std::vector<double> eps_schedule;    // empty: {0.1, 0.05, 0.02, 0.01}
  std::size_t exhaustive_cap = 14;
  std::size_t saturating_levels = 4;
};

struct ProfileSpec {
  std::string kind = "one";  // one | gauss | cauchy | indicator | relu | hat
  double lo = 0.0;
  double hi = 1.0;
  double center = 0.0;
  double radius = 1.0;
};

struct KernelSpec {
  std::string family = "gaussian";  // gaussian | laplace | separable
  double amplitude = 1.0;
  double rate = 1.0;
  ProfileSpec x_profile;
  ProfileSpec y_profile;
};

struct NonlinearitySpec {
  std::string family = "affine";  // affine | saturating | sqrt
  double alpha = 0.5;
  double gamma = 1.0;
};

struct SolverConfig {
  double tol = 1e-10;
  std::size_t max_iter = 200;
  std::size_t ensemble_iters = 6;
  std::size_t members = 6;
  double base_height = 1.0;
  // Keep at or below the smallest eps so sampled clusters stay admitted
  // by the deepest restriction level.
  double spread = 0.008;
  std::size_t kappa_budget = 64;
  std::vector<std::size_t> probe_nodes;  // empty: {n/4, n/2, 3n/4}
  double omega_slope = 0.5;
  double kappa_slope = 0.5;
  double slack = 1e-9;
  bool kappa_informational = false;
  std::size_t q_trials = 5;
};

struct SuiteConfig {
  std::size_t trials = 100;
};

struct ExperimentConfig {
  GridConfig grid;
  QuasimeasureConfig quasimeasure;
  std::optional<KernelSpec> kernel;
  std::optional<NonlinearitySpec> nonlinearity;
  std::optional<Cone> cone;
  SolverConfig solver;
  SuiteConfig suite;
};

ExperimentConfig parse_config(const nlohmann::ordered_json& root);
ExperimentConfig load_config(const std::string& path);
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

GridPtr build_grid(const GridConfig& config);
QuasimeasureParams build_params(const QuasimeasureConfig& config, const GridPtr& grid);
Profile build_profile(const ProfileSpec& spec);
Kernel build_kernel(const KernelSpec& spec);
Nonlinearity build_nonlinearity(const NonlinearitySpec& spec);

// Requires kernel, nonlinearity and cone blocks to be present.
HammersteinProblem build_problem(const ExperimentConfig& config, const GridPtr& grid);

// Probe nodes resolved against the grid, defaulting to the quartile nodes.
std::vector<std::size_t> resolve_probe_nodes(const SolverConfig& config, const Grid& grid);

}  // namespace qmn
