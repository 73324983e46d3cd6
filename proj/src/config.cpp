#include "qmn/config.hpp"

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "qmn/errors.hpp"

namespace qmn {

namespace {

using nlohmann::ordered_json;

void check_keys(const ordered_json& obj, const std::string& context,
                const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ValidationError("config: unknown key \"" + item.key() + "\" in " + context);
    }
  }
}

const ordered_json* find(const ordered_json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const ordered_json& obj, const char* key, double fallback,
                  const std::string& context) {
  const ordered_json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) {
    throw ValidationError("config: " + context + "." + key + " must be a number");
  }
  return v->get<double>();
}

// Counts built in process land as signed integers, so accept those too as
// long as they are nonnegative.
bool nonnegative_integer(const ordered_json& v) {
  if (v.is_number_unsigned()) return true;
  return v.is_number_integer() && v.get<std::int64_t>() >= 0;
}

std::size_t get_count(const ordered_json& obj, const char* key, std::size_t fallback,
                      const std::string& context) {
  const ordered_json* v = find(obj, key);
  if (!v) return fallback;
  if (!nonnegative_integer(*v)) {
    throw ValidationError("config: " + context + "." + key +
                          " must be a nonnegative integer");
  }
  return v->get<std::size_t>();
}

bool get_flag(const ordered_json& obj, const char* key, bool fallback,
              const std::string& context) {
  const ordered_json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) {
    throw ValidationError("config: " + context + "." + key + " must be a boolean");
  }
  return v->get<bool>();
}

std::string get_string(const ordered_json& obj, const char* key, std::string fallback,
                       const std::string& context) {
  const ordered_json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) {
    throw ValidationError("config: " + context + "." + key + " must be a string");
  }
  return v->get<std::string>();
}

std::vector<double> get_number_list(const ordered_json& obj, const char* key,
                                    const std::string& context) {
  const ordered_json* v = find(obj, key);
  if (!v) return {};
  if (!v->is_array()) {
    throw ValidationError("config: " + context + "." + key + " must be an array");
  }
  std::vector<double> out;
  for (const auto& e : *v) {
    if (!e.is_number()) {
      throw ValidationError("config: " + context + "." + key + " entries must be numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::size_t> get_count_list(const ordered_json& obj, const char* key,
                                        const std::string& context) {
  const ordered_json* v = find(obj, key);
  if (!v) return {};
  if (!v->is_array()) {
    throw ValidationError("config: " + context + "." + key + " must be an array");
  }
  std::vector<std::size_t> out;
  for (const auto& e : *v) {
    if (!nonnegative_integer(e)) {
      throw ValidationError("config: " + context + "." + key +
                            " entries must be nonnegative integers");
    }
    out.push_back(e.get<std::size_t>());
  }
  return out;
}

ProfileSpec parse_profile(const ordered_json& obj, const std::string& context) {
  if (!obj.is_object()) throw ValidationError("config: " + context + " must be an object");
  check_keys(obj, context, {"kind", "lo", "hi", "center", "radius"});
  ProfileSpec spec;
  spec.kind = get_string(obj, "kind", spec.kind, context);
  spec.lo = get_number(obj, "lo", spec.lo, context);
  spec.hi = get_number(obj, "hi", spec.hi, context);
  spec.center = get_number(obj, "center", spec.center, context);
  spec.radius = get_number(obj, "radius", spec.radius, context);
  return spec;
}

ordered_json profile_to_json(const ProfileSpec& spec) {
  ordered_json obj;
  obj["kind"] = spec.kind;
  if (spec.kind == "indicator") {
    obj["lo"] = spec.lo;
    obj["hi"] = spec.hi;
  } else if (spec.kind == "hat") {
    obj["center"] = spec.center;
    obj["radius"] = spec.radius;
  }
  return obj;
}

}  // namespace

ExperimentConfig parse_config(const ordered_json& root) {
  if (!root.is_object()) throw ValidationError("config: root must be an object");
  check_keys(root, "root",
             {"schema", "grid", "quasimeasure", "kernel", "nonlinearity", "cone",
              "solver", "suite"});
  std::string schema = get_string(root, "schema", "", "root");
  if (schema != kConfigSchema) {
    throw ValidationError(std::string("config: schema must be \"") + kConfigSchema + "\"");
  }

  ExperimentConfig config;
  if (const ordered_json* grid = find(root, "grid")) {
    check_keys(*grid, "grid", {"dim", "half_width", "points_per_axis"});
    config.grid.dim = get_count(*grid, "dim", config.grid.dim, "grid");
    config.grid.half_width = get_number(*grid, "half_width", config.grid.half_width, "grid");
    config.grid.points_per_axis =
        get_count(*grid, "points_per_axis", config.grid.points_per_axis, "grid");
  }
  if (const ordered_json* q = find(root, "quasimeasure")) {
    check_keys(*q, "quasimeasure",
               {"k_budget", "delta_schedule", "eps_schedule", "exhaustive_cap",
                "saturating_levels"});
    config.quasimeasure.k_budget =
        get_count(*q, "k_budget", config.quasimeasure.k_budget, "quasimeasure");
    config.quasimeasure.delta_schedule =
        get_number_list(*q, "delta_schedule", "quasimeasure");
    config.quasimeasure.eps_schedule = get_number_list(*q, "eps_schedule", "quasimeasure");
    config.quasimeasure.exhaustive_cap =
        get_count(*q, "exhaustive_cap", config.quasimeasure.exhaustive_cap, "quasimeasure");
    config.quasimeasure.saturating_levels = get_count(
        *q, "saturating_levels", config.quasimeasure.saturating_levels, "quasimeasure");
  }
  if (const ordered_json* k = find(root, "kernel")) {
    check_keys(*k, "kernel", {"family", "amplitude", "rate", "x_profile", "y_profile"});
    KernelSpec spec;
    spec.family = get_string(*k, "family", spec.family, "kernel");
    spec.amplitude = get_number(*k, "amplitude", spec.amplitude, "kernel");
    spec.rate = get_number(*k, "rate", spec.rate, "kernel");
    if (const ordered_json* p = find(*k, "x_profile")) {
      spec.x_profile = parse_profile(*p, "kernel.x_profile");
    }
    if (const ordered_json* p = find(*k, "y_profile")) {
      spec.y_profile = parse_profile(*p, "kernel.y_profile");
    }
    config.kernel = spec;
  }
  if (const ordered_json* n = find(root, "nonlinearity")) {
    check_keys(*n, "nonlinearity", {"family", "alpha", "gamma"});
    NonlinearitySpec spec;
    spec.family = get_string(*n, "family", spec.family, "nonlinearity");
    spec.alpha = get_number(*n, "alpha", spec.alpha, "nonlinearity");
    spec.gamma = get_number(*n, "gamma", spec.gamma, "nonlinearity");
    config.nonlinearity = spec;
  }
  if (const ordered_json* c = find(root, "cone")) {
    check_keys(*c, "cone", {"ball_radius", "floor_fraction"});
    Cone cone{};
    cone.ball_radius = get_number(*c, "ball_radius", 1.0, "cone");
    cone.floor_fraction = get_number(*c, "floor_fraction", 0.2, "cone");
    config.cone = cone;
  }
  if (const ordered_json* s = find(root, "solver")) {
    check_keys(*s, "solver",
               {"tol", "max_iter", "ensemble_iters", "members", "base_height", "spread",
                "kappa_budget", "probe_nodes", "omega_slope", "kappa_slope", "slack",
                "kappa_informational", "q_trials"});
    SolverConfig& sc = config.solver;
    sc.tol = get_number(*s, "tol", sc.tol, "solver");
    sc.max_iter = get_count(*s, "max_iter", sc.max_iter, "solver");
    sc.ensemble_iters = get_count(*s, "ensemble_iters", sc.ensemble_iters, "solver");
    sc.members = get_count(*s, "members", sc.members, "solver");
    sc.base_height = get_number(*s, "base_height", sc.base_height, "solver");
    sc.spread = get_number(*s, "spread", sc.spread, "solver");
    sc.kappa_budget = get_count(*s, "kappa_budget", sc.kappa_budget, "solver");
    sc.probe_nodes = get_count_list(*s, "probe_nodes", "solver");
    sc.omega_slope = get_number(*s, "omega_slope", sc.omega_slope, "solver");
    sc.kappa_slope = get_number(*s, "kappa_slope", sc.kappa_slope, "solver");
    sc.slack = get_number(*s, "slack", sc.slack, "solver");
    sc.kappa_informational =
        get_flag(*s, "kappa_informational", sc.kappa_informational, "solver");
    sc.q_trials = get_count(*s, "q_trials", sc.q_trials, "solver");
  }
  if (const ordered_json* s = find(root, "suite")) {
    check_keys(*s, "suite", {"trials"});
    config.suite.trials = get_count(*s, "trials", config.suite.trials, "suite");
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  ordered_json root;
  try {
    in >> root;
  } catch (const std::exception& e) {
    throw ValidationError("config: " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(root);
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& config) {
  ordered_json root;
  root["schema"] = kConfigSchema;
  root["grid"] = {{"dim", config.grid.dim},
                  {"half_width", config.grid.half_width},
                  {"points_per_axis", config.grid.points_per_axis}};
  root["quasimeasure"] = {{"k_budget", config.quasimeasure.k_budget},
                          {"delta_schedule", config.quasimeasure.delta_schedule},
                          {"eps_schedule", config.quasimeasure.eps_schedule},
                          {"exhaustive_cap", config.quasimeasure.exhaustive_cap},
                          {"saturating_levels", config.quasimeasure.saturating_levels}};
  if (config.kernel) {
    ordered_json k;
    k["family"] = config.kernel->family;
    k["amplitude"] = config.kernel->amplitude;
    if (config.kernel->family == "separable") {
      k["x_profile"] = profile_to_json(config.kernel->x_profile);
      k["y_profile"] = profile_to_json(config.kernel->y_profile);
    } else {
      k["rate"] = config.kernel->rate;
    }
    root["kernel"] = k;
  }
  if (config.nonlinearity) {
    ordered_json n;
    n["family"] = config.nonlinearity->family;
    if (config.nonlinearity->family == "affine") n["alpha"] = config.nonlinearity->alpha;
    n["gamma"] = config.nonlinearity->gamma;
    root["nonlinearity"] = n;
  }
  if (config.cone) {
    root["cone"] = {{"ball_radius", config.cone->ball_radius},
                    {"floor_fraction", config.cone->floor_fraction}};
  }
  root["solver"] = {{"tol", config.solver.tol},
                    {"max_iter", config.solver.max_iter},
                    {"ensemble_iters", config.solver.ensemble_iters},
                    {"members", config.solver.members},
                    {"base_height", config.solver.base_height},
                    {"spread", config.solver.spread},
                    {"kappa_budget", config.solver.kappa_budget},
                    {"probe_nodes", config.solver.probe_nodes},
                    {"omega_slope", config.solver.omega_slope},
                    {"kappa_slope", config.solver.kappa_slope},
                    {"slack", config.solver.slack},
                    {"kappa_informational", config.solver.kappa_informational},
                    {"q_trials", config.solver.q_trials}};
  root["suite"] = {{"trials", config.suite.trials}};
  return root;
}

GridPtr build_grid(const GridConfig& config) {
  return make_grid(config.dim, config.half_width, config.points_per_axis);
}

QuasimeasureParams build_params(const QuasimeasureConfig& config, const GridPtr& grid) {
  QuasimeasureParams params;
  params.k_budget = config.k_budget;
  params.exhaustive_cap = config.exhaustive_cap;
  const double h = grid->spacing();
  params.delta_schedule = config.delta_schedule;
  if (params.delta_schedule.empty()) {
    params.delta_schedule = {8.0 * h, 4.0 * h, 2.0 * h, h};
  }
  params.eps_schedule = config.eps_schedule;
  if (params.eps_schedule.empty()) {
    params.eps_schedule = {0.1, 0.05, 0.02, 0.01};
  }
  params.saturating = make_saturating(grid, config.saturating_levels);
  params.validate(*grid);
  return params;
}

Profile build_profile(const ProfileSpec& spec) {
  if (spec.kind == "one") return Profile::one();
  if (spec.kind == "gauss") return Profile::gauss();
  if (spec.kind == "cauchy") return Profile::cauchy();
  if (spec.kind == "indicator") return Profile::indicator(spec.lo, spec.hi);
  if (spec.kind == "relu") return Profile::relu();
  if (spec.kind == "hat") return Profile::hat(spec.center, spec.radius);
  throw ValidationError("config: unknown profile kind \"" + spec.kind + "\"");
}

Kernel build_kernel(const KernelSpec& spec) {
  if (spec.family == "gaussian") return Kernel::gaussian(spec.amplitude, spec.rate);
  if (spec.family == "laplace") return Kernel::laplace(spec.amplitude, spec.rate);
  if (spec.family == "separable") {
    return Kernel::separable(spec.amplitude, build_profile(spec.x_profile),
                             build_profile(spec.y_profile));
  }
  throw ValidationError("config: unknown kernel family \"" + spec.family + "\"");
}

Nonlinearity build_nonlinearity(const NonlinearitySpec& spec) {
  if (spec.family == "affine") return Nonlinearity::affine(spec.alpha, spec.gamma);
  if (spec.family == "saturating") return Nonlinearity::saturating(spec.gamma);
  if (spec.family == "sqrt") return Nonlinearity::sqrt_growth(spec.gamma);
  throw ValidationError("config: unknown nonlinearity family \"" + spec.family + "\"");
}

HammersteinProblem build_problem(const ExperimentConfig& config, const GridPtr& grid) {
  if (!config.kernel) throw ValidationError("config: kernel block required");
  if (!config.nonlinearity) throw ValidationError("config: nonlinearity block required");
  if (!config.cone) throw ValidationError("config: cone block required");
  return HammersteinProblem{grid, build_kernel(*config.kernel),
                            build_nonlinearity(*config.nonlinearity), *config.cone,
                            std::nullopt};
}

std::vector<std::size_t> resolve_probe_nodes(const SolverConfig& config, const Grid& grid) {
  std::vector<std::size_t> probes = config.probe_nodes;
  if (probes.empty()) {
    std::size_t n = grid.num_nodes();
    probes = {n / 4, n / 2, (3 * n) / 4};
  }
  for (std::size_t p : probes) {
    if (p >= grid.num_nodes()) {
      throw ValidationError("config: probe node " + std::to_string(p) + " out of range");
    }
  }
  return probes;
}

}  // namespace qmn
