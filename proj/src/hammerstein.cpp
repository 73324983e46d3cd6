#include "qmn/hammerstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qmn/errors.hpp"
#include "qmn/geometry.hpp"
#include "qmn/random.hpp"

namespace qmn {

namespace {

double sq_norm(std::span<const double> x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return s;
}

}  // namespace

// --- profiles ---------------------------------------------------------------

Profile Profile::one() { return Profile(Kind::one, 0.0, 0.0); }
Profile Profile::gauss() { return Profile(Kind::gauss, 0.0, 0.0); }
Profile Profile::cauchy() { return Profile(Kind::cauchy, 0.0, 0.0); }

Profile Profile::indicator(double lo, double hi) {
  if (!(lo < hi)) throw ValidationError("indicator profile: lo must be below hi");
  return Profile(Kind::indicator, lo, hi);
}

Profile Profile::relu() { return Profile(Kind::relu, 0.0, 0.0); }

Profile Profile::hat(double center, double radius) {
  if (!(radius > 0.0)) throw ValidationError("hat profile: radius must be positive");
  return Profile(Kind::hat, center, radius);
}

double Profile::operator()(std::span<const double> x) const {
  switch (kind_) {
    case Kind::one:
      return 1.0;
    case Kind::gauss:
      return std::exp(-sq_norm(x));
    case Kind::cauchy:
      return 1.0 / (1.0 + sq_norm(x));
    case Kind::indicator: {
      // Half weight exactly on a face; snap within rounding of the bounds.
      const double tol = 1e-9 * std::max({1.0, std::abs(a_), std::abs(b_)});
      double v = 1.0;
      for (double c : x) {
        if (c < a_ - tol || c > b_ + tol) return 0.0;
        if (std::abs(c - a_) <= tol || std::abs(c - b_) <= tol) v *= 0.5;
      }
      return v;
    }
    case Kind::relu:
      return std::max(x[0], 0.0);
    case Kind::hat: {
      double t = 1.0 - std::abs(x[0] - a_) / b_;
      return std::max(t, 0.0);
    }
  }
  return 0.0;
}

// --- kernels ----------------------------------------------------------------

Kernel Kernel::gaussian(double amplitude, double rate) {
  if (!(amplitude > 0.0) || !(rate > 0.0)) {
    throw ValidationError("gaussian kernel: amplitude and rate must be positive");
  }
  std::ostringstream name;
  name << "gaussian(" << amplitude << "," << rate << ")";
  return Kernel(name.str(), [amplitude, rate](std::span<const double> x,
                                              std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double d = x[i] - y[i];
      s += d * d;
    }
    return amplitude * std::exp(-rate * s);
  });
}

Kernel Kernel::laplace(double amplitude, double rate) {
  if (!(amplitude > 0.0) || !(rate > 0.0)) {
    throw ValidationError("laplace kernel: amplitude and rate must be positive");
  }
  std::ostringstream name;
  name << "laplace(" << amplitude << "," << rate << ")";
  return Kernel(name.str(), [amplitude, rate](std::span<const double> x,
                                              std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
    return amplitude * std::exp(-rate * s);
  });
}

Kernel Kernel::separable(double amplitude, Profile x_profile, Profile y_profile) {
  if (!(amplitude > 0.0)) throw ValidationError("separable kernel: amplitude must be positive");
  return Kernel("separable", [amplitude, x_profile, y_profile](
                                 std::span<const double> x, std::span<const double> y) {
    return amplitude * x_profile(x) * y_profile(y);
  });
}

double Kernel::operator()(std::span<const double> x, std::span<const double> y) const {
  return fn_(x, y);
}

// --- nonlinearities ----------------------------------------------------------

Nonlinearity::Nonlinearity(std::string name, std::function<double(double)> fn,
                           std::optional<double> lipschitz)
    : name_(std::move(name)), fn_(std::move(fn)), lipschitz_z_(lipschitz) {
  // Every family here is nondecreasing in z; spot check the wiring.
  double prev = fn_(0.0);
  for (double z : {0.25, 1.0, 4.0, 16.0}) {
    double cur = fn_(z);
    if (cur < prev - 1e-12) throw ValidationError("nonlinearity must be nondecreasing in z");
    prev = cur;
  }
}

Nonlinearity Nonlinearity::affine(double alpha, double gamma) {
  if (!(alpha >= 0.0) || !(gamma >= 0.0)) {
    throw ValidationError("affine nonlinearity: coefficients must be nonnegative");
  }
  std::ostringstream name;
  name << "affine(" << alpha << "," << gamma << ")";
  return Nonlinearity(name.str(), [alpha, gamma](double z) { return alpha * z + gamma; },
                      alpha);
}

Nonlinearity Nonlinearity::saturating(double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("saturating nonlinearity: gamma must be positive");
  std::ostringstream name;
  name << "saturating(" << gamma << ")";
  return Nonlinearity(name.str(), [gamma](double z) { return gamma * z / (1.0 + z); },
                      gamma);
}

Nonlinearity Nonlinearity::sqrt_growth(double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("sqrt nonlinearity: gamma must be positive");
  std::ostringstream name;
  name << "sqrt(" << gamma << ")";
  return Nonlinearity(name.str(), [gamma](double z) { return gamma * std::sqrt(z); },
                      std::nullopt);
}

double Nonlinearity::operator()(std::span<const double>, double z) const {
  if (!(z >= 0.0)) throw ValidationError("nonlinearity: negative input value");
  return fn_(z);
}

double Nonlinearity::growth_bound(double radius) const {
  if (!(radius >= 0.0)) throw ValidationError("growth bound: negative radius");
  return fn_(radius);  // nondecreasing families peak at the radius
}

// --- operator ----------------------------------------------------------------

namespace {

void require_scalar_on_grid(const HammersteinProblem& problem, const SampledFunction& f) {
  if (!(*f.grid() == *problem.grid)) {
    throw ValidationError("operator input lives on a different grid");
  }
  if (f.codomain_dim() != 1) throw ValidationError("operator input must be scalar valued");
}

}  // namespace

SampledFunction apply(const HammersteinProblem& problem, const SampledFunction& f) {
  require_scalar_on_grid(problem, f);
  const Grid& grid = *problem.grid;
  const std::size_t n = grid.num_nodes();

  std::vector<double> source(n);
  std::vector<double> y(grid.dim());
  for (std::size_t j = 0; j < n; ++j) {
    double z = f.scalar(j);
    if (!(z >= 0.0)) throw ValidationError("operator input must be nonnegative");
    grid.node(j, y);
    source[j] = grid.weight(j) * problem.nonlinearity(y, z);
  }

  std::vector<double> out(n);
  std::vector<double> x(grid.dim());
  for (std::size_t i = 0; i < n; ++i) {
    grid.node(i, x);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      grid.node(j, y);
      acc += source[j] * problem.kernel(x, y);
    }
    out[i] = acc;
  }
  return SampledFunction(problem.grid, 1, std::move(out));
}

double sup_integral_norm(const Kernel& kernel, const Grid& grid) {
  const std::size_t n = grid.num_nodes();
  std::vector<double> x(grid.dim()), y(grid.dim());
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    grid.node(i, x);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      grid.node(j, y);
      acc += grid.weight(j) * kernel(x, y);
    }
    worst = std::max(worst, acc);
  }
  return worst;
}

ConeCheck cone_check(const SampledFunction& f, const Cone& cone) {
  if (!(cone.ball_radius > 0.0)) throw ValidationError("cone: ball radius must be positive");
  if (!(cone.floor_fraction > 0.0 && cone.floor_fraction < 1.0)) {
    throw ValidationError("cone: floor fraction must lie in (0, 1)");
  }
  if (f.codomain_dim() != 1) throw ValidationError("cone check: scalar functions only");

  const Grid& grid = *f.grid();
  double ball_min = std::numeric_limits<double>::infinity();
  double global_max = 0.0;
  bool ball_hit = false;
  for (std::size_t i = 0; i < grid.num_nodes(); ++i) {
    double v = f.scalar(i);
    if (v < 0.0) return {false, v};  // negative values fall outside immediately
    global_max = std::max(global_max, v);
    if (grid.node_norm(i) <= cone.ball_radius + 1e-12) {
      ball_hit = true;
      ball_min = std::min(ball_min, v);
    }
  }
  if (!ball_hit) throw ValidationError("cone check: no grid node inside the ball");
  double margin = ball_min - cone.floor_fraction * global_max;
  return {margin >= 0.0, margin};
}

KernelSectionReport check_kernel_sections(const HammersteinProblem& problem,
                                          std::span<const std::size_t> sample_nodes) {
  const Grid& grid = *problem.grid;
  KernelSectionReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  std::vector<double> y(grid.dim());
  for (std::size_t node : sample_nodes) {
    if (node >= grid.num_nodes()) throw ValidationError("kernel sections: node out of range");
    grid.node(node, y);
    // Section K(., y) sampled over the grid in its first argument.
    auto section = SampledFunction::from_scalar_fn(
        problem.grid,
        [&](std::span<const double> x) { return problem.kernel(x, y); });
    bool nonneg = true;
    for (std::size_t i = 0; i < grid.num_nodes(); ++i) {
      if (section.scalar(i) < 0.0) {
        nonneg = false;
        break;
      }
    }
    if (!nonneg) {
      report.worst_margin = -std::numeric_limits<double>::infinity();
      report.failing_nodes.push_back(node);
      continue;
    }
    ConeCheck check = cone_check(section, problem.cone);
    report.worst_margin = std::min(report.worst_margin, check.margin);
    if (!check.member) report.failing_nodes.push_back(node);
  }
  return report;
}

double solve_invariance_radius(const HammersteinProblem& problem) {
  const double mass = sup_integral_norm(problem.kernel, *problem.grid);
  auto defect = [&](double r) { return mass * problem.nonlinearity.growth_bound(r) - r; };

  // Geometric scan from R = 1 for a sign change of the defect.
  double lo = 1.0, hi = 1.0;
  double d1 = defect(1.0);
  if (d1 > 0.0) {
    // Defect positive: the bound exceeds R, grow until it dips below.
    for (int step = 0; step < 60 && defect(hi) > 0.0; ++step) hi *= 2.0;
    if (defect(hi) > 0.0) throw NumericalError("no invariance radius in scan range");
    lo = hi / 2.0;
  } else {
    // Already invariant at 1; shrink toward the smallest such radius.
    for (int step = 0; step < 60 && defect(lo) <= 0.0; ++step) lo /= 2.0;
    if (defect(lo) <= 0.0) return 0.0;  // invariant arbitrarily close to zero
    hi = lo * 2.0;
  }

  // defect(lo) > 0 >= defect(hi); bisect to the crossing.
  for (int step = 0; step < 200; ++step) {
    double mid = 0.5 * (lo + hi);
    if (std::abs(defect(mid)) <= 1e-10 * std::max(1.0, mid)) return mid;
    if (defect(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ContractionReport estimate_contraction(const HammersteinProblem& problem,
                                       const EnsembleSampler& sampler,
                                       std::size_t trials, std::uint64_t seed,
                                       const QuasimeasureParams& params) {
  if (trials == 0) throw ValidationError("contraction estimate: needs at least one trial");
  params.validate(*problem.grid);

  ContractionReport report;
  report.max_ratio = 0.0;
  report.flagged = false;
  std::size_t usable = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    FunctionEnsemble input = sampler(mix_seed(seed, 0x9e3779b97f4a7c15ull + t));
    double chi_in = extension_defect(input, params).value;

    std::vector<SampledFunction> images;
    images.reserve(input.size());
    for (const auto& m : input.members()) images.push_back(apply(problem, m));
    double chi_out =
        extension_defect(FunctionEnsemble(problem.grid, std::move(images)), params).value;

    ContractionRow row;
    row.chi0_input = chi_in;
    row.chi0_image = chi_out;
    row.skipped = chi_in <= 1e-13;
    row.ratio = row.skipped ? std::numeric_limits<double>::quiet_NaN() : chi_out / chi_in;
    if (!row.skipped) {
      ++usable;
      report.max_ratio = std::max(report.max_ratio, row.ratio);
      if (row.ratio >= 1.0) report.flagged = true;
    }
    report.rows.push_back(row);
  }
  if (usable == 0) {
    throw NumericalError("contraction estimate: every sampled ensemble was degenerate");
  }
  return report;
}

EnsembleSampler sample_cone_cluster(const HammersteinProblem& problem,
                                    std::size_t members, double base_height,
                                    double spread) {
  if (members < 2) throw ValidationError("cone cluster: need at least two members");
  if (!(base_height > 0.0) || !(spread > 0.0) || !(spread < base_height)) {
    throw ValidationError("cone cluster: need 0 < spread < base_height");
  }
  GridPtr grid = problem.grid;
  return [grid, members, base_height, spread](std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<SampledFunction> out;
    out.reserve(members);
    for (std::size_t i = 0; i < members; ++i) {
      // Heights within 0.4 spread and bump admixtures within 0.1 spread
      // keep every pairwise sup distance below 0.9 spread.
      double s = base_height + rng.uniform(-0.4 * spread, 0.4 * spread);
      double u = rng.uniform(0.0, 0.1 * spread);
      out.push_back(SampledFunction::from_scalar_fn(
          grid, [s, u](std::span<const double> x) {
            double n2 = sq_norm(x);
            return s * std::exp(-n2) + u / (1.0 + n2);
          }));
    }
    return FunctionEnsemble(grid, std::move(out));
  };
}

}  // namespace qmn
