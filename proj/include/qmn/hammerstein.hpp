#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmn/ensemble.hpp"
#include "qmn/noncompactness.hpp"

namespace qmn {

// Scalar profiles used to assemble kernels, forcing terms and test data.
// Indicator boxes score 1/2 exactly on the boundary so that trapezoid
// quadrature of grid-aligned boxes stays second order.
class Profile {
 public:
  enum class Kind { one, gauss, cauchy, indicator, relu, hat };

  static Profile one();
  static Profile gauss();                       // exp(-|x|^2)
  static Profile cauchy();                      // 1 / (1 + |x|^2)
  static Profile indicator(double lo, double hi);
  static Profile relu();                        // max(x0, 0)
  static Profile hat(double center, double radius);

  double operator()(std::span<const double> x) const;
  Kind kind() const { return kind_; }

 private:
  Profile(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  Kind kind_;
  double a_ = 0.0;
  double b_ = 0.0;
};

// Symmetric-argument kernel K(x, y).  Built from a named family or from two
// profiles multiplied across the arguments.
class Kernel {
 public:
  static Kernel gaussian(double amplitude, double rate);
  static Kernel laplace(double amplitude, double rate);
  static Kernel separable(double amplitude, Profile x_profile, Profile y_profile);

  double operator()(std::span<const double> x, std::span<const double> y) const;
  const std::string& name() const { return name_; }

 private:
  Kernel(std::string name,
         std::function<double(std::span<const double>, std::span<const double>)> fn)
      : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string name_;
  std::function<double(std::span<const double>, std::span<const double>)> fn_;
};

// Superposition term N(y, z) acting on nonnegative values z.  `growth_bound`
// maps a radius R to a pointwise bound for N(y, z) over 0 <= z <= R;
// `lipschitz_z`, when declared, bounds |N(y,a) - N(y,b)| / |a - b|.
class Nonlinearity {
 public:
  static Nonlinearity affine(double alpha, double gamma);      // alpha z + gamma
  static Nonlinearity saturating(double gamma);                // gamma z / (1 + z)
  static Nonlinearity sqrt_growth(double gamma);               // gamma sqrt(z)

  double operator()(std::span<const double> y, double z) const;
  double growth_bound(double radius) const;
  std::optional<double> lipschitz_z() const { return lipschitz_z_; }
  const std::string& name() const { return name_; }

 private:
  Nonlinearity(std::string name, std::function<double(double)> fn,
               std::optional<double> lipschitz);
  std::string name_;
  std::function<double(double)> fn_;  // value in z; all families ignore y
  std::optional<double> lipschitz_z_;
};

// Nonnegative functions whose minimum over the ball |x| <= r stays above
// `floor_fraction` times their maximum.
struct Cone {
  double ball_radius;
  double floor_fraction;
};

struct HammersteinProblem {
  GridPtr grid;
  Kernel kernel;
  Nonlinearity nonlinearity;
  Cone cone;
  std::optional<double> radius;  // invariance radius, filled by the solver
};

// One application of the integral operator to a sampled function via tensor
// trapezoid quadrature over the grid.  Requires scalar nonnegative input on
// the problem grid.
SampledFunction apply(const HammersteinProblem& problem, const SampledFunction& f);

// max over nodes x of the quadrature mass  sum_j w_j K(x, y_j).
double sup_integral_norm(const Kernel& kernel, const Grid& grid);

struct ConeCheck {
  bool member;
  double margin;  // min over the ball minus floor_fraction * max; >= 0 inside
};

ConeCheck cone_check(const SampledFunction& f, const Cone& cone);

struct KernelSectionReport {
  double worst_margin;
  std::vector<std::size_t> failing_nodes;
  bool all_pass() const { return failing_nodes.empty(); }
};

// Checks that kernel sections K(x, .) themselves satisfy the cone floor, the
// structural condition that keeps the operator cone-invariant.
KernelSectionReport check_kernel_sections(const HammersteinProblem& problem,
                                          std::span<const std::size_t> sample_nodes);

// Smallest R in the bracketing scan with  max_x sum_j w_j K(x, y_j)
// growth_bound(R) <= R, refined by bisection on the defect.
double solve_invariance_radius(const HammersteinProblem& problem);

struct ContractionRow {
  double chi0_input;
  double chi0_image;
  double ratio;     // image / input; NaN when skipped
  bool skipped;     // degenerate input, chi0 below resolution
};

struct ContractionReport {
  std::vector<ContractionRow> rows;
  double max_ratio;
  bool flagged;  // some usable ratio reached 1
};

using EnsembleSampler = std::function<FunctionEnsemble(std::uint64_t)>;

// Pushes sampled ensembles through the operator and compares the restriction
// gap before and after.  Ratios at or above one flag the problem.
ContractionReport estimate_contraction(const HammersteinProblem& problem,
                                       const EnsembleSampler& sampler,
                                       std::size_t trials, std::uint64_t seed,
                                       const QuasimeasureParams& params);

// Cluster of cone members tight enough that every pair is admitted by the
// deepest restriction level at the smallest eps: scaled bumps s_i * gauss
// plus a small cauchy perturbation, diameters below `spread`.
EnsembleSampler sample_cone_cluster(const HammersteinProblem& problem,
                                    std::size_t members, double base_height,
                                    double spread);

}  // namespace qmn
