#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qmn/ensemble.hpp"
#include "qmn/errors.hpp"
#include "qmn/hammerstein.hpp"
#include "qmn/noncompactness.hpp"

namespace qmn {

// Nondecreasing rate function used to certify that a per-step quantity
// contracts: value(step n+1) <= phi(value(step n)) + slack.
class ComparisonFunction {
 public:
  static ComparisonFunction linear(double slope);  // slope in [0, 1)
  // Piecewise linear through (t_i, v_i); linear from the origin below the
  // first knot, clamped above the last.
  static ComparisonFunction tabulated(std::vector<double> ts, std::vector<double> vs);

  double eval(double t) const;
  double iterate(double t, std::size_t n) const;

 private:
  ComparisonFunction() = default;
  bool linear_ = false;
  double slope_ = 0.0;
  std::vector<double> ts_, vs_;
};

struct PicardResult {
  SampledFunction solution;
  std::vector<double> residuals;  // sup distance between consecutive iterates
  bool converged;
  std::size_t iterations;
  // Banach-style distance bound to the true fixed point when the operator
  // declares a usable contraction constant; otherwise the last residual.
  double aposteriori_bound;
};

PicardResult picard_solve(const HammersteinProblem& problem, const SampledFunction& start,
                          double tol, std::size_t max_iter);

// One row of the ensemble iteration trace, indexed from 1.
struct DarboStep {
  std::size_t index;
  double eta;
  double omega0;
  double chi0;
  double omega_total;
  double kappa;            // worst hull defect over the probe nodes
  double picard_residual;  // sup residual of the first member under one step
  double dh_to_final;      // worst probe-cloud Hausdorff distance to the last row
};

struct DarboTrace {
  std::vector<DarboStep> steps;
  std::vector<std::size_t> probe_nodes;
};

// Thrown when the operator fails mid-iteration; carries the rows already
// completed so callers can report how far the run got.
class IterationError : public NumericalError {
 public:
  IterationError(const std::string& what, std::vector<DarboStep> partial)
      : NumericalError(what), partial_steps(std::move(partial)) {}
  std::vector<DarboStep> partial_steps;
};

// Pushes the starting ensemble through the operator `iters - 1` times,
// measuring every intermediate family.  Hull defects are sampled at the
// probe nodes with per-probe seeds held fixed across iterations so that
// consecutive rows are comparable.
DarboTrace ensemble_iterate(const HammersteinProblem& problem,
                            const FunctionEnsemble& start, std::size_t iters,
                            const QuasimeasureParams& params,
                            std::span<const std::size_t> probe_nodes,
                            std::size_t kappa_budget, std::uint64_t seed);

struct CertificateReport {
  std::size_t steps;
  std::size_t omega_violations;
  std::size_t kappa_violations;
  std::size_t lipschitz_violations;
  bool kappa_informational;
  bool passed;
};

// Checks the trace against contraction rates for the noncompactness total
// and the hull defect, plus the stability requirement that the hull defect
// moves at most twice as fast as the probe clouds themselves.
CertificateReport certify(const DarboTrace& trace,
                          const ComparisonFunction& omega_comparison,
                          const ComparisonFunction& kappa_comparison,
                          double slack = 1e-9, bool kappa_informational = false);

}  // namespace qmn
