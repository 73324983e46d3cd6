#include "qmn/darbo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qmn/geometry.hpp"
#include "qmn/random.hpp"

namespace qmn {

ComparisonFunction ComparisonFunction::linear(double slope) {
  if (!(slope >= 0.0 && slope < 1.0)) {
    throw ValidationError("comparison function: linear slope must lie in [0, 1)");
  }
  ComparisonFunction c;
  c.linear_ = true;
  c.slope_ = slope;
  return c;
}

ComparisonFunction ComparisonFunction::tabulated(std::vector<double> ts,
                                                 std::vector<double> vs) {
  if (ts.empty() || ts.size() != vs.size()) {
    throw ValidationError("comparison function: table needs matching nonempty columns");
  }
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] > 0.0)) throw ValidationError("comparison function: knots must be positive");
    if (!(vs[i] >= 0.0)) throw ValidationError("comparison function: values must be nonnegative");
    if (i > 0 && !(ts[i] > ts[i - 1])) {
      throw ValidationError("comparison function: knots must be strictly increasing");
    }
    if (i > 0 && vs[i] < vs[i - 1]) {
      throw ValidationError("comparison function: values must be nondecreasing");
    }
  }
  ComparisonFunction c;
  c.ts_ = std::move(ts);
  c.vs_ = std::move(vs);
  return c;
}

double ComparisonFunction::eval(double t) const {
  if (!(t >= 0.0)) throw ValidationError("comparison function: negative argument");
  if (linear_) return slope_ * t;
  if (t <= ts_.front()) return vs_.front() * (t / ts_.front());
  if (t >= ts_.back()) return vs_.back();
  auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - ts_.begin());
  double w = (t - ts_[i - 1]) / (ts_[i] - ts_[i - 1]);
  return vs_[i - 1] + w * (vs_[i] - vs_[i - 1]);
}

double ComparisonFunction::iterate(double t, std::size_t n) const {
  for (std::size_t i = 0; i < n; ++i) t = eval(t);
  return t;
}

PicardResult picard_solve(const HammersteinProblem& problem, const SampledFunction& start,
                          double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw ValidationError("picard: tolerance must be positive");
  if (max_iter == 0) throw ValidationError("picard: needs at least one iteration");

  PicardResult result{start, {}, false, 0, std::numeric_limits<double>::infinity()};
  for (std::size_t k = 0; k < max_iter; ++k) {
    SampledFunction next = apply(problem, result.solution);
    double r = sup_distance(next, result.solution);
    result.residuals.push_back(r);
    result.solution = std::move(next);
    result.iterations = k + 1;
    if (r > 1e6) throw NumericalError("picard: iteration diverged");
    if (r <= tol) {
      result.converged = true;
      break;
    }
  }

  double last = result.residuals.back();
  result.aposteriori_bound = last;
  if (auto lip = problem.nonlinearity.lipschitz_z()) {
    double contraction = *lip * sup_integral_norm(problem.kernel, *problem.grid);
    if (contraction < 1.0) {
      result.aposteriori_bound = contraction / (1.0 - contraction) * last;
    }
  }
  return result;
}

namespace {

double probe_kappa(const FunctionEnsemble& f, std::span<const std::size_t> probes,
                   std::size_t budget, std::uint64_t seed) {
  double worst = 0.0;
  for (std::size_t p : probes) {
    worst = std::max(worst,
                     nonconvexity(value_cloud(f, p), budget, mix_seed(seed, p)));
  }
  return worst;
}

}  // namespace

DarboTrace ensemble_iterate(const HammersteinProblem& problem,
                            const FunctionEnsemble& start, std::size_t iters,
                            const QuasimeasureParams& params,
                            std::span<const std::size_t> probe_nodes,
                            std::size_t kappa_budget, std::uint64_t seed) {
  if (iters == 0) throw ValidationError("ensemble iteration: needs at least one row");
  if (probe_nodes.empty()) throw ValidationError("ensemble iteration: needs probe nodes");
  for (std::size_t p : probe_nodes) {
    if (p >= problem.grid->num_nodes()) {
      throw ValidationError("ensemble iteration: probe node out of range");
    }
  }
  params.validate(*problem.grid);
  if (!(*start.grid() == *problem.grid)) {
    throw ValidationError("ensemble iteration: start lives on a different grid");
  }

  DarboTrace trace;
  trace.probe_nodes.assign(probe_nodes.begin(), probe_nodes.end());

  std::vector<FunctionEnsemble> rows;
  rows.reserve(iters);
  rows.push_back(start);
  for (std::size_t n = 1; n < iters; ++n) {
    std::vector<SampledFunction> images;
    images.reserve(rows.back().size());
    try {
      for (const auto& m : rows.back().members()) images.push_back(apply(problem, m));
    } catch (const std::exception& e) {
      throw IterationError(std::string("ensemble iteration: operator failed at step ") +
                               std::to_string(n + 1) + ": " + e.what(),
                           std::move(trace.steps));
    }
    rows.push_back(FunctionEnsemble(problem.grid, std::move(images)));
  }

  const FunctionEnsemble& final_row = rows.back();
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const FunctionEnsemble& row = rows[n];
    QuasimeasureReport q = quasimeasure(row, params);

    DarboStep step;
    step.index = n + 1;
    step.eta = q.eta_value;
    step.omega0 = q.omega0_value;
    step.chi0 = q.chi0_value;
    step.omega_total = q.omega_total;
    step.kappa = probe_kappa(row, probe_nodes, kappa_budget, seed);
    step.picard_residual = sup_distance(apply(problem, row.member(0)), row.member(0));
    double dh = 0.0;
    for (std::size_t p : probe_nodes) {
      dh = std::max(dh, hausdorff_distance(value_cloud(row, p), value_cloud(final_row, p)));
    }
    step.dh_to_final = dh;
    trace.steps.push_back(step);
  }
  return trace;
}

CertificateReport certify(const DarboTrace& trace,
                          const ComparisonFunction& omega_comparison,
                          const ComparisonFunction& kappa_comparison, double slack,
                          bool kappa_informational) {
  if (trace.steps.size() < 2) {
    throw ValidationError("certify: trace needs at least two rows");
  }
  if (!(slack >= 0.0)) throw ValidationError("certify: slack must be nonnegative");

  CertificateReport report{trace.steps.size(), 0, 0, 0, kappa_informational, false};
  for (std::size_t n = 0; n + 1 < trace.steps.size(); ++n) {
    const DarboStep& cur = trace.steps[n];
    const DarboStep& nxt = trace.steps[n + 1];
    if (nxt.omega_total > omega_comparison.eval(cur.omega_total) + slack) {
      ++report.omega_violations;
    }
    if (nxt.kappa > kappa_comparison.eval(cur.kappa) + slack) {
      ++report.kappa_violations;
    }
  }
  // The hull defect is 2-Lipschitz in the Hausdorff distance, so along the
  // trace it may differ from the final value by at most twice the cloud gap.
  double kappa_final = trace.steps.back().kappa;
  for (const DarboStep& step : trace.steps) {
    if (std::abs(step.kappa - kappa_final) > 2.0 * step.dh_to_final + slack) {
      ++report.lipschitz_violations;
    }
  }
  report.passed = report.omega_violations == 0 && report.lipschitz_violations == 0 &&
                  (kappa_informational || report.kappa_violations == 0);
  return report;
}

}  // namespace qmn
