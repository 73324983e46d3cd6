#include "qmn/noncompactness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qmn/errors.hpp"
#include "qmn/random.hpp"

namespace qmn {

void QuasimeasureParams::validate(const Grid& grid) const {
  if (k_budget == 0) throw ValidationError("params: k_budget must be positive");
  if (delta_schedule.empty()) throw ValidationError("params: empty delta schedule");
  if (eps_schedule.empty()) throw ValidationError("params: empty eps schedule");
  for (std::size_t i = 0; i < delta_schedule.size(); ++i) {
    if (!(delta_schedule[i] > 0.0)) throw ValidationError("params: delta entries must be positive");
    if (i > 0 && !(delta_schedule[i] < delta_schedule[i - 1])) {
      throw ValidationError("params: delta schedule must be strictly descending");
    }
  }
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0.0)) throw ValidationError("params: eps entries must be positive");
    if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1])) {
      throw ValidationError("params: eps schedule must be strictly descending");
    }
  }
  const double h = grid.spacing();
  if (std::abs(delta_schedule.back() - h) > 1e-9 * h) {
    throw ValidationError("params: delta schedule must end at one grid spacing");
  }
  if (!saturating.grid || !(*saturating.grid == grid)) {
    throw ValidationError("params: saturating sequence grid mismatch");
  }
}

double pointwise_spread(const FunctionEnsemble& f, std::size_t k, std::size_t cap) {
  KCenterMode mode = f.size() <= cap ? KCenterMode::exhaustive : KCenterMode::greedy;
  double worst = 0.0;
  for (std::size_t node = 0; node < f.grid()->num_nodes(); ++node) {
    worst = std::max(worst, kcenter_radius(value_cloud(f, node), k, mode, cap));
  }
  return worst;
}

namespace {

// Node pairs at distance below the largest radius of interest, with the
// largest member-value jump across each pair.  Shared by the oscillation
// table so the quadratic pair scan happens once.
struct PairJump {
  double node_distance;
  double value_jump;
};

// Strict comparison with a relative guard band: node distances come out of
// coordinate arithmetic a few ulps off, and a pair at exactly the radius
// (adjacent nodes against one grid spacing, say) must stay excluded.
bool strictly_inside(double dist, double radius) {
  return dist < radius * (1.0 - 1e-12);
}

std::vector<PairJump> collect_pair_jumps(const FunctionEnsemble& f, double max_delta) {
  const Grid& grid = *f.grid();
  const std::size_t n = grid.num_nodes();
  std::vector<double> xi(grid.dim()), xj(grid.dim());
  std::vector<PairJump> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    grid.node(i, xi);
    for (std::size_t j = i + 1; j < n; ++j) {
      grid.node(j, xj);
      double dist = point_distance(xi, xj);
      if (!strictly_inside(dist, max_delta)) continue;
      double jump = 0.0;
      for (const auto& m : f.members()) {
        double s = 0.0;
        auto a = m.value(i);
        auto b = m.value(j);
        for (std::size_t c = 0; c < a.size(); ++c) {
          double d = a[c] - b[c];
          s += d * d;
        }
        jump = std::max(jump, std::sqrt(s));
      }
      pairs.push_back({dist, jump});
    }
  }
  return pairs;
}

}  // namespace

double oscillation(const FunctionEnsemble& f, double delta) {
  const double h = f.grid()->spacing();
  if (!(delta >= h * (1.0 - 1e-12))) {
    throw ValidationError("oscillation: delta below one grid spacing leaves no neighbor pairs");
  }
  double worst = 0.0;
  for (const auto& p : collect_pair_jumps(f, delta)) {
    worst = std::max(worst, p.value_jump);
  }
  return worst;
}

OscillationReport equicontinuity_defect(const FunctionEnsemble& f,
                                        const QuasimeasureParams& params) {
  params.validate(*f.grid());
  OscillationReport report;
  report.deltas = params.delta_schedule;
  report.values.assign(report.deltas.size(), 0.0);
  const auto pairs = collect_pair_jumps(f, params.delta_schedule.front());
  for (std::size_t d = 0; d < report.deltas.size(); ++d) {
    double worst = 0.0;
    for (const auto& p : pairs) {
      if (strictly_inside(p.node_distance, report.deltas[d])) {
        worst = std::max(worst, p.value_jump);
      }
    }
    report.values[d] = worst;
  }
  report.value = report.values.back();
  return report;
}

double restriction_gap(const FunctionEnsemble& f, const SaturatingSequence& sat,
                       std::size_t level, double eps) {
  if (!(eps >= 0.0)) throw ValidationError("restriction gap: eps must be nonnegative");
  auto nodes = sat.level(level);
  double gap = 0.0;  // identical pairs always qualify and contribute zero
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      double near = restricted_distance(f.member(i), f.member(j), nodes);
      if (near <= eps) {
        gap = std::max(gap, sup_distance(f.member(i), f.member(j)));
      }
    }
  }
  return gap;
}

ExtensionReport extension_defect(const FunctionEnsemble& f,
                                 const QuasimeasureParams& params) {
  params.validate(*f.grid());
  ExtensionReport report;
  const auto& sat = params.saturating;
  for (std::size_t level = 1; level <= sat.depth(); ++level) {
    for (double eps : params.eps_schedule) {
      report.table.push_back({level, eps, restriction_gap(f, sat, level, eps)});
    }
  }
  report.value = report.table.back().value;  // deepest level, smallest eps
  return report;
}

QuasimeasureReport quasimeasure(const FunctionEnsemble& f,
                                const QuasimeasureParams& params) {
  params.validate(*f.grid());
  QuasimeasureReport report;
  report.eta_value = pointwise_spread(f, params.k_budget, params.exhaustive_cap);
  report.omega_table = equicontinuity_defect(f, params);
  report.omega0_value = report.omega_table.value;
  report.chi_table = extension_defect(f, params);
  report.chi0_value = report.chi_table.value;
  report.omega_total = report.eta_value + report.omega0_value + report.chi0_value;
  return report;
}

bool AxiomSuiteReport::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed()) return false;
  }
  return true;
}

namespace {

// --- generated ensembles for the suite ------------------------------------

double shape_value(std::size_t shape, std::span<const double> x) {
  double n2 = 0.0, n1 = 0.0;
  for (double c : x) {
    n2 += c * c;
    n1 += std::abs(c);
  }
  switch (shape % 4) {
    case 0: return std::exp(-n2);
    case 1: return 1.0 / (1.0 + n2);
    case 2: return n1;
    default: return x[0];
  }
}

SampledFunction random_member(const GridPtr& grid, SplitMix64& rng) {
  double c0 = rng.uniform(-1.0, 1.0);
  double c1 = rng.uniform(-1.0, 1.0);
  double c2 = rng.uniform(-1.0, 1.0);
  std::size_t s1 = static_cast<std::size_t>(rng.below(4));
  std::size_t s2 = static_cast<std::size_t>(rng.below(4));
  return SampledFunction::from_scalar_fn(grid, [=](std::span<const double> x) {
    return c0 + c1 * shape_value(s1, x) + c2 * shape_value(s2, x);
  });
}

FunctionEnsemble random_ensemble(const GridPtr& grid, SplitMix64& rng,
                                 std::size_t min_members, std::size_t max_members) {
  std::size_t count = min_members + static_cast<std::size_t>(
                                         rng.below(max_members - min_members + 1));
  std::vector<SampledFunction> members;
  members.reserve(count);
  for (std::size_t i = 0; i < count; ++i) members.push_back(random_member(grid, rng));
  return FunctionEnsemble(grid, std::move(members));
}

SampledFunction constant_member(const GridPtr& grid, double value) {
  return SampledFunction(grid, 1,
                         std::vector<double>(grid->num_nodes(), value));
}

std::string describe_trial(const char* what, std::size_t trial, double lhs, double rhs) {
  std::ostringstream os;
  os << what << " failed at trial " << trial << ": " << lhs << " vs " << rhs;
  return os.str();
}

void record_failure(AxiomCheck& check, const std::string& note) {
  ++check.failures;
  if (check.note.empty()) check.note = note;
}

// Component-wise comparison for the monotonicity check.  Oscillation and
// restriction tables must never increase when members are removed; the
// pointwise spread is compared at the same k but only the factor-two
// envelope is guaranteed once centers are confined to the cloud, so exact
// misses there are counted as informational.
void check_monotone(AxiomCheck& check, const FunctionEnsemble& full,
                    const FunctionEnsemble& sub, const QuasimeasureParams& params,
                    std::size_t trial) {
  auto full_osc = equicontinuity_defect(full, params);
  auto sub_osc = equicontinuity_defect(sub, params);
  for (std::size_t i = 0; i < full_osc.values.size(); ++i) {
    if (sub_osc.values[i] > full_osc.values[i]) {
      record_failure(check, describe_trial("oscillation monotonicity", trial,
                                           sub_osc.values[i], full_osc.values[i]));
    }
  }
  auto full_ext = extension_defect(full, params);
  auto sub_ext = extension_defect(sub, params);
  for (std::size_t i = 0; i < full_ext.table.size(); ++i) {
    if (sub_ext.table[i].value > full_ext.table[i].value) {
      record_failure(check, describe_trial("restriction gap monotonicity", trial,
                                           sub_ext.table[i].value, full_ext.table[i].value));
    }
  }
  double eta_full = pointwise_spread(full, params.k_budget, params.exhaustive_cap);
  double eta_sub = pointwise_spread(sub, params.k_budget, params.exhaustive_cap);
  if (eta_sub > 2.0 * eta_full + 1e-12) {
    record_failure(check, describe_trial("pointwise spread envelope", trial, eta_sub,
                                         2.0 * eta_full));
  } else if (eta_sub > eta_full) {
    ++check.informational;  // allowed by the cloud-restricted centers
  }
}

void check_duplication(AxiomCheck& check, const FunctionEnsemble& f,
                       const QuasimeasureParams& params, SplitMix64& rng,
                       std::size_t trial) {
  std::vector<SampledFunction> members = f.members();
  std::size_t copies = 1 + static_cast<std::size_t>(rng.below(2));
  for (std::size_t c = 0; c < copies; ++c) {
    members.push_back(f.member(static_cast<std::size_t>(rng.below(f.size()))));
  }
  FunctionEnsemble dup(f.grid(), std::move(members));

  auto base = quasimeasure(f, params);
  auto with = quasimeasure(dup, params);
  if (base.eta_value != with.eta_value) {
    record_failure(check, describe_trial("duplication / pointwise spread", trial,
                                         with.eta_value, base.eta_value));
  }
  if (base.omega_table.values != with.omega_table.values) {
    record_failure(check, describe_trial("duplication / oscillation table", trial,
                                         with.omega0_value, base.omega0_value));
  }
  for (std::size_t i = 0; i < base.chi_table.table.size(); ++i) {
    if (base.chi_table.table[i].value != with.chi_table.table[i].value) {
      record_failure(check, describe_trial("duplication / restriction table", trial,
                                           with.chi_table.table[i].value,
                                           base.chi_table.table[i].value));
    }
  }
}

void check_homogeneity(AxiomCheck& check, const FunctionEnsemble& f,
                       const QuasimeasureParams& params, SplitMix64& rng,
                       std::size_t trial) {
  static const double factors[] = {-3.0, -0.5, 0.7, 2.5};
  double s = factors[rng.below(4)];
  QuasimeasureParams scaled_params = params;
  for (auto& e : scaled_params.eps_schedule) e *= std::abs(s);

  auto base = quasimeasure(f, params);
  auto scaled = quasimeasure(scale_ensemble(f, s), scaled_params);

  auto close = [&](double got, double want) {
    double scale = std::max({1e-12, std::abs(got), std::abs(want)});
    return std::abs(got - want) <= 1e-9 * scale;
  };
  double m = std::abs(s);
  if (!close(scaled.eta_value, m * base.eta_value)) {
    record_failure(check, describe_trial("homogeneity / pointwise spread", trial,
                                         scaled.eta_value, m * base.eta_value));
  }
  for (std::size_t i = 0; i < base.omega_table.values.size(); ++i) {
    if (!close(scaled.omega_table.values[i], m * base.omega_table.values[i])) {
      record_failure(check, describe_trial("homogeneity / oscillation", trial,
                                           scaled.omega_table.values[i],
                                           m * base.omega_table.values[i]));
    }
  }
  for (std::size_t i = 0; i < base.chi_table.table.size(); ++i) {
    if (!close(scaled.chi_table.table[i].value, m * base.chi_table.table[i].value)) {
      record_failure(check, describe_trial("homogeneity / restriction gap", trial,
                                           scaled.chi_table.table[i].value,
                                           m * base.chi_table.table[i].value));
    }
  }
}

void check_union(AxiomCheck& check, const GridPtr& grid,
                 const QuasimeasureParams& params, SplitMix64& rng,
                 std::size_t trial) {
  // A is a small finite family of constants, G an arbitrary ensemble.
  std::size_t a_count = 1 + static_cast<std::size_t>(rng.below(2));
  std::vector<SampledFunction> a_members;
  for (std::size_t i = 0; i < a_count; ++i) {
    a_members.push_back(constant_member(grid, rng.uniform(-1.0, 1.0)));
  }
  FunctionEnsemble a(grid, a_members);
  FunctionEnsemble g = random_ensemble(grid, rng, 2, 5);

  std::vector<SampledFunction> u_members = a.members();
  for (const auto& m : g.members()) u_members.push_back(m);
  FunctionEnsemble u(grid, std::move(u_members));

  // Oscillation of a union is the exact max at every schedule radius.
  auto osc_a = equicontinuity_defect(a, params);
  auto osc_g = equicontinuity_defect(g, params);
  auto osc_u = equicontinuity_defect(u, params);
  for (std::size_t i = 0; i < osc_u.values.size(); ++i) {
    if (osc_u.values[i] != std::max(osc_a.values[i], osc_g.values[i])) {
      record_failure(check, describe_trial("union / oscillation", trial, osc_u.values[i],
                                           std::max(osc_a.values[i], osc_g.values[i])));
    }
  }

  // Below the smallest cross distance the restriction gap splits exactly.
  for (std::size_t level = 1; level <= params.saturating.depth(); ++level) {
    auto nodes = params.saturating.level(level);
    double cross = std::numeric_limits<double>::infinity();
    for (const auto& ma : a.members()) {
      for (const auto& mg : g.members()) {
        cross = std::min(cross, restricted_distance(ma, mg, nodes));
      }
    }
    if (!(cross > 0.0)) continue;  // degenerate draw, nothing to split
    double eps = 0.5 * cross;
    double split = std::max(restriction_gap(a, params.saturating, level, eps),
                            restriction_gap(g, params.saturating, level, eps));
    double joint = restriction_gap(u, params.saturating, level, eps);
    if (joint != split) {
      record_failure(check, describe_trial("union / restriction split", trial, joint, split));
    }
  }

  // Adding |A| centers absorbs a finite family without growing the spread.
  double eta_g = pointwise_spread(g, params.k_budget, params.exhaustive_cap);
  double eta_u = pointwise_spread(u, params.k_budget + a.size(), params.exhaustive_cap);
  if (eta_u > eta_g) {
    record_failure(check, describe_trial("union / center budget", trial, eta_u, eta_g));
  }
}

void check_mixing(AxiomCheck& check, const GridPtr& grid,
                  const QuasimeasureParams& params, SplitMix64& rng,
                  std::size_t trial) {
  // Duplicated constants separated beyond the smallest eps score zero under
  // budgets that cover the distinct values.
  const double eps_min = params.eps_schedule.back();
  std::size_t distinct = 1 + static_cast<std::size_t>(rng.below(
                                 std::min<std::size_t>(params.k_budget, 3)));
  std::vector<double> levels;
  double base = rng.uniform(-1.0, 1.0);
  for (std::size_t i = 0; i < distinct; ++i) {
    levels.push_back(base + static_cast<double>(i) * (2.5 * eps_min + 0.2));
  }
  std::vector<SampledFunction> members;
  for (double v : levels) {
    members.push_back(constant_member(grid, v));
    members.push_back(constant_member(grid, v));
  }
  FunctionEnsemble f(grid, std::move(members));

  if (pointwise_spread(f, params.k_budget, params.exhaustive_cap) != 0.0 ||
      equicontinuity_defect(f, params).value != 0.0 ||
      extension_defect(f, params).value != 0.0) {
    record_failure(check, describe_trial("mixing / zero premise", trial, 1.0, 0.0));
    return;
  }

  std::size_t count = 2 + static_cast<std::size_t>(rng.below(3));
  FunctionEnsemble mixed = convex_mix(f, count, rng.next());

  // Mixing adds `count` values, so the center budget grows with it.
  double eta = pointwise_spread(mixed, params.k_budget + count, params.exhaustive_cap);
  if (eta != 0.0) {
    record_failure(check, describe_trial("mixing / pointwise spread", trial, eta, 0.0));
  }
  double osc = equicontinuity_defect(mixed, params).value;
  if (osc != 0.0) {
    record_failure(check, describe_trial("mixing / oscillation", trial, osc, 0.0));
  }
  double gap = extension_defect(mixed, params).value;
  if (gap > eps_min) {
    record_failure(check, describe_trial("mixing / restriction gap", trial, gap, eps_min));
  }
}

}  // namespace

AxiomSuiteReport axiom_suite(const QuasimeasureParams& params, std::uint64_t seed,
                             std::size_t trials, bool adversarial) {
  if (trials == 0) throw ValidationError("axiom suite: needs at least one trial");
  const GridPtr& grid = params.saturating.grid;
  if (!grid) throw ValidationError("axiom suite: params carry no grid");
  params.validate(*grid);

  AxiomSuiteReport report;
  report.seed = seed;
  report.trials = trials;
  report.adversarial = adversarial;
  report.checks.resize(5);
  report.checks[0].id = "monotone";
  report.checks[1].id = "duplication";
  report.checks[2].id = "homogeneity";
  report.checks[3].id = "union";
  report.checks[4].id = "mixing";
  AxiomCheck& monotone = report.checks[0];
  AxiomCheck& duplication = report.checks[1];
  AxiomCheck& homogeneity = report.checks[2];
  AxiomCheck& union_check = report.checks[3];
  AxiomCheck& mixing = report.checks[4];

  for (std::size_t trial = 0; trial < trials; ++trial) {
    SplitMix64 rng(mix_seed(seed, 0xa0761d6478bd642full + trial));

    FunctionEnsemble full = random_ensemble(grid, rng, 3, 6);

    // Sub-ensemble: a random nonempty proper subset of the members.
    std::size_t keep = 1 + static_cast<std::size_t>(rng.below(full.size() - 1));
    std::vector<std::size_t> index(full.size());
    for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
    for (std::size_t i = index.size(); i-- > 1;) {
      std::swap(index[i], index[rng.below(i + 1)]);
    }
    index.resize(keep);
    std::sort(index.begin(), index.end());
    std::vector<SampledFunction> sub_members;
    for (std::size_t i : index) sub_members.push_back(full.member(i));
    FunctionEnsemble sub(grid, std::move(sub_members));

    if (adversarial) {
      // Non-monotone stub: the true measurement plus a bonus that shrinks
      // as members are added.  Compare a family against itself plus one
      // duplicate so the real totals tie exactly and the bias must surface.
      FunctionEnsemble padded = [&] {
        std::vector<SampledFunction> m = full.members();
        m.push_back(full.member(0));
        return FunctionEnsemble(grid, std::move(m));
      }();
      double stub_padded = quasimeasure(padded, params).omega_total +
                           1.0 / static_cast<double>(padded.size());
      double stub_base = quasimeasure(full, params).omega_total +
                         1.0 / static_cast<double>(full.size());
      if (stub_base > stub_padded) {
        record_failure(monotone, describe_trial("injected functional monotonicity",
                                                trial, stub_base, stub_padded));
      }
    } else {
      check_monotone(monotone, full, sub, params, trial);
    }

    check_duplication(duplication, full, params, rng, trial);
    check_homogeneity(homogeneity, full, params, rng, trial);
    check_union(union_check, grid, params, rng, trial);
    check_mixing(mixing, grid, params, rng, trial);
  }
  return report;
}

}  // namespace qmn
