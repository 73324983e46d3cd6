#include "qmn/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmn/errors.hpp"
#include "qmn/random.hpp"

namespace qmn {

namespace {

constexpr std::size_t kMaxNodes = 4'000'000;

void decode(std::size_t index, std::size_t dim, std::size_t per_axis,
            std::span<std::size_t> digits) {
  for (std::size_t k = dim; k-- > 0;) {
    digits[k] = index % per_axis;
    index /= per_axis;
  }
}

}  // namespace

Grid::Grid(std::size_t dim, double half_width, std::size_t points_per_axis)
    : dim_(dim), half_width_(half_width), points_per_axis_(points_per_axis) {
  if (dim_ == 0) throw ValidationError("grid: dimension must be positive");
  if (dim_ > 8) throw ValidationError("grid: dimension above 8 is not supported");
  if (!(half_width_ > 0.0) || !std::isfinite(half_width_)) {
    throw ValidationError("grid: half_width must be positive and finite");
  }
  if (points_per_axis_ < 2) throw ValidationError("grid: needs at least 2 points per axis");

  double count = std::pow(static_cast<double>(points_per_axis_), static_cast<double>(dim_));
  if (count > static_cast<double>(kMaxNodes)) {
    throw ValidationError("grid: node count exceeds the supported limit");
  }
  num_nodes_ = 1;
  for (std::size_t k = 0; k < dim_; ++k) num_nodes_ *= points_per_axis_;

  const double width = 2.0 * half_width_;
  spacing_ = width / static_cast<double>(points_per_axis_ - 1);
  coords_.resize(points_per_axis_);
  for (std::size_t i = 0; i < points_per_axis_; ++i) {
    coords_[i] = (static_cast<double>(i) * width) /
                     static_cast<double>(points_per_axis_ - 1) -
                 half_width_;
  }
}

void Grid::node(std::size_t index, std::span<double> out) const {
  std::size_t digits_buf[8];
  std::span<std::size_t> digits(digits_buf, dim_);
  decode(index, dim_, points_per_axis_, digits);
  for (std::size_t k = 0; k < dim_; ++k) out[k] = coords_[digits[k]];
}

std::vector<double> Grid::node(std::size_t index) const {
  std::vector<double> out(dim_);
  node(index, out);
  return out;
}

double Grid::weight(std::size_t index) const {
  std::size_t digits_buf[8];
  std::span<std::size_t> digits(digits_buf, dim_);
  decode(index, dim_, points_per_axis_, digits);
  double w = 1.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    bool edge = digits[k] == 0 || digits[k] == points_per_axis_ - 1;
    w *= edge ? 0.5 * spacing_ : spacing_;
  }
  return w;
}

double Grid::node_norm(std::size_t index) const {
  double buf[8];
  std::span<double> x(buf, dim_);
  node(index, x);
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

GridPtr make_grid(std::size_t dim, double half_width, std::size_t points_per_axis) {
  return std::make_shared<const Grid>(dim, half_width, points_per_axis);
}

SampledFunction::SampledFunction(GridPtr grid, std::size_t codomain_dim,
                                 std::vector<double> values)
    : grid_(std::move(grid)), codomain_dim_(codomain_dim), values_(std::move(values)) {
  if (!grid_) throw ValidationError("sampled function: null grid");
  if (codomain_dim_ == 0) throw ValidationError("sampled function: codomain dim must be positive");
  if (values_.size() != grid_->num_nodes() * codomain_dim_) {
    throw ValidationError("sampled function: value count does not match the grid");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("sampled function: non-finite value");
  }
}

SampledFunction SampledFunction::from_fn(
    GridPtr grid, std::size_t codomain_dim,
    const std::function<void(std::span<const double>, std::span<double>)>& fn) {
  if (!grid) throw ValidationError("sampled function: null grid");
  std::vector<double> values(grid->num_nodes() * codomain_dim);
  std::vector<double> x(grid->dim());
  for (std::size_t i = 0; i < grid->num_nodes(); ++i) {
    grid->node(i, x);
    fn(x, {values.data() + i * codomain_dim, codomain_dim});
  }
  return SampledFunction(std::move(grid), codomain_dim, std::move(values));
}

SampledFunction SampledFunction::from_scalar_fn(
    GridPtr grid, const std::function<double(std::span<const double>)>& fn) {
  return from_fn(std::move(grid), 1,
                 [&fn](std::span<const double> x, std::span<double> out) { out[0] = fn(x); });
}

FunctionEnsemble::FunctionEnsemble(GridPtr grid, std::vector<SampledFunction> members)
    : grid_(std::move(grid)), members_(std::move(members)) {
  if (!grid_) throw ValidationError("ensemble: null grid");
  if (members_.empty()) throw ValidationError("ensemble: needs at least one member");
  for (const auto& m : members_) {
    if (!(*m.grid() == *grid_)) throw ValidationError("ensemble: member grid mismatch");
    if (m.codomain_dim() != members_.front().codomain_dim()) {
      throw ValidationError("ensemble: member codomain mismatch");
    }
  }
}

namespace {

double value_distance(const SampledFunction& f, const SampledFunction& g,
                      std::size_t node) {
  double s = 0.0;
  auto a = f.value(node);
  auto b = g.value(node);
  for (std::size_t c = 0; c < a.size(); ++c) {
    double d = a[c] - b[c];
    s += d * d;
  }
  return std::sqrt(s);
}

void require_same_shape(const SampledFunction& f, const SampledFunction& g,
                        const char* what) {
  if (!(*f.grid() == *g.grid())) {
    throw ValidationError(std::string(what) + ": grid mismatch");
  }
  if (f.codomain_dim() != g.codomain_dim()) {
    throw ValidationError(std::string(what) + ": codomain mismatch");
  }
}

}  // namespace

double sup_distance(const SampledFunction& f, const SampledFunction& g) {
  require_same_shape(f, g, "sup distance");
  double worst = 0.0;
  for (std::size_t i = 0; i < f.grid()->num_nodes(); ++i) {
    worst = std::max(worst, value_distance(f, g, i));
  }
  return worst;
}

double restricted_distance(const SampledFunction& f, const SampledFunction& g,
                           std::span<const std::size_t> nodes) {
  require_same_shape(f, g, "restricted distance");
  if (nodes.empty()) throw ValidationError("restricted distance: empty node set");
  double worst = 0.0;
  for (std::size_t i : nodes) {
    if (i >= f.grid()->num_nodes()) {
      throw ValidationError("restricted distance: node index out of range");
    }
    worst = std::max(worst, value_distance(f, g, i));
  }
  return worst;
}

std::span<const std::size_t> SaturatingSequence::level(std::size_t n) const {
  if (n == 0 || n > levels.size()) throw ValidationError("saturating: level out of range");
  return levels[n - 1];
}

SaturatingSequence make_saturating(GridPtr grid, std::size_t level_count) {
  if (!grid) throw ValidationError("saturating: null grid");
  if (level_count == 0) throw ValidationError("saturating: needs at least one level");
  if (level_count > grid->points_per_axis()) {
    throw ValidationError("saturating: more levels than points per axis");
  }

  SaturatingSequence seq;
  seq.grid = grid;
  seq.levels.resize(level_count);
  std::vector<double> x(grid->dim());
  const double L = grid->half_width();
  for (std::size_t n = 1; n <= level_count; ++n) {
    const double bound = (static_cast<double>(n) * L) / static_cast<double>(level_count) +
                         1e-9 * L;
    auto& level = seq.levels[n - 1];
    for (std::size_t i = 0; i < grid->num_nodes(); ++i) {
      grid->node(i, x);
      bool inside = true;
      for (double c : x) {
        if (std::abs(c) > bound) {
          inside = false;
          break;
        }
      }
      if (inside) level.push_back(i);
    }
  }
  for (std::size_t n = 0; n < level_count; ++n) {
    if (seq.levels[n].empty()) {
      throw ValidationError("saturating: level " + std::to_string(n + 1) +
                            " contains no grid node (grid too coarse)");
    }
    if (n > 0 && seq.levels[n].size() <= seq.levels[n - 1].size()) {
      throw ValidationError("saturating: inclusion between levels " + std::to_string(n) +
                            " and " + std::to_string(n + 1) +
                            " is not strict (grid too coarse)");
    }
  }
  if (seq.levels.back().size() != grid->num_nodes()) {
    throw ValidationError("saturating: last level must be the full grid");
  }
  return seq;
}

FunctionEnsemble scale_ensemble(const FunctionEnsemble& f, double s) {
  if (!std::isfinite(s)) throw ValidationError("scale: factor must be finite");
  std::vector<SampledFunction> members;
  members.reserve(f.size());
  for (const auto& m : f.members()) {
    std::vector<double> values = m.values();
    for (auto& v : values) v *= s;
    members.emplace_back(f.grid(), m.codomain_dim(), std::move(values));
  }
  return FunctionEnsemble(f.grid(), std::move(members));
}

SampledFunction mix_members(const FunctionEnsemble& f, std::span<const double> weights) {
  if (weights.size() != f.size()) throw ValidationError("mix: weight count mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("mix: weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("mix: weights must sum to one");

  std::vector<double> values(f.grid()->num_nodes() * f.codomain_dim(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& mv = f.member(i).values();
    for (std::size_t j = 0; j < values.size(); ++j) values[j] += weights[i] * mv[j];
  }
  return SampledFunction(f.grid(), f.codomain_dim(), std::move(values));
}

FunctionEnsemble convex_mix(const FunctionEnsemble& f, std::size_t count,
                            std::uint64_t seed) {
  SplitMix64 rng(mix_seed(seed, 0x1f123bb5159a55e5ull));
  std::vector<SampledFunction> members = f.members();
  std::vector<double> w;
  for (std::size_t c = 0; c < count; ++c) {
    rng.simplex_weights(f.size(), w);
    members.push_back(mix_members(f, w));
  }
  return FunctionEnsemble(f.grid(), std::move(members));
}

PointCloud value_cloud(const FunctionEnsemble& f, std::size_t node) {
  if (node >= f.grid()->num_nodes()) throw ValidationError("value cloud: node out of range");
  std::vector<double> flat;
  flat.reserve(f.size() * f.codomain_dim());
  for (const auto& m : f.members()) {
    auto v = m.value(node);
    flat.insert(flat.end(), v.begin(), v.end());
  }
  return PointCloud(f.codomain_dim(), std::move(flat));
}

}  // namespace qmn
