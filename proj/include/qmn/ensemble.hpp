#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "qmn/geometry.hpp"

namespace qmn {

/// Uniform tensor grid on [-half_width, half_width]^dim.
///
/// Nodes are enumerated in row-major order (last axis fastest) and carry
/// tensor-product trapezoid quadrature weights, so the weights sum to the
/// domain volume (2 half_width)^dim.  Axis coordinates are computed as
/// (i * width) / (points_per_axis - 1) - half_width, which lands exactly on
/// representable values such as 0, 1 or -2 whenever the arithmetic allows;
/// several fixtures rely on those anchors being exact.
class Grid {
 public:
  Grid(std::size_t dim, double half_width, std::size_t points_per_axis);

  std::size_t dim() const { return dim_; }
  double half_width() const { return half_width_; }
  std::size_t points_per_axis() const { return points_per_axis_; }
  double spacing() const { return spacing_; }
  std::size_t num_nodes() const { return num_nodes_; }

  double axis_coord(std::size_t i) const { return coords_[i]; }

  /// Writes the node's coordinates into `out` (size dim).
  void node(std::size_t index, std::span<double> out) const;
  std::vector<double> node(std::size_t index) const;

  /// Tensor-product trapezoid weight of the node.
  double weight(std::size_t index) const;

  /// Euclidean norm of the node's coordinate vector.
  double node_norm(std::size_t index) const;

  bool operator==(const Grid& other) const {
    return dim_ == other.dim_ && half_width_ == other.half_width_ &&
           points_per_axis_ == other.points_per_axis_;
  }

 private:
  std::size_t dim_;
  double half_width_;
  std::size_t points_per_axis_;
  double spacing_;
  std::size_t num_nodes_;
  std::vector<double> coords_;  // per-axis coordinates, shared by all axes
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(std::size_t dim, double half_width, std::size_t points_per_axis);

/// Function sampled on a grid with values in R^codomain_dim, stored
/// node-major.  All values are finite.
class SampledFunction {
 public:
  SampledFunction(GridPtr grid, std::size_t codomain_dim, std::vector<double> values);

  /// Samples `fn` at every node.  `fn` receives node coordinates and must
  /// fill a vector of codomain_dim values.
  static SampledFunction from_fn(
      GridPtr grid, std::size_t codomain_dim,
      const std::function<void(std::span<const double>, std::span<double>)>& fn);

  /// Scalar-valued convenience constructor.
  static SampledFunction from_scalar_fn(
      GridPtr grid, const std::function<double(std::span<const double>)>& fn);

  const GridPtr& grid() const { return grid_; }
  std::size_t codomain_dim() const { return codomain_dim_; }
  std::span<const double> value(std::size_t node) const {
    return {values_.data() + node * codomain_dim_, codomain_dim_};
  }
  double scalar(std::size_t node) const { return values_[node * codomain_dim_]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

 private:
  GridPtr grid_;
  std::size_t codomain_dim_;
  std::vector<double> values_;
};

/// Nonempty family of sampled functions sharing one grid and codomain.
class FunctionEnsemble {
 public:
  FunctionEnsemble(GridPtr grid, std::vector<SampledFunction> members);

  const GridPtr& grid() const { return grid_; }
  std::size_t codomain_dim() const { return members_.front().codomain_dim(); }
  std::size_t size() const { return members_.size(); }
  const SampledFunction& member(std::size_t i) const { return members_[i]; }
  const std::vector<SampledFunction>& members() const { return members_; }

 private:
  GridPtr grid_;
  std::vector<SampledFunction> members_;
};

/// sup-norm distance over all grid nodes (Euclidean norm on the codomain).
double sup_distance(const SampledFunction& f, const SampledFunction& g);

/// sup-norm distance restricted to the listed nodes; `nodes` must be
/// nonempty and in range.
double restricted_distance(const SampledFunction& f, const SampledFunction& g,
                           std::span<const std::size_t> nodes);

/// Ascending chain of node subsets S_1 in S_2 in ... in S_levels, where
/// S_n collects the nodes inside the box [-n L / levels, n L / levels]^dim.
/// The last level is the full grid; every level is nonempty and the
/// inclusions are strict, otherwise construction fails (grid too coarse).
struct SaturatingSequence {
  GridPtr grid;
  std::vector<std::vector<std::size_t>> levels;

  std::size_t depth() const { return levels.size(); }
  std::span<const std::size_t> level(std::size_t n) const;  // 1-based
};

SaturatingSequence make_saturating(GridPtr grid, std::size_t levels);

/// Member-wise scaling by s (codomain side).
FunctionEnsemble scale_ensemble(const FunctionEnsemble& f, double s);

/// Appends `count` random convex combinations of the members, drawn with
/// simplex weights from `seed`.  The input members are kept as a prefix.
FunctionEnsemble convex_mix(const FunctionEnsemble& f, std::size_t count,
                            std::uint64_t seed);

/// Convex combination of the members with explicit weights (must match the
/// member count, be nonnegative and sum to one within 1e-9).
SampledFunction mix_members(const FunctionEnsemble& f, std::span<const double> weights);

/// Values of all members at one node, as a point cloud in R^codomain_dim.
PointCloud value_cloud(const FunctionEnsemble& f, std::size_t node);

}  // namespace qmn
