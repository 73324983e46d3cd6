#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qmn {

/// Finite nonempty set of points in R^dim, stored flat in row order.
/// All coordinates are finite; construction rejects anything else.
class PointCloud {
 public:
  PointCloud(std::size_t dim, std::vector<double> flat);

  static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return flat_.size() / dim_; }
  std::span<const double> point(std::size_t i) const {
    return {flat_.data() + i * dim_, dim_};
  }
  const std::vector<double>& flat() const { return flat_; }

  void push_back(std::span<const double> p);

 private:
  std::size_t dim_;
  std::vector<double> flat_;
};

/// Euclidean distance between two points of equal dimension.
double point_distance(std::span<const double> a, std::span<const double> b);

/// Symmetric Hausdorff distance max(sup_a inf_b, sup_b inf_a) by direct
/// enumeration.  Zero iff the two clouds are equal as sets.
double hausdorff_distance(const PointCloud& a, const PointCloud& b);

enum class KCenterMode { exhaustive, greedy };

/// Covering radius of `a` with min(k, |a|) centers chosen from the cloud
/// itself.  Exhaustive mode enumerates every center subset and is limited
/// to |a| <= exhaustive_cap points; greedy mode runs farthest-point
/// traversal seeded at index 0 with ties broken toward the lowest index,
/// and never exceeds twice the exhaustive radius.
double kcenter_radius(const PointCloud& a, std::size_t k, KCenterMode mode,
                      std::size_t exhaustive_cap = 14);

/// Distance from p to the convex hull of `a`, computed by simplex
/// constrained projection (pairwise Frank-Wolfe with exact line search).
/// Stops only once a duality-gap certificate bounds the distance error by
/// `tol`; absolute accuracy is `tol` (default 1e-9).
double hull_distance(std::span<const double> p, const PointCloud& a,
                     double tol = 1e-9);

/// Lower estimate of the Hausdorff distance between `a` and its convex
/// hull: hull points are sampled with simplex weights (`budget` draws,
/// deterministic in `seed`), prefix maxima are refined by coordinate
/// ascent in weight space, and the best refined value is returned.  The
/// estimate never exceeds the true value and is nondecreasing in `budget`
/// for a fixed seed.  Requires budget >= |a|.
double nonconvexity(const PointCloud& a, std::size_t budget,
                    std::uint64_t seed);

}  // namespace qmn
