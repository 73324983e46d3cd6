#include "qmn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qmn/errors.hpp"
#include "qmn/random.hpp"

namespace qmn {

namespace {

void require_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) {
      throw ValidationError(std::string(what) + ": non-finite coordinate");
    }
  }
}

// Pairwise distance matrix, row major.
std::vector<double> distance_matrix(const PointCloud& a) {
  const std::size_t n = a.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = point_distance(a.point(i), a.point(j));
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  return d;
}

// Covering radius of the whole cloud by the centers listed in `centers`.
double covering_radius(const std::vector<double>& dist, std::size_t n,
                       std::span<const std::size_t> centers) {
  double radius = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c : centers) best = std::min(best, dist[i * n + c]);
    radius = std::max(radius, best);
  }
  return radius;
}

double kcenter_exhaustive(const std::vector<double>& dist, std::size_t n,
                          std::size_t k) {
  std::vector<std::size_t> comb(k);
  std::iota(comb.begin(), comb.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    best = std::min(best, covering_radius(dist, n, comb));
    // next k-combination of {0..n-1} in lexicographic order
    std::size_t i = k;
    while (i > 0 && comb[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
  return best;
}

double kcenter_greedy(const std::vector<double>& dist, std::size_t n,
                      std::size_t k) {
  std::vector<std::size_t> centers;
  centers.reserve(k);
  centers.push_back(0);
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = dist[i * n];
  while (centers.size() < k) {
    std::size_t far = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (nearest[i] > nearest[far]) far = i;  // ties keep the lowest index
    }
    if (nearest[far] == 0.0) break;  // everything already covered
    centers.push_back(far);
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], dist[i * n + far]);
    }
  }
  return *std::max_element(nearest.begin(), nearest.end());
}

}  // namespace

PointCloud::PointCloud(std::size_t dim, std::vector<double> flat)
    : dim_(dim), flat_(std::move(flat)) {
  if (dim_ == 0) throw ValidationError("point cloud: dimension must be positive");
  if (flat_.empty() || flat_.size() % dim_ != 0) {
    throw ValidationError("point cloud: needs at least one point and size divisible by dim");
  }
  require_finite(flat_, "point cloud");
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ValidationError("point cloud: no points");
  std::vector<double> flat;
  flat.reserve(rows.size() * rows.front().size());
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) {
      throw ValidationError("point cloud: mixed point dimensions");
    }
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return PointCloud(rows.front().size(), std::move(flat));
}

void PointCloud::push_back(std::span<const double> p) {
  if (p.size() != dim_) throw ValidationError("point cloud: dimension mismatch");
  require_finite(p, "point cloud");
  flat_.insert(flat_.end(), p.begin(), p.end());
}

double point_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("point distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double hausdorff_distance(const PointCloud& a, const PointCloud& b) {
  if (a.dim() != b.dim()) throw ValidationError("hausdorff: dimension mismatch");
  auto directed = [](const PointCloud& from, const PointCloud& to) {
    double worst = 0.0;
    for (std::size_t i = 0; i < from.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < to.size(); ++j) {
        best = std::min(best, point_distance(from.point(i), to.point(j)));
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

double kcenter_radius(const PointCloud& a, std::size_t k, KCenterMode mode,
                      std::size_t exhaustive_cap) {
  if (k == 0) throw ValidationError("kcenter: k must be positive");
  const std::size_t n = a.size();
  const std::size_t use_k = std::min(k, n);
  const auto dist = distance_matrix(a);
  if (mode == KCenterMode::exhaustive) {
    if (n > exhaustive_cap) {
      throw ValidationError("kcenter: cloud of " + std::to_string(n) +
                            " points exceeds the exhaustive cap of " +
                            std::to_string(exhaustive_cap) + "; use greedy mode");
    }
    return kcenter_exhaustive(dist, n, use_k);
  }
  return kcenter_greedy(dist, n, use_k);
}

double hull_distance(std::span<const double> p, const PointCloud& a,
                     double tol) {
  if (p.size() != a.dim()) throw ValidationError("hull distance: dimension mismatch");
  require_finite(p, "hull distance");
  if (!(tol > 0)) throw ValidationError("hull distance: tolerance must be positive");

  const std::size_t n = a.size();
  const std::size_t m = a.dim();

  // Weights over the cloud, current hull point y = sum_i w[i] a_i.
  std::vector<double> w(n, 0.0);
  std::vector<double> y(m), r(m), grad(n);
  {
    std::size_t start = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      double d = point_distance(p, a.point(i));
      if (d < best) {
        best = d;
        start = i;
      }
    }
    w[start] = 1.0;
    auto s = a.point(start);
    std::copy(s.begin(), s.end(), y.begin());
  }

  const std::size_t max_iter = 200000;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    for (std::size_t j = 0; j < m; ++j) r[j] = y[j] - p[j];
    double d2 = 0.0;
    for (std::size_t j = 0; j < m; ++j) d2 += r[j] * r[j];
    double d = std::sqrt(d2);

    // y is feasible, so d already sits within tol of the true distance.
    // This also covers interior points, where rounding keeps the duality
    // gap from ever certifying below roughly sqrt(machine epsilon).
    if (d <= tol) return d;

    // grad_i = a_i . r ; the Frank-Wolfe vertex minimizes it, the away
    // vertex maximizes it over the current support.
    double g_dot_w = 0.0;
    std::size_t fw = 0, away = 0;
    bool have_away = false;
    for (std::size_t i = 0; i < n; ++i) {
      auto ai = a.point(i);
      double g = 0.0;
      for (std::size_t j = 0; j < m; ++j) g += ai[j] * r[j];
      grad[i] = g;
      if (g < grad[fw]) fw = i;
      g_dot_w += g * w[i];
      if (w[i] > 0.0 && (!have_away || g > grad[away])) {
        away = i;
        have_away = true;
      }
    }
    double gap_fw = g_dot_w - grad[fw];

    // Duality gap certificate: f - f* <= gap_fw with f = d^2/2, hence the
    // distance error is below min(sqrt(2 gap), 2 gap / d).
    double gap = std::max(gap_fw, 0.0);
    double err = std::sqrt(2.0 * gap);
    if (d > 0.0) err = std::min(err, 2.0 * gap / d);
    if (err <= tol) return d;

    double gap_away = have_away ? grad[away] - g_dot_w : -1.0;
    bool use_fw = gap_fw >= gap_away || !have_away || w[away] >= 1.0;

    if (use_fw) {
      // direction a_fw - y, step capped at 1
      double qq = 0.0, rq = 0.0;
      auto s = a.point(fw);
      for (std::size_t j = 0; j < m; ++j) {
        double q = s[j] - y[j];
        qq += q * q;
        rq += r[j] * q;
      }
      if (qq == 0.0) return d;  // vertex coincides with the iterate
      double step = std::clamp(-rq / qq, 0.0, 1.0);
      if (step == 0.0) return d;
      for (std::size_t j = 0; j < m; ++j) y[j] += step * (s[j] - y[j]);
      for (std::size_t i = 0; i < n; ++i) w[i] *= (1.0 - step);
      w[fw] += step;
    } else {
      // direction y - a_away, step capped so w[away] stays nonnegative
      double qq = 0.0, rq = 0.0;
      auto v = a.point(away);
      for (std::size_t j = 0; j < m; ++j) {
        double q = y[j] - v[j];
        qq += q * q;
        rq += r[j] * q;
      }
      double cap = w[away] / (1.0 - w[away]);
      if (qq == 0.0) continue;
      double step = std::clamp(-rq / qq, 0.0, cap);
      if (step == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) y[j] += step * (y[j] - v[j]);
      for (std::size_t i = 0; i < n; ++i) w[i] *= (1.0 + step);
      w[away] -= step;
      if (w[away] < 1e-15) w[away] = 0.0;
    }

    // Periodically rebuild y from the weights to stop drift.
    if ((iter & 0xff) == 0xff) {
      double total = std::accumulate(w.begin(), w.end(), 0.0);
      std::fill(y.begin(), y.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (w[i] == 0.0) continue;
        w[i] /= total;
        auto ai = a.point(i);
        for (std::size_t j = 0; j < m; ++j) y[j] += w[i] * ai[j];
      }
    }
  }
  throw NumericalError("hull distance: projection did not certify the requested tolerance");
}

namespace {

// Objective for the nonconvexity search: distance from the hull point with
// weights `w` to the nearest cloud point.
double min_distance_to_cloud(const PointCloud& a, const std::vector<double>& y) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    best = std::min(best, point_distance(a.point(i), std::span<const double>(y)));
  }
  return best;
}

void hull_point(const PointCloud& a, const std::vector<double>& w,
                std::vector<double>& y) {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto ai = a.point(i);
    for (std::size_t j = 0; j < a.dim(); ++j) y[j] += w[i] * ai[j];
  }
}

// Deterministic coordinate ascent over simplex weights.  For each ordered
// pair (i, j) mass t is shifted from j to i; the best t on the feasible
// segment is located by coarse sampling plus golden-section shrinking.
double ascend(const PointCloud& a, std::vector<double> w) {
  const std::size_t n = a.size();
  std::vector<double> y(a.dim()), probe(a.dim());
  hull_point(a, w, y);
  double value = min_distance_to_cloud(a, y);

  auto eval_shift = [&](std::size_t i, std::size_t j, double t) {
    auto ai = a.point(i);
    auto aj = a.point(j);
    for (std::size_t k = 0; k < a.dim(); ++k) {
      probe[k] = y[k] + t * (ai[k] - aj[k]);
    }
    return min_distance_to_cloud(a, probe);
  };

  const int passes = 4;
  for (int pass = 0; pass < passes; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        double lo = -w[i], hi = w[j];
        if (hi - lo <= 0.0) continue;
        // coarse scan
        const int grid = 32;
        double best_t = 0.0, best_v = value;
        for (int s = 0; s <= grid; ++s) {
          double t = lo + (hi - lo) * s / grid;
          double v = eval_shift(i, j, t);
          if (v > best_v) {
            best_v = v;
            best_t = t;
          }
        }
        // golden-section shrink around the best coarse sample
        double span = (hi - lo) / grid;
        double a_t = std::max(lo, best_t - span), b_t = std::min(hi, best_t + span);
        const double phi = 0.6180339887498949;
        for (int step = 0; step < 80; ++step) {
          double t1 = b_t - phi * (b_t - a_t);
          double t2 = a_t + phi * (b_t - a_t);
          double v1 = eval_shift(i, j, t1);
          double v2 = eval_shift(i, j, t2);
          if (v1 >= v2) b_t = t2; else a_t = t1;
          double tm = 0.5 * (a_t + b_t);
          double vm = eval_shift(i, j, tm);
          if (vm > best_v) {
            best_v = vm;
            best_t = tm;
          }
        }
        if (best_v > value + 1e-15) {
          w[i] += best_t;
          w[j] -= best_t;
          w[i] = std::max(w[i], 0.0);
          w[j] = std::max(w[j], 0.0);
          double total = std::accumulate(w.begin(), w.end(), 0.0);
          for (auto& x : w) x /= total;
          hull_point(a, w, y);
          value = min_distance_to_cloud(a, y);
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return value;
}

}  // namespace

double nonconvexity(const PointCloud& a, std::size_t budget,
                    std::uint64_t seed) {
  const std::size_t n = a.size();
  if (budget < n) {
    throw ValidationError("nonconvexity: budget must be at least the cloud size");
  }

  SplitMix64 rng(mix_seed(seed, 0x6b7d3c1a90e542f7ull));
  std::vector<double> w, y(a.dim());

  // Prefix maxima of the sampled values; each is an ascent start.  A larger
  // budget only appends candidates, which keeps the estimate monotone.
  double best_raw = -1.0;
  std::vector<std::vector<double>> starts;
  for (std::size_t s = 0; s < budget; ++s) {
    rng.simplex_weights(n, w);
    hull_point(a, w, y);
    double v = min_distance_to_cloud(a, y);
    if (v > best_raw) {
      best_raw = v;
      starts.push_back(w);
    }
  }

  double result = std::max(best_raw, 0.0);
  for (const auto& start : starts) {
    result = std::max(result, ascend(a, start));
  }
  return result;
}

}  // namespace qmn
