#include <doctest.h>

#include <cmath>
#include <vector>

#include "qmn/errors.hpp"
#include "qmn/geometry.hpp"
#include "qmn/random.hpp"
#include "support/oracles.hpp"

using qmn::KCenterMode;
using qmn::PointCloud;
using qmn::SplitMix64;

namespace {

PointCloud random_cloud(SplitMix64& rng, std::size_t dim, std::size_t count,
                        double lo = -1.0, double hi = 1.0) {
  std::vector<double> flat(dim * count);
  for (double& v : flat) v = rng.uniform(lo, hi);
  return PointCloud(dim, std::move(flat));
}

}  // namespace

TEST_CASE("point cloud validates its input") {
  CHECK_THROWS_AS(PointCloud(0, {1.0}), qmn::ValidationError);
  CHECK_THROWS_AS(PointCloud(2, {}), qmn::ValidationError);
  CHECK_THROWS_AS(PointCloud(2, {1.0, 2.0, 3.0}), qmn::ValidationError);
  CHECK_THROWS_AS(PointCloud(1, {std::nan("")}), qmn::ValidationError);

  PointCloud c(2, {0.0, 0.0, 3.0, 4.0});
  CHECK(c.size() == 2);
  CHECK(qmn::point_distance(c.point(0), c.point(1)) == doctest::Approx(5.0));
}

TEST_CASE("hausdorff distance on known sets") {
  PointCloud a(1, {0.0, 1.0});
  PointCloud b(1, {0.0, 1.0, 2.0});
  CHECK(qmn::hausdorff_distance(a, a) == 0.0);
  CHECK(qmn::hausdorff_distance(a, b) == doctest::Approx(1.0));
  CHECK(qmn::hausdorff_distance(b, a) == doctest::Approx(1.0));

  // Duplicated points change nothing: equality as sets.
  PointCloud a2(1, {0.0, 0.0, 1.0});
  CHECK(qmn::hausdorff_distance(a, a2) == 0.0);
}

TEST_CASE("hausdorff distance is a metric on random clouds") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t dim = 1 + rng.below(3);
    PointCloud a = random_cloud(rng, dim, 1 + rng.below(8));
    PointCloud b = random_cloud(rng, dim, 1 + rng.below(8));
    PointCloud c = random_cloud(rng, dim, 1 + rng.below(8));
    double ab = qmn::hausdorff_distance(a, b);
    double ba = qmn::hausdorff_distance(b, a);
    double bc = qmn::hausdorff_distance(b, c);
    double ac = qmn::hausdorff_distance(a, c);
    CHECK(ab == ba);
    CHECK(ac <= ab + bc + 1e-12);
  }
}

TEST_CASE("exhaustive k-center matches the recursive oracle") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t dim = 1 + rng.below(3);
    std::size_t count = 2 + rng.below(8);
    std::size_t k = 1 + rng.below(3);
    PointCloud cloud = random_cloud(rng, dim, count);
    double got = qmn::kcenter_radius(cloud, k, KCenterMode::exhaustive);
    CHECK(got == doctest::Approx(oracle::kcenter_radius(cloud, k)).epsilon(1e-12));
  }
}

TEST_CASE("k-center handles the collinear example and edge budgets") {
  PointCloud cloud(1, {0.0, 1.0, 2.0, 3.0});
  // Two centers drawn from the set: {0,1,2,3} splits as {0,1} and {2,3}.
  CHECK(qmn::kcenter_radius(cloud, 2, KCenterMode::exhaustive) == doctest::Approx(1.0));
  CHECK(qmn::kcenter_radius(cloud, 4, KCenterMode::exhaustive) == 0.0);
  CHECK(qmn::kcenter_radius(cloud, 9, KCenterMode::exhaustive) == 0.0);
  CHECK_THROWS_AS(qmn::kcenter_radius(cloud, 0, KCenterMode::exhaustive),
                  qmn::ValidationError);

  // Centers stay inside the set, so one center for {0,1} costs the full gap.
  PointCloud pair(1, {0.0, 1.0});
  CHECK(qmn::kcenter_radius(pair, 1, KCenterMode::exhaustive) == doctest::Approx(1.0));
}

TEST_CASE("exhaustive mode rejects clouds beyond the cap") {
  SplitMix64 rng(5);
  PointCloud big = random_cloud(rng, 2, 15);
  CHECK_THROWS_AS(qmn::kcenter_radius(big, 2, KCenterMode::exhaustive, 14),
                  qmn::ValidationError);
  CHECK_NOTHROW(qmn::kcenter_radius(big, 2, KCenterMode::greedy, 14));
}

TEST_CASE("greedy k-center stays within twice the optimum") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t dim = 1 + rng.below(3);
    std::size_t count = 2 + rng.below(10);
    std::size_t k = 1 + rng.below(4);
    PointCloud cloud = random_cloud(rng, dim, count);
    double opt = qmn::kcenter_radius(cloud, k, KCenterMode::exhaustive);
    double greedy = qmn::kcenter_radius(cloud, k, KCenterMode::greedy);
    if (opt == 0.0) {
      CHECK(greedy <= 1e-12);
    } else {
      CHECK(greedy >= opt - 1e-12);
      CHECK(greedy <= 2.0 * opt + 1e-12);
    }
  }
}

TEST_CASE("hull distance agrees with interval arithmetic in 1-d") {
  PointCloud cloud(1, {-1.0, 0.25, 2.0});
  double p0 = 0.5, p1 = 3.5, p2 = -4.0;
  CHECK(qmn::hull_distance({&p0, 1}, cloud) <= 1e-9);
  CHECK(qmn::hull_distance({&p1, 1}, cloud) == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(qmn::hull_distance({&p2, 1}, cloud) == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("hull distance agrees with the planar oracle") {
  SplitMix64 rng(47);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t count = 1 + rng.below(9);
    PointCloud cloud = random_cloud(rng, 2, count);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < count; ++i) {
      pts.push_back({cloud.point(i)[0], cloud.point(i)[1]});
    }
    double p[2] = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    double want = oracle::hull_distance_2d(p[0], p[1], pts);
    double got = qmn::hull_distance({p, 2}, cloud);
    CHECK(std::abs(got - want) <= 1e-7);
  }
}

TEST_CASE("hull distance vanishes on convex combinations") {
  SplitMix64 rng(59);
  std::vector<double> weights;
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t dim = 1 + rng.below(4);
    std::size_t count = 1 + rng.below(7);
    PointCloud cloud = random_cloud(rng, dim, count);
    rng.simplex_weights(count, weights);
    std::vector<double> p(dim, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t d = 0; d < dim; ++d) p[d] += weights[i] * cloud.point(i)[d];
    }
    CHECK(qmn::hull_distance(p, cloud) <= 1e-9);
  }
}

TEST_CASE("hull distance is 1-Lipschitz in the query point") {
  SplitMix64 rng(61);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t dim = 1 + rng.below(3);
    PointCloud cloud = random_cloud(rng, dim, 1 + rng.below(6));
    std::vector<double> p(dim), q(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      p[d] = rng.uniform(-2.0, 2.0);
      q[d] = rng.uniform(-2.0, 2.0);
    }
    double dp = qmn::hull_distance(p, cloud);
    double dq = qmn::hull_distance(q, cloud);
    CHECK(std::abs(dp - dq) <= qmn::point_distance(p, q) + 2e-9);
  }
}

TEST_CASE("hull defect of a pair is half the gap") {
  PointCloud pair(1, {0.0, 1.0});
  CHECK(qmn::nonconvexity(pair, 200, 7) == doctest::Approx(0.5).epsilon(1e-9));

  PointCloud single(2, {0.3, -0.4});
  CHECK(qmn::nonconvexity(single, 10, 7) == 0.0);
}

TEST_CASE("hull defect of the right triangle is the circumradius") {
  PointCloud tri(2, {0.0, 0.0, 1.0, 0.0, 0.0, 1.0});
  double got = qmn::nonconvexity(tri, 10000, 7);
  CHECK(got == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(2e-3));
}

TEST_CASE("hull defect matches the 1-d gap oracle and never exceeds it") {
  SplitMix64 rng(83);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t count = 2 + rng.below(7);
    std::vector<double> values(count);
    for (double& v : values) v = rng.uniform(0.0, 1.0);
    PointCloud cloud(1, std::vector<double>(values));
    double want = oracle::kappa_1d(values);
    double got = qmn::nonconvexity(cloud, 2000, 17);
    CHECK(got <= want + 1e-9);
    CHECK(got >= want - 1e-6);
  }
}

TEST_CASE("hull defect estimate is monotone in the budget") {
  SplitMix64 rng(97);
  PointCloud cloud = random_cloud(rng, 2, 6);
  double prev = 0.0;
  for (std::size_t budget : {6u, 20u, 100u, 400u}) {
    double got = qmn::nonconvexity(cloud, budget, 3);
    CHECK(got >= prev - 1e-15);
    prev = got;
  }
  CHECK_THROWS_AS(qmn::nonconvexity(cloud, 5, 3), qmn::ValidationError);
}
