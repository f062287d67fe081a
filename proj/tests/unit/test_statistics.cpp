#include <doctest.h>

#include <algorithm>
#include <vector>

#include "handcept/rot/statistics.hpp"
#include "../support/generators.hpp"

using namespace handcept;
using namespace handcept::testing;
using rot::UnitQuaternion;

namespace {

UnitQuaternion rz(double deg) { return UnitQuaternion::about(rot::Axis::Z, deg * kDeg); }

// Brute-force minimizer of the geodesic cost over rotations about z.
double grid_mean_deg(const std::vector<UnitQuaternion>& set, double lo, double hi, double step) {
  double best = lo, best_cost = 1e300;
  for (double a = lo; a <= hi; a += step) {
    const double c = rot::geodesic_cost(rz(a), set);
    if (c < best_cost) {
      best_cost = c;
      best = a;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("mean of identical samples is the sample") {
  std::mt19937_64 rng(21);
  const auto q = random_quaternion(rng);
  const std::vector<UnitQuaternion> set{q, q, q};
  const auto m = rot::quat_mean(set);
  CHECK(rot::quat_geodesic_distance(m.mean, q) < 1e-12);
  CHECK(m.unique);
  CHECK_THROWS_AS(rot::quat_mean(std::vector<UnitQuaternion>{}), std::invalid_argument);
}

TEST_CASE("mean of two z rotations is the midpoint") {
  const std::vector<UnitQuaternion> set{rz(0), rz(10)};
  const auto m = rot::quat_mean(set);
  CHECK(rot::quat_geodesic_distance(m.mean, rz(5)) < 1e-6);
  CHECK(std::abs(grid_mean_deg(set, 0, 10, 1e-4) - 5.0) < 1e-3);
}

TEST_CASE("mean beats a 0.01 degree sweep on single-axis sets") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<UnitQuaternion> set;
    const int n = 2 + trial % 4;
    for (int i = 0; i < n; ++i) set.push_back(rz(uniform(rng, -40, 40)));
    const auto m = rot::quat_mean(set);
    const double cost = rot::geodesic_cost(m.mean, set);
    for (double a = -60; a <= 60; a += 0.01) {
      CHECK(cost <= rot::geodesic_cost(rz(a), set) + 1e-15);
    }
    // the result stays on the z axis
    CHECK(std::abs(m.mean.x()) < 1e-12);
    CHECK(std::abs(m.mean.y()) < 1e-12);
  }
}

TEST_CASE("mean is permutation invariant and sign-blind") {
  std::mt19937_64 rng(23);
  const auto center = random_quaternion(rng);
  std::vector<UnitQuaternion> set;
  for (int i = 0; i < 7; ++i) set.push_back(center * small_perturbation(rng, 0.4));
  const auto m1 = rot::quat_mean(set);
  std::reverse(set.begin(), set.end());
  std::rotate(set.begin(), set.begin() + 3, set.end());
  const auto m2 = rot::quat_mean(set);
  CHECK(rot::quat_geodesic_distance(m1.mean, m2.mean) < 1e-10);
}

TEST_CASE("mean is left invariant") {
  std::mt19937_64 rng(24);
  std::vector<UnitQuaternion> set, moved;
  const auto g = random_quaternion(rng);
  for (int i = 0; i < 6; ++i) {
    set.push_back(small_perturbation(rng, 0.5));
    moved.push_back(g * set.back());
  }
  const auto m = rot::quat_mean(set).mean;
  CHECK(rot::quat_geodesic_distance(g * m, rot::quat_mean(moved).mean) < 1e-9);
}

TEST_CASE("antipodal pair has no unique mean") {
  const std::vector<UnitQuaternion> set{rz(0), rz(180)};
  CHECK_FALSE(rot::quat_mean(set).unique);
}

TEST_CASE("angular variance hand-computed examples") {
  const std::vector<UnitQuaternion> same{rz(7), rz(7), rz(7)};
  CHECK(rot::angular_variance(same, rz(7)).variance_deg2 == doctest::Approx(0.0));

  const std::vector<UnitQuaternion> pair{rz(0), rz(10)};
  CHECK(rot::angular_variance(pair, rz(5)).variance_deg2 == doctest::Approx(0.0).epsilon(1e-12));

  const std::vector<UnitQuaternion> triple{rz(0), rz(10), rz(20)};
  const auto s = rot::angular_variance(triple, rz(10));
  CHECK(s.variance_deg2 == doctest::Approx(200.0 / 9.0).epsilon(1e-10));
  CHECK(s.count == 3);
  CHECK_THROWS_AS(rot::angular_variance(std::vector<UnitQuaternion>{}, rz(0)), std::invalid_argument);
}

TEST_CASE("angular variance is invariant under a common rotation") {
  std::mt19937_64 rng(25);
  std::vector<UnitQuaternion> set, moved;
  const auto g = random_quaternion(rng);
  for (int i = 0; i < 20; ++i) {
    set.push_back(small_perturbation(rng, 0.2));
    moved.push_back(g * set.back());
  }
  const double v1 = rot::angular_variance(set, rot::quat_mean(set).mean).variance_deg2;
  const double v2 = rot::angular_variance(moved, rot::quat_mean(moved).mean).variance_deg2;
  CHECK(v1 == doctest::Approx(v2).epsilon(1e-8));
}
