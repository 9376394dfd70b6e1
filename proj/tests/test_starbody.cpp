#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "stargeo/error.hpp"
#include "stargeo/random_bodies.hpp"
#include "stargeo/starbody.hpp"

using namespace stargeo;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

class StarBodyTest : public ::testing::Test {
 protected:
  GridPtr grid = SphereGrid::make(2, 2048);
  Rng rng{7};

  Vec random_point() {
    std::normal_distribution<double> n(0.0, 2.0);
    return v2(n(rng), n(rng));
  }
};

TEST_F(StarBodyTest, GaugeExamples) {
  EXPECT_NEAR(gauge(unit_ball(grid), v2(3, 4)), 5.0, 1e-12);
  EXPECT_NEAR(gauge(lp_ball(grid, 1.0), v2(1, 1)), 2.0, 1e-12);
  EXPECT_EQ(gauge(unit_ball(grid), v2(0, 0)), 0.0);
  const StarBody k = random_smooth_body(grid, rng);
  for (int i = 0; i < 20; ++i) {
    const Vec x = random_point();
    EXPECT_NEAR(gauge(k, 2.0 * x), 2.0 * gauge(k, x), 1e-12 * gauge(k, x));
  }
}

TEST_F(StarBodyTest, GaugeRadialDuality) {
  const StarBody k = random_smooth_body(grid, rng);
  for (std::size_t i = 0; i < grid->size(); i += 7) {
    const Vec& u = grid->direction(i);
    EXPECT_NEAR(gauge(k, k.profile()[i] * u), 1.0, 1e-12);
  }
}

TEST_F(StarBodyTest, HomogeneousExtension) {
  const StarBody k = random_smooth_body(grid, rng);
  for (int i = 0; i < 20; ++i) {
    const Vec x = random_point();
    const double t = 0.1 + 3.0 * i;
    EXPECT_NEAR(k.profile().at(t * x), k.profile().at(x) / t, 1e-12 * k.profile().at(x) / t);
  }
}

TEST_F(StarBodyTest, InterpolationMatchesNodes) {
  std::vector<double> vals(grid->size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = 1.0 + 0.3 * std::cos(grid->angle(i));
  const StarBody k{RadialProfile(grid, vals)};
  EXPECT_EQ(k.profile().interpolation(), Interpolation::PeriodicLinear);
  EXPECT_NEAR(k.radius(grid->direction(17)), vals[17], 1e-14);
  const double mid = 0.5 * (grid->angle(17) + grid->angle(18));
  EXPECT_NEAR(k.radius(v2(std::cos(mid), std::sin(mid))), 0.5 * (vals[17] + vals[18]), 1e-12);
}

TEST_F(StarBodyTest, RejectsNonPositiveProfile) {
  std::vector<double> vals(grid->size(), 1.0);
  vals[5] = 0.0;
  try {
    RadialProfile p(grid, vals);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PositivityViolated);
  }
}

TEST_F(StarBodyTest, Volumes) {
  EXPECT_NEAR(volume(unit_ball(grid)), kPi, 1e-9);
  const auto fine = SphereGrid::make(2, 16384);
  EXPECT_NEAR(volume(lp_ball(fine, 1.0)), 2.0, 1e-6);
  EXPECT_NEAR(volume(lp_ball(fine, kInf)), 4.0, 1e-6);
  const StarBody k = random_smooth_body(grid, rng);
  EXPECT_NEAR(volume(dilate(k, 1.7)), 1.7 * 1.7 * volume(k), 1e-12 * volume(k));
  Eigen::MatrixXd m(2, 2);
  m << 2.0, 0.5, 0.0, 1.0;
  EXPECT_NEAR(volume(ellipsoid(grid, m)), kPi / 2.0, 1e-9);
  const auto g3 = SphereGrid::make(3, 20000);
  EXPECT_NEAR(volume(unit_ball(g3)) / (4 * kPi / 3), 1.0, 1e-9);
}

TEST_F(StarBodyTest, DualMixedVolumes) {
  const StarBody k = random_smooth_body(grid, rng);
  for (double i : {-1.0, 0.0, 3.0}) {
    EXPECT_NEAR(dual_mixed_volume(k, k, i), volume(k), 1e-12 * volume(k));
  }
  EXPECT_NEAR(dual_mixed_volume(unit_ball(grid), unit_ball(grid, 2.0), -1.0), kPi / 2, 1e-12);
  const StarBody l = dilate(k, 1.7);
  const double lhs = std::pow(dual_mixed_volume(l, k, -1.0), 2);
  const double rhs = std::pow(volume(l), 3) / volume(k);
  EXPECT_NEAR(lhs / rhs, 1.0, 1e-9);
}

TEST_F(StarBodyTest, GridMismatchThrows) {
  const auto other = SphereGrid::make(2, 100);
  try {
    dual_mixed_volume(unit_ball(grid), unit_ball(other), 1.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
  EXPECT_THROW(radial_metric(unit_ball(grid), unit_ball(other)), Error);
}

TEST_F(StarBodyTest, LutwakInequality) {
  for (int t = 0; t < 30; ++t) {
    const StarBody k = random_smooth_body(grid, rng);
    const StarBody l = random_smooth_body(grid, rng);
    const double lhs = std::pow(dual_mixed_volume(l, k, -1.0), 2);
    const double rhs = std::pow(volume(l), 3) / volume(k);
    EXPECT_GE(lhs, rhs * (1 - 1e-9));
    if (!is_dilate(k, l, 1e-9)) EXPECT_GT(lhs / rhs - 1.0, 1e-9);
  }
}

TEST_F(StarBodyTest, GeneralLutwakChain) {
  const int d = 2;
  for (double a : {0.25, 0.5, 0.75}) {
    for (int t = 0; t < 10; ++t) {
      const StarBody k = random_smooth_body(grid, rng);
      const StarBody l = random_smooth_body(grid, rng);
      const double lhs = dual_mixed_volume(l, k, -a);
      const double rhs = std::pow(volume(l), (d + a) / d) * std::pow(volume(k), -a / d);
      EXPECT_GE(lhs, rhs * (1 - 1e-12));
    }
  }
}

TEST_F(StarBodyTest, RadialMetric) {
  const StarBody k = random_smooth_body(grid, rng);
  EXPECT_EQ(radial_metric(k, k), 0.0);
  EXPECT_NEAR(radial_metric(unit_ball(grid), unit_ball(grid, 2.0)), 1.0, 1e-15);
  for (int t = 0; t < 20; ++t) {
    const StarBody a = random_smooth_body(grid, rng);
    const StarBody b = random_smooth_body(grid, rng);
    const StarBody c = random_smooth_body(grid, rng);
    EXPECT_LE(radial_metric(a, c), radial_metric(a, b) + radial_metric(b, c) + 1e-15);
  }
}

TEST_F(StarBodyTest, HarmonicCombination) {
  const StarBody k = random_smooth_body(grid, rng);
  EXPECT_LT(radial_metric(harmonic_combination(k, unit_ball(grid), 1.0, 0.0, 2.0), k), 1e-14);
  const StarBody half = harmonic_combination(unit_ball(grid), unit_ball(grid), 1.0, 1.0, 2.0);
  EXPECT_LT(radial_metric(half, unit_ball(grid, 1.0 / std::sqrt(2.0))), 1e-14);
  const double rho = 3.0;
  const StarBody m = harmonic_combination(k, unit_ball(grid), 1.0, rho / 2, 2.0);
  for (int t = 0; t < 50; ++t) {
    const Vec x = random_point();
    const double lhs = std::pow(gauge(m, x), 2);
    const double rhs = std::pow(gauge(k, x), 2) + rho / 2 * x.squaredNorm();
    EXPECT_NEAR(lhs, rhs, 1e-10 * rhs);
  }
  try {
    harmonic_combination(k, k, 0.0, 0.0, 1.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateCombination);
  }
}

TEST_F(StarBodyTest, Dilates) {
  const StarBody k = random_smooth_body(grid, rng);
  const auto lam = is_dilate(dilate(k, 2.0), k, 1e-9);
  ASSERT_TRUE(lam.has_value());
  EXPECT_NEAR(*lam, 2.0, 1e-12);
  EXPECT_FALSE(is_dilate(unit_ball(grid), lp_ball(grid, 1.0), 1e-9).has_value());
  std::vector<double> vals(grid->size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    vals[i] = k.profile()[i] * (1.0 + grid->direction(i)(0) * 1e-12);
  }
  const auto near = is_dilate(k, StarBody(RadialProfile(grid, vals)), 1e-9);
  ASSERT_TRUE(near.has_value());
  EXPECT_NEAR(*near, 1.0, 1e-11);
}

TEST_F(StarBodyTest, Monotonicity) {
  const StarBody k = random_smooth_body(grid, rng);
  const StarBody l = dilate(k, 1.3);
  for (int t = 0; t < 20; ++t) {
    const Vec x = random_point();
    EXPECT_GE(gauge(k, x), gauge(l, x));
  }
}

TEST_F(StarBodyTest, KernelContainsBall) {
  EXPECT_TRUE(kernel_contains_ball(unit_ball(grid, 2.0), 1.0));
  EXPECT_FALSE(kernel_contains_ball(unit_ball(grid, 0.5), 1.0));
  const auto g = SphereGrid::make(2, 256);
  const auto prof = moment_profile(fixtures::two_gaussian_mixture(0.1), 1.0, g);
  const StarBody mix{RadialProfile(g, {prof.values().begin(), prof.values().end()})};
  EXPECT_TRUE(kernel_contains_ball(mix, 0.01));
  // Brute force with ten times as many points on every segment and ball.
  KernelCheckOptions dense;
  dense.ball_samples = 640;
  dense.segment_points = 160;
  for (double gamma : {0.05, 0.1, 0.2}) {
    EXPECT_EQ(kernel_contains_ball(mix, gamma), kernel_contains_ball(mix, gamma, dense))
        << "gamma " << gamma;
  }
}

TEST_F(StarBodyTest, Convexity) {
  const auto g = SphereGrid::make(2, 4096);
  EXPECT_TRUE(is_convex_2d(unit_ball(g)));
  EXPECT_TRUE(is_convex_2d(lp_ball(g, 1.0)));
  EXPECT_TRUE(is_convex_2d(lp_ball(g, kInf)));
  EXPECT_FALSE(is_convex_2d(lp_ball(g, 0.5)));
}

TEST_F(StarBodyTest, MaxRadiusBound) {
  EXPECT_NEAR(max_radius_bound(2, 1.0), 1.5, 1e-15);
  EXPECT_NEAR(max_radius_bound(3, 1.0), 4.0 / kPi, 1e-15);
  const auto g = SphereGrid::make(2, 512);
  for (int t = 0; t < 5; ++t) {
    const StarBody k = random_kernel_body(g, rng);
    const double gamma = std::pow(volume(k), -0.5);
    const StarBody unit = dilate(k, gamma);
    ASSERT_TRUE(kernel_contains_ball(unit, gamma * (1 - 1e-9)));
    EXPECT_LE(unit.profile().max(), max_radius_bound(2, gamma));
  }
}

}  // namespace
