#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "stargeo/error.hpp"
#include "stargeo/spherequad.hpp"

using namespace stargeo;

namespace {

constexpr double kPi = std::numbers::pi;

TEST(SphereGrid, FourPointCircle) {
  const auto g = SphereGrid::make(2, 4);
  ASSERT_EQ(g->size(), 4u);
  const double expect[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(g->direction(i)(0), expect[i][0], 1e-15);
    EXPECT_NEAR(g->direction(i)(1), expect[i][1], 1e-15);
    EXPECT_DOUBLE_EQ(g->weight(i), kPi / 2);
  }
}

TEST(SphereGrid, WeightsSumToSurfaceArea) {
  for (std::size_t n : {8u, 100u, 2048u}) {
    const auto g = SphereGrid::make(2, n);
    double s = 0.0;
    for (double w : g->weights()) {
      EXPECT_GT(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(s, 2 * kPi, 1e-12);
  }
  const auto g3 = SphereGrid::make(3, 1000);
  EXPECT_NEAR(g3->integrate([](const Vec&) { return 1.0; }) / (4 * kPi), 1.0, 1e-6);
}

TEST(SphereGrid, DirectionsAreUnit) {
  for (int d : {2, 3}) {
    const auto g = SphereGrid::make(d, 777);
    for (const auto& u : g->directions()) EXPECT_NEAR(u.norm(), 1.0, 1e-12);
  }
}

TEST(SphereGrid, RejectsUnsupportedDimension) {
  try {
    SphereGrid::make(4, 100);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedDimension);
  }
}

TEST(SphereGrid, PlanarIntegrals) {
  const auto g = SphereGrid::make(2, 2048);
  EXPECT_NEAR(g->integrate([](const Vec&) { return 1.0; }), 2 * kPi, 1e-12);
  EXPECT_NEAR(g->integrate([](const Vec& u) { return u(0) * u(0); }), kPi, 1e-12);
  EXPECT_NEAR(g->integrate([](const Vec& u) { return u(0); }), 0.0, 1e-12);
}

TEST(SphereGrid, NonFiniteIntegrandThrows) {
  const auto g = SphereGrid::make(2, 16);
  try {
    g->integrate([](const Vec& u) { return u(1) == 0.0 ? std::nan("") : 1.0; });
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteIntegrand);
  }
}

TEST(SphereGrid, TrigPolynomialExactness) {
  const std::size_t n = 64;
  const auto g = SphereGrid::make(2, n);
  for (int k = 1; k < static_cast<int>(n / 2); ++k) {
    const double v = g->integrate([&](const Vec& u) {
      const double t = std::atan2(u(1), u(0));
      return std::cos(k * t) + std::sin(k * t);
    });
    EXPECT_NEAR(v, 0.0, 1e-12) << "degree " << k;
  }
}

TEST(SphereGrid, RefinementDecreasesError) {
  // Integral of |cos t|^3 over the circle is 8/3.
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n : {64u, 128u, 256u, 512u}) {
    const auto g = SphereGrid::make(2, n);
    const double v = g->integrate([](const Vec& u) { return std::pow(std::abs(u(0)), 3); });
    const double err = std::abs(v - 8.0 / 3.0);
    EXPECT_LT(err, prev);
    prev = err;
  }
}

TEST(SphereGrid, FibonacciSecondMoment) {
  const auto g = SphereGrid::make(3, 20000);
  const double v = g->integrate([](const Vec& u) { return u(2) * u(2); });
  EXPECT_NEAR(v / (4 * kPi / 3), 1.0, 1e-3);
}

TEST(SphereGrid, NearestAndBracket) {
  const auto g = SphereGrid::make(2, 8);
  Vec u(2);
  u << std::cos(0.1), std::sin(0.1);
  EXPECT_EQ(g->nearest(u), 0u);
  const auto [i, t] = g->bracket(u);
  EXPECT_EQ(i, 0u);
  EXPECT_NEAR(t, 0.1 / (kPi / 4), 1e-12);
  const auto g3 = SphereGrid::make(3, 500);
  EXPECT_EQ(g3->nearest(g3->direction(123)), 123u);
}

TEST(SphereGrid, SameNodes) {
  EXPECT_TRUE(SphereGrid::make(2, 64)->same_nodes(*SphereGrid::make(2, 64)));
  EXPECT_FALSE(SphereGrid::make(2, 64)->same_nodes(*SphereGrid::make(2, 65)));
}

TEST(SphereGrid, BallVolumes) {
  EXPECT_NEAR(unit_ball_volume(1), 2.0, 1e-15);
  EXPECT_NEAR(unit_ball_volume(2), kPi, 1e-15);
  EXPECT_NEAR(unit_ball_volume(3), 4 * kPi / 3, 1e-14);
  EXPECT_NEAR(sphere_area(2), 2 * kPi, 1e-15);
  EXPECT_NEAR(sphere_area(3), 4 * kPi, 1e-14);
}

}  // namespace
