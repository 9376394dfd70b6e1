#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "stargeo/random_bodies.hpp"
#include "stargeo/weakconvex.hpp"

using namespace stargeo;
using namespace fixtures;

namespace {

class WeakConvexTest : public ::testing::Test {
 protected:
  GridPtr grid = SphereGrid::make(2, 4096);

  StarBody mixture_body(double eps = 0.1) const {
    return moment_profile(two_gaussian_mixture(eps), 1.0, grid).to_body("mixture");
  }
};

TEST_F(WeakConvexTest, M2Examples) {
  Rng rng(3);
  const StarBody k = random_smooth_body(grid, rng);
  EXPECT_EQ(radial_metric(m2(k, 0.0), k), 0.0);
  EXPECT_LT(radial_metric(m2(unit_ball(grid), 2.0), unit_ball(grid, 1.0 / std::sqrt(2.0))),
            1e-15);
  std::normal_distribution<double> n(0.0, 1.5);
  for (double rho : {0.5, 10.0}) {
    const StarBody m = m2(k, rho);
    for (int t = 0; t < 100; ++t) {
      Vec x(2);
      x << n(rng), n(rng);
      const double want = std::pow(gauge(k, x), 2) + rho / 2 * x.squaredNorm();
      EXPECT_NEAR(std::pow(gauge(m, x), 2), want, 1e-10 * want);
    }
  }
}

TEST_F(WeakConvexTest, ConvexAndNonconvexBodies) {
  EXPECT_TRUE(is_weakly_convex(unit_ball(grid), 0.0));
  EXPECT_TRUE(is_weakly_convex(lp_ball(grid, 1.0), 0.0));
  EXPECT_FALSE(is_weakly_convex(lp_ball(grid, 0.5), 0.0));
  EXPECT_EQ(rho_star(unit_ball(grid), 100.0).value_or(-1.0), 0.0);
}

TEST_F(WeakConvexTest, MixtureBody) {
  const StarBody k = mixture_body();
  EXPECT_FALSE(is_weakly_convex(k, 10.0));
  EXPECT_TRUE(is_weakly_convex(k, 100.0));
  const auto rs = rho_star(k, 100.0, 0.1);
  ASSERT_TRUE(rs.has_value());
  EXPECT_GT(*rs, 10.0);
  EXPECT_LE(*rs, 100.0);
  EXPECT_TRUE(is_weakly_convex(k, *rs + 0.1));
  EXPECT_FALSE(is_weakly_convex(k, *rs - 0.1));
  EXPECT_FALSE(rho_star(k, 5.0, 0.1).has_value());
}

TEST_F(WeakConvexTest, ConvexityIsMonotoneInRho) {
  const StarBody k = mixture_body(0.2);
  bool seen = false;
  for (double rho = 0.0; rho <= 120.0; rho += 2.0) {
    const bool c = is_weakly_convex(k, rho);
    if (seen) EXPECT_TRUE(c) << "rho " << rho;
    seen = seen || c;
  }
  EXPECT_TRUE(seen);
}

TEST_F(WeakConvexTest, Report) {
  const StarBody k = mixture_body();
  const WeakConvexityReport r = weak_convexity_report(k, {10.0, 50.0, 100.0}, 100.0);
  ASSERT_EQ(r.probes.size(), 3u);
  EXPECT_FALSE(r.probes[0].second);
  EXPECT_TRUE(r.probes[2].second);
  EXPECT_EQ(r.grid_size, 4096u);
  EXPECT_DOUBLE_EQ(r.cap, 100.0);
  ASSERT_TRUE(r.rho_star.has_value());
}

}  // namespace
