#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "stargeo/adversarial.hpp"
#include "stargeo/error.hpp"
#include "stargeo/random_bodies.hpp"
#include "stargeo/transport.hpp"

using namespace stargeo;
using namespace fixtures;

namespace {

constexpr double kPi = std::numbers::pi;

class AdversarialTest : public ::testing::Test {
 protected:
  GridPtr grid = SphereGrid::make(2, 2048);
  Rng rng{17};

  AdversarialProblem gaussian_pair(double sr = 1.0, double sn = 0.5) const {
    return AdversarialProblem(isotropic_gaussian(2, sr), isotropic_gaussian(2, sn), grid);
  }

  StarBody random_unit_body() {
    const StarBody k = random_smooth_body(grid, rng);
    return dilate(k, std::pow(volume(k), -0.5));
  }
};

TEST_F(AdversarialTest, SameDensityGivesZeroLoss) {
  auto d = gaussian((Eigen::MatrixXd(2, 2) << 1.0, 0.4, 0.4, 0.7).finished());
  AdversarialProblem p(d, d, grid);
  EXPECT_NEAR(adversarial_loss(p, random_smooth_body(grid, rng)), 0.0, 1e-10);
}

TEST_F(AdversarialTest, LossMatchesDualMixedVolume) {
  const AdversarialProblem p = gaussian_pair();
  const StarBody l = build_Lrn(p);
  for (int t = 0; t < 10; ++t) {
    const StarBody k = random_smooth_body(grid, rng);
    const double loss = adversarial_loss(p, k);
    EXPECT_NEAR(loss / (2 * dual_mixed_volume(l, k, -1.0)), 1.0, 1e-10);
  }
}

TEST_F(AdversarialTest, LossMatchesMonteCarlo) {
  AdversarialProblem p(l1_gibbs(grid), scaled_l2_gibbs(grid, 1.6), grid);
  const StarBody k = random_smooth_body(grid, rng);
  const McEstimate mc = adversarial_loss_mc(p, k, 1000000, 4);
  EXPECT_LE(std::abs(mc.mean - adversarial_loss(p, k)), 3 * mc.std_err);
}

TEST_F(AdversarialTest, LossIsHomogeneousInScale) {
  const AdversarialProblem p = gaussian_pair();
  const StarBody k = random_smooth_body(grid, rng);
  for (double lam : {0.3, 2.0, 11.0}) {
    EXPECT_NEAR(adversarial_loss(p, dilate(k, lam)), adversarial_loss(p, k) / lam,
                1e-10 * std::abs(adversarial_loss(p, k) / lam));
  }
}

TEST_F(AdversarialTest, GaussianLrnIsDisk) {
  const StarBody l = build_Lrn(gaussian_pair(1.0, 0.5));
  const double expect = std::cbrt(0.5 / (2 * std::sqrt(2 * kPi)));
  for (std::size_t i = 0; i < grid->size(); i += 11) EXPECT_NEAR(l.profile()[i], expect, 1e-14);
}

TEST_F(AdversarialTest, ContainmentViolation) {
  const AdversarialProblem p = gaussian_pair(0.5, 1.0);
  try {
    build_Lrn(p);
    FAIL() << "expected an error";
  } catch (const ContainmentError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ContainmentViolated);
    EXPECT_LT(e.margin(), 0.0);
    EXPECT_NEAR(e.direction().norm(), 1.0, 1e-12);
  }
  EXPECT_THROW(build_Lrn(gaussian_pair(1.0, 1.0)), ContainmentError);
}

TEST_F(AdversarialTest, ExampleOneClosedForm) {
  const double alpha = 1.6;
  AdversarialProblem p(l1_gibbs(grid), scaled_l2_gibbs(grid, alpha), grid);
  const StarBody l = build_Lrn(p);
  const double c_r = 1.0 / 2.0;
  const double c_n = 2 * alpha * alpha / kPi;
  for (std::size_t i = 0; i < grid->size(); i += 5) {
    const Vec& u = grid->direction(i);
    const double m = c_r * std::pow(u.lpNorm<1>(), -3) -
                     c_n * std::pow(alpha * std::sqrt(2.0) * u.norm(), -3);
    EXPECT_NEAR(l.profile()[i], std::cbrt(m), 1e-5 * std::cbrt(m));
  }
}

TEST_F(AdversarialTest, OptimalAdversarialIsUnitDisk) {
  const StarBody k = optimal_adversarial(gaussian_pair());
  EXPECT_NEAR(volume(k), 1.0, 1e-9);
  for (std::size_t i = 0; i < grid->size(); i += 13) {
    EXPECT_NEAR(k.profile()[i], 1.0 / std::sqrt(kPi), 1e-12);
  }
}

TEST_F(AdversarialTest, OptimalityCertificate) {
  AdversarialProblem p(l1_gibbs(grid), scaled_l2_gibbs(grid, 1.6), grid);
  const StarBody ks = optimal_adversarial(p);
  const double best = adversarial_loss(p, ks);
  for (int t = 0; t < 100; ++t) {
    const StarBody k = random_unit_body();
    const double loss = adversarial_loss(p, k);
    EXPECT_LE(best, loss + 1e-9);
    if (!is_dilate(k, ks, 1e-9)) EXPECT_LT(best, loss);
  }
}

TEST_F(AdversarialTest, LipschitzInBody) {
  const auto g = SphereGrid::make(2, 256);
  const AdversarialProblem p(isotropic_gaussian(2, 1.0), isotropic_gaussian(2, 0.5), g);
  const double er = expected_gauge_quadrature(p.d_r(), unit_ball(g));
  const double en = expected_gauge_quadrature(p.d_n(), unit_ball(g));
  const double gamma = 1.0;
  for (int t = 0; t < 10; ++t) {
    const StarBody k = random_kernel_body(g, rng);
    const StarBody l = random_kernel_body(g, rng);
    const double lhs = std::abs(adversarial_loss(p, k) - adversarial_loss(p, l));
    EXPECT_LE(lhs, 1.1 * (er + en) / (gamma * gamma) * radial_metric(k, l));
  }
}

TEST_F(AdversarialTest, Reweighting) {
  auto d = isotropic_gaussian(2, 1.0);
  AdversarialProblem same(d, d, grid);
  const auto w = reweight_to_containment(same, 0.5);
  ASSERT_TRUE(w.has_value());
  EXPECT_NEAR(*w, 0.5, 1e-12);

  Eigen::MatrixXd cov(2, 2);
  cov << 0.1, 0.03, 0.03, 0.1;
  AdversarialProblem failing(gaussian(cov), isotropic_gaussian(2, 0.3), grid);
  EXPECT_THROW(build_Lrn(failing), ContainmentError);
  const auto lw = reweight_to_containment(failing, 0.1);
  ASSERT_TRUE(lw.has_value());
  const AdversarialProblem fixed = failing.with_noise_weight(*lw);
  EXPECT_NO_THROW(build_Lrn(fixed));
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double r3 = std::pow(fixed.profile_r()[i], 3);
    EXPECT_GE(fixed.net_moment(i), 0.1 * r3 * (1 - 1e-9));
  }
}

TEST_F(AdversarialTest, ScalingAlphaStar) {
  EXPECT_NEAR(scaling_alpha_star(unit_ball(grid), unit_ball(grid)), 0.5, 1e-12);
  for (int t = 0; t < 5; ++t) {
    const StarBody kr = random_smooth_body(grid, rng);
    const StarBody kn = random_smooth_body(grid, rng);
    const double a = scaling_alpha_star(kr, kn);
    EXPECT_GT(a, 0.0);
    auto dr = std::make_shared<GaugeGibbsDensity>(kr, 1.0, 1.0);
    auto dn = std::make_shared<GaugeGibbsDensity>(dilate(kn, a), 1.0, 1.0);
    EXPECT_NO_THROW(build_Lrn(AdversarialProblem(dr, dn, grid)));
  }
  const StarBody k = random_smooth_body(grid, rng);
  auto dr = std::make_shared<GaugeGibbsDensity>(dilate(k, 1.5), 1.0, 1.0);
  auto dn = std::make_shared<GaugeGibbsDensity>(k, 1.0, 1.0);
  EXPECT_NO_THROW(build_Lrn(AdversarialProblem(dr, dn, grid)));
}

TEST(Erm, ConvergesToClosedForm) {
  const auto grid = SphereGrid::make(2, 64);
  auto dr = isotropic_gaussian(2, 1.0);
  auto dn = isotropic_gaussian(2, 0.5);
  const StarBody ks = optimal_adversarial(AdversarialProblem(dr, dn, grid));
  Rng rng(1);
  const auto xr = draw_samples(*dr, 100000, rng);
  const auto xn = draw_samples(*dn, 100000, rng);
  const ErmResult res = erm_solve(xr, xn, grid);
  EXPECT_LE(radial_metric(res.body, ks), 0.05);
  EXPECT_NEAR(volume(res.body), 1.0, 1e-12);
  for (std::size_t i = 1; i < res.trace.size(); ++i) {
    EXPECT_LT(res.trace[i].loss, res.trace[i - 1].loss);
    EXPECT_NEAR(res.trace[i].volume, 1.0, 1e-12);
  }
}

TEST(Erm, MoreSamplesShrinkTheError) {
  const auto grid = SphereGrid::make(2, 64);
  auto dr = isotropic_gaussian(2, 1.0);
  auto dn = isotropic_gaussian(2, 0.5);
  const StarBody ks = optimal_adversarial(AdversarialProblem(dr, dn, grid));
  std::vector<double> mean_err;
  for (std::size_t n : {5000u, 10000u, 20000u, 40000u}) {
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed);
      const auto xr = draw_samples(*dr, n, rng);
      const auto xn = draw_samples(*dn, n, rng);
      total += radial_metric(erm_solve(xr, xn, grid).body, ks);
    }
    mean_err.push_back(total / 5);
  }
  for (std::size_t i = 1; i < mean_err.size(); ++i) EXPECT_LT(mean_err[i], mean_err[i - 1]);
}

TEST(Erm, IdenticalSamplesGiveZeroLoss) {
  const auto grid = SphereGrid::make(2, 64);
  Rng rng(2);
  const auto xs = draw_samples(*isotropic_gaussian(2, 1.0), 2000, rng);
  const ErmResult res = erm_solve(xs, xs, grid);
  for (const auto& row : res.trace) EXPECT_NEAR(row.loss, 0.0, 1e-12);
}

TEST(Erm, RejectsSpatialSamples) {
  const auto grid = SphereGrid::make(3, 100);
  std::vector<Vec> xs{Vec::Ones(3)};
  try {
    erm_solve(xs, xs, grid);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedDimension);
  }
}

TEST(W1Check, RequiresUnitBallInKernel) {
  const auto grid = SphereGrid::make(2, 256);
  AdversarialProblem p(isotropic_gaussian(2, 1.0), isotropic_gaussian(2, 0.5), grid);
  try {
    w1_lower_bound_check(p, unit_ball(grid, 0.5), 16, 1);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LipschitzViolated);
  }
}

TEST(W1Check, KantorovichBoundHolds) {
  const auto grid = SphereGrid::make(2, 256);
  AdversarialProblem p(isotropic_gaussian(2, 1.0), isotropic_gaussian(2, 0.5), grid);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const W1Check c = w1_lower_bound_check(p, unit_ball(grid, 1.5), 256, seed);
    EXPECT_TRUE(c.kantorovich_bound);
    EXPECT_TRUE(c.abs_bound);
    EXPECT_GT(c.f_se, 0.0);
  }
  AdversarialProblem same(isotropic_gaussian(2, 1.0), isotropic_gaussian(2, 1.0), grid);
  const W1Check z = w1_lower_bound_check(same, unit_ball(grid, 1.5), 256, 3);
  EXPECT_LE(std::abs(z.f_hat), 3 * z.f_se);
}

TEST(W1Check, GaugeDifferenceOfPointMasses) {
  // |a| - |b| <= |a - b| for K = B^2 and point masses at a and b.
  Rng rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    Vec a(2), b(2);
    a << n(rng), n(rng);
    b << n(rng), n(rng);
    const double w1 = w1_exact({a}, {b});
    EXPECT_NEAR(w1, (a - b).norm(), 1e-15);
    EXPECT_LE(a.norm() - b.norm(), w1 + 1e-15);
  }
}

}  // namespace
