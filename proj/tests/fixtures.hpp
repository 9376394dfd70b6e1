#pragma once

#include <cmath>
#include <memory>
#include <numbers>

#include "stargeo/density.hpp"
#include "stargeo/starbody.hpp"

namespace fixtures {

using namespace stargeo;

inline DensityPtr isotropic_gaussian(int dim, double sigma) {
  return std::make_shared<GaussianDensity>(Vec::Zero(dim),
                                           sigma * sigma * Eigen::MatrixXd::Identity(dim, dim));
}

inline DensityPtr gaussian(const Eigen::MatrixXd& cov) {
  return std::make_shared<GaussianDensity>(Vec::Zero(cov.rows()), cov);
}

/// e^{-|x|_1} normalized, and the scaled l2 Gibbs density with radius
/// 1 / (alpha sqrt(d)).
inline DensityPtr l1_gibbs(const GridPtr& grid) {
  return std::make_shared<GaugeGibbsDensity>(lp_ball(grid, 1.0), 1.0, 1.0);
}

inline DensityPtr scaled_l2_gibbs(const GridPtr& grid, double alpha) {
  const double r = 1.0 / (alpha * std::sqrt(static_cast<double>(grid->dim())));
  return std::make_shared<GaugeGibbsDensity>(unit_ball(grid, r), 1.0, 1.0);
}

/// 1/2 N(0, diag(1, eps)) + 1/2 N(0, diag(eps, 1)).
inline DensityPtr two_gaussian_mixture(double eps) {
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 1.0, 0.0, 0.0, eps;
  b << eps, 0.0, 0.0, 1.0;
  return std::make_shared<MixtureDensity>(std::vector<double>{0.5, 0.5},
                                          std::vector<DensityPtr>{gaussian(a), gaussian(b)});
}

inline DensityPtr uniform_on(const StarBody& k) { return std::make_shared<UniformBodyDensity>(k); }

}  // namespace fixtures
