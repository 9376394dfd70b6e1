#pragma once

#include <optional>
#include <vector>

#include "stargeo/starbody.hpp"

namespace stargeo {

/// K with (rho / 2) B^d added in the harmonic 2-sense:
/// |x|_M^2 = |x|_K^2 + (rho / 2) |x|^2.
StarBody m2(const StarBody& k, double rho);

/// Planar test: the squared gauge plus (rho / 2)|x|^2 is convex.
bool is_weakly_convex(const StarBody& k, double rho, double tol = 1e-8);

/// Smallest rho in [0, cap] (to within tol) with M_{2,rho} convex, found by
/// bisection. Empty when M_{2,cap} is still nonconvex.
std::optional<double> rho_star(const StarBody& k, double cap, double tol = 0.1);

struct WeakConvexityReport {
  std::vector<std::pair<double, bool>> probes;
  std::optional<double> rho_star;
  double cap = 0.0;
  double tol = 0.0;
  std::size_t grid_size = 0;
};

WeakConvexityReport weak_convexity_report(const StarBody& k, const std::vector<double>& probes,
                                          double cap, double tol = 0.1);

}  // namespace stargeo
