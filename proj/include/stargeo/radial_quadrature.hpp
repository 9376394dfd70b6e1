#pragma once

#include <cstddef>
#include <functional>

namespace stargeo {

struct RadialIntegralOptions {
  double rel_tol = 1e-9;
  std::size_t initial_panels = 2;
  std::size_t max_panels = std::size_t{1} << 14;
};

/// Integral over t in [0, inf) of t^power * f(t), power > -1.
///
/// Maps t = s / (1 - s) onto [0, 1) and applies composite 32-point
/// Gauss-Legendre panels, doubling the panel count until the relative change
/// drops below rel_tol. The first panel is additionally split geometrically
/// toward s = 0 so integrable power singularities at the origin converge.
/// Throws DivergentMoment when the panel cap is reached first.
double radial_integral(const std::function<double(double)>& f, double power,
                       const RadialIntegralOptions& opts = {});

}  // namespace stargeo
