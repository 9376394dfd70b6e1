#pragma once

#include "stargeo/density.hpp"
#include "stargeo/starbody.hpp"

namespace stargeo {

struct RandomBodyOptions {
  double base_radius = 1.0;
  /// Standard deviation of each log-radius coefficient.
  double amplitude = 0.25;
  int modes = 4;
};

/// Smooth body rho(u) = r0 exp(s(u)) with s a random low-order trigonometric
/// (d = 2) or polynomial (d = 3) function; kept in closed form.
StarBody random_smooth_body(const GridPtr& grid, Rng& rng, const RandomBodyOptions& opts = {});

/// Random smooth body with the unit ball in its kernel.
StarBody random_kernel_body(const GridPtr& grid, Rng& rng);

}  // namespace stargeo
