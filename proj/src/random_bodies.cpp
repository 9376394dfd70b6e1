#include "stargeo/random_bodies.hpp"

#include <cmath>

#include "stargeo/error.hpp"

namespace stargeo {

StarBody random_smooth_body(const GridPtr& grid, Rng& rng, const RandomBodyOptions& opts) {
  std::normal_distribution<double> normal(0.0, opts.amplitude);
  const double r0 = opts.base_radius;
  if (grid->dim() == 2) {
    std::vector<double> a(opts.modes), b(opts.modes);
    for (int k = 0; k < opts.modes; ++k) {
      // Higher modes decay so the boundary stays smooth.
      a[k] = normal(rng) / (k + 1);
      b[k] = normal(rng) / (k + 1);
    }
    return body_from_function(grid, [a, b, r0](const Vec& u) {
      const double t = std::atan2(u[1], u[0]);
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        s += a[k] * std::cos((k + 1.0) * t) + b[k] * std::sin((k + 1.0) * t);
      }
      return r0 * std::exp(s);
    }, "random");
  }
  Vec lin(3);
  Eigen::Matrix3d quad;
  for (int i = 0; i < 3; ++i) lin[i] = normal(rng);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) quad(i, j) = 0.5 * normal(rng);
  }
  quad = 0.5 * (quad + quad.transpose()).eval();
  return body_from_function(grid, [lin, quad, r0](const Vec& u) {
    return r0 * std::exp(lin.dot(u) + u.dot(quad * u));
  }, "random");
}

StarBody random_kernel_body(const GridPtr& grid, Rng& rng) {
  RandomBodyOptions opts{2.5, 0.08, 3};
  for (int attempt = 0; attempt < 200; ++attempt) {
    StarBody k = random_smooth_body(grid, rng, opts);
    if (kernel_contains_ball(k, 1.0)) return k.with_label("random kernel body");
  }
  throw Error(ErrorCode::InvalidArgument, "could not draw a body with the unit ball in its kernel");
}

}  // namespace stargeo
