#include "stargeo/weakconvex.hpp"

#include <cmath>

#include "stargeo/error.hpp"

namespace stargeo {

StarBody m2(const StarBody& k, double rho) {
  if (!(rho >= 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be nonnegative");
  if (rho == 0.0) return k;
  return harmonic_combination(k, unit_ball(k.grid_ptr()), 1.0, rho / 2.0, 2.0)
      .with_label("M2(" + k.label() + ")");
}

bool is_weakly_convex(const StarBody& k, double rho, double tol) {
  if (k.dim() != 2) throw Error(ErrorCode::UnsupportedDimension, "convexity test is planar");
  return is_convex_2d(m2(k, rho), tol);
}

std::optional<double> rho_star(const StarBody& k, double cap, double tol) {
  if (!(cap >= 0.0) || !(tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rho_star needs cap >= 0 and tol > 0");
  }
  if (is_weakly_convex(k, 0.0)) return 0.0;
  if (!is_weakly_convex(k, cap)) return std::nullopt;
  double lo = 0.0;
  double hi = cap;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (is_weakly_convex(k, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

WeakConvexityReport weak_convexity_report(const StarBody& k, const std::vector<double>& probes,
                                          double cap, double tol) {
  WeakConvexityReport r;
  for (double p : probes) r.probes.emplace_back(p, is_weakly_convex(k, p));
  r.rho_star = rho_star(k, cap, tol);
  r.cap = cap;
  r.tol = tol;
  r.grid_size = k.grid().size();
  return r;
}

}  // namespace stargeo
