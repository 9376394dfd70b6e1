#include "stargeo/divergence.hpp"

#include <cmath>
#include <limits>

#include "stargeo/error.hpp"

namespace stargeo {

namespace {

constexpr double kDoubleRootTol = 1e-12;

std::vector<double> profile_values(const DensityPtr& d, double beta, const GridPtr& grid) {
  const MomentProfile p = moment_profile(d, beta, grid);
  return {p.values().begin(), p.values().end()};
}

void require_positive(const std::vector<double>& v, std::size_t size, const char* what) {
  if (v.size() != size) throw Error(ErrorCode::SizeMismatch, std::string(what) + " has wrong size");
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::PositivityViolated, std::string(what) + " must be positive");
    }
  }
}

void require_grid(const SphereGrid& grid, const StarBody& k) {
  if (!grid.same_nodes(k.grid())) {
    throw Error(ErrorCode::GridMismatch, "body and problem live on different grids");
  }
}

StarBody grid_body(const GridPtr& grid, std::vector<double> values, std::string label) {
  return StarBody(RadialProfile(grid, std::move(values)), std::move(label));
}

}  // namespace

// ---------------------------------------------------------------------------

HellingerProblem::HellingerProblem(GridPtr grid, std::vector<double> a, std::vector<double> b)
    : grid_(std::move(grid)), a_(std::move(a)), b_(std::move(b)) {
  require_positive(a_, grid_->size(), "clean profile");
  require_positive(b_, grid_->size(), "noisy profile");
}

HellingerProblem::HellingerProblem(const DensityPtr& d_r, const DensityPtr& d_n, GridPtr grid)
    : HellingerProblem(grid, profile_values(d_r, 1.0, grid), profile_values(d_n, -1.0, grid)) {}

HellingerProblem HellingerProblem::from_values(GridPtr grid, std::vector<double> a,
                                               std::vector<double> b) {
  return HellingerProblem(std::move(grid), std::move(a), std::move(b));
}

StarBody HellingerProblem::body_r() const { return grid_body(grid_, a_, "L_r"); }
StarBody HellingerProblem::body_n_tilde() const { return grid_body(grid_, b_, "L~_n"); }

std::pair<double, double> hellinger_loss_terms(const HellingerProblem& h, const StarBody& k) {
  require_grid(h.grid(), k);
  const int d = h.dim();
  double first = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < h.grid().size(); ++i) {
    const double w = h.grid().weight(i);
    const double rk = k.profile()[i];
    first += w * std::pow(h.a()[i], d + 1) / rk;
    second += w * std::pow(h.b()[i], d - 1) * rk;
  }
  return {first, second};
}

double hellinger_loss(const HellingerProblem& h, const StarBody& k) {
  const auto [x, y] = hellinger_loss_terms(h, k);
  return x + y;
}

StarBody build_Krn(const HellingerProblem& h, const StarBody& k) {
  require_grid(h.grid(), k);
  const int d = h.dim();
  std::vector<double> v(h.grid().size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double rk = k.profile()[i];
    v[i] = 1.0 / (1.0 / rk + rk * std::pow(h.b()[i], d - 1) / std::pow(h.a()[i], d + 1));
  }
  return grid_body(h.grid_ptr(), std::move(v), "K_rn");
}

double lambda_star(const HellingerProblem& h) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < h.grid().size(); ++i) {
    best = std::min(best, std::sqrt(0.25 * std::pow(h.a()[i] / h.b()[i], h.dim() - 1)));
  }
  return best;
}

DilatePair hellinger_dilate_solutions(const HellingerProblem& h, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidLambda, "lambda must be positive and finite");
  }
  const int d = h.dim();
  const std::size_t n = h.grid().size();
  std::vector<double> plus(n), minus(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = h.a()[i];
    const double b = h.b()[i];
    const double disc = 1.0 - 4.0 * lambda * lambda * std::pow(b / a, d - 1);
    if (disc < -kDoubleRootTol) {
      throw Error(ErrorCode::LambdaAboveCritical, "lambda exceeds the critical value");
    }
    // |disc| within the tolerance band is a double root.
    const double root = disc > kDoubleRootTol ? std::sqrt(disc) : 0.0;
    const double scale = std::pow(a, d) / (2.0 * lambda * std::pow(b, d - 1));
    plus[i] = scale * (1.0 + root);
    // Smaller root from the product of the roots, a^{d+1} / b^{d-1}.
    minus[i] = 2.0 * lambda * a / (1.0 + root);
  }
  return {grid_body(h.grid_ptr(), std::move(plus), "K+"),
          grid_body(h.grid_ptr(), std::move(minus), "K-")};
}

std::vector<double> quadratic_positive_roots(double qa, double qb, double qc) {
  std::vector<double> out;
  if (qa == 0.0) {
    if (qb != 0.0 && -qc / qb > 0.0) out.push_back(-qc / qb);
    return out;
  }
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return out;
  const double s = std::sqrt(disc);
  const double q = -0.5 * (qb + std::copysign(s, qb));
  double x1 = q / qa;
  double x2 = q != 0.0 ? qc / q : x1;
  if (x1 > x2) std::swap(x1, x2);
  if (x1 > 0.0) out.push_back(x1);
  if (x2 > 0.0 && (disc > 0.0 || out.empty())) out.push_back(x2);
  return out;
}

// ---------------------------------------------------------------------------

AlphaProblem::AlphaProblem(GridPtr grid, double alpha, std::vector<double> r,
                           std::vector<double> n)
    : grid_(std::move(grid)), alpha_(alpha), r_(std::move(r)), n_(std::move(n)) {
  if (alpha_ == 0.0 || !(alpha_ < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (-inf, 0) or (0, 1)");
  }
  const int d = grid_->dim();
  if (!(d + alpha_ - 1.0 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "profiles need d + alpha - 1 > 0");
  }
  require_positive(r_, grid_->size(), "clean profile");
  require_positive(n_, grid_->size(), "noisy profile");
}

AlphaProblem::AlphaProblem(const DensityPtr& d_r, const DensityPtr& d_n, GridPtr grid,
                           double alpha)
    : AlphaProblem(grid, alpha, profile_values(d_r, alpha, grid),
                   profile_values(d_n, alpha - 1.0, grid)) {}

AlphaProblem AlphaProblem::from_values(GridPtr grid, double alpha, std::vector<double> r,
                                       std::vector<double> n) {
  return AlphaProblem(std::move(grid), alpha, std::move(r), std::move(n));
}

double AlphaProblem::coefficient(std::size_t i) const {
  const int d = dim();
  return std::pow(n_[i], d + alpha_ - 1.0) / std::pow(r_[i], d + alpha_);
}

StarBody AlphaProblem::body_r() const { return grid_body(grid_, r_, "L_r^alpha"); }

std::pair<double, double> alpha_loss_terms(const AlphaProblem& a, const StarBody& k) {
  require_grid(a.grid(), k);
  const int d = a.dim();
  const double al = a.alpha();
  double first = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < a.grid().size(); ++i) {
    const double w = a.grid().weight(i);
    const double rk = k.profile()[i];
    first += w * std::pow(a.r()[i], d + al) * std::pow(rk, -al);
    second += w * std::pow(a.n()[i], d + al - 1.0) * std::pow(rk, 1.0 - al);
  }
  return {first / al, second / (1.0 - al)};
}

double alpha_loss(const AlphaProblem& a, const StarBody& k) {
  const auto [x, y] = alpha_loss_terms(a, k);
  return x + y;
}

std::pair<StarBody, StarBody> alpha_tilde_bodies(const AlphaProblem& a, const StarBody& k) {
  require_grid(a.grid(), k);
  const int d = a.dim();
  const double al = a.alpha();
  const std::size_t n = a.grid().size();
  std::vector<double> lr(n), ln(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rk = k.profile()[i];
    lr[i] = std::pow(std::pow(a.r()[i], d + al) * std::pow(rk, 1.0 - al), 1.0 / (d + 1));
    ln[i] = std::pow(std::pow(a.n()[i], d + al - 1.0) * std::pow(rk, 2.0 - al), 1.0 / (d + 1));
  }
  return {grid_body(a.grid_ptr(), std::move(lr), "L~_r^alpha"),
          grid_body(a.grid_ptr(), std::move(ln), "L~_n^alpha")};
}

StarBody build_Kalpha(const AlphaProblem& a, const StarBody& k) {
  require_grid(a.grid(), k);
  const double al = a.alpha();
  if (!(al > 0.0)) throw Error(ErrorCode::InvalidArgument, "K^alpha needs alpha in (0, 1)");
  std::vector<double> v(a.grid().size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double rk = k.profile()[i];
    const double s = std::pow(rk, -al) / al + a.coefficient(i) * std::pow(rk, 1.0 - al) / (1.0 - al);
    v[i] = std::pow(s, -1.0 / al);
  }
  return grid_body(a.grid_ptr(), std::move(v), "K^alpha");
}

double alpha_g(double alpha, double c, double x) {
  return std::pow(x, -alpha) / alpha + c * std::pow(x, 1.0 - alpha) / (1.0 - alpha);
}

namespace {

// g - rhs changes sign on [lo, hi].
double bisect(double alpha, double c, double rhs, double lo, double hi) {
  const bool lo_above = alpha_g(alpha, c, lo) > rhs;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi) break;
    if ((alpha_g(alpha, c, mid) > rhs) == lo_above) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::optional<std::pair<double, double>> fixed_point_roots(double alpha, double c, double rhs) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(c > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fixed point needs alpha in (0, 1) and c > 0");
  }
  const double x_min = 1.0 / c;
  const double g_min = alpha_g(alpha, c, x_min);
  // rhs within the relative tolerance band of the minimum is a double root.
  if (std::abs(rhs - g_min) <= kDoubleRootTol * g_min) return std::make_pair(x_min, x_min);
  if (rhs < g_min) return std::nullopt;
  double lo = x_min;
  double hi = x_min;
  for (int k = 0; k <= 60 && alpha_g(alpha, c, lo) <= rhs; ++k) lo *= 0.5;
  for (int k = 0; k <= 60 && alpha_g(alpha, c, hi) <= rhs; ++k) hi *= 2.0;
  if (alpha_g(alpha, c, lo) <= rhs || alpha_g(alpha, c, hi) <= rhs) {
    throw Error(ErrorCode::InvalidArgument, "root bracket expansion exhausted");
  }
  return std::make_pair(bisect(alpha, c, rhs, lo, x_min), bisect(alpha, c, rhs, x_min, hi));
}

double alpha_lambda_star(const AlphaProblem& a) {
  const double al = a.alpha();
  if (!(al > 0.0)) throw Error(ErrorCode::InvalidArgument, "fixed points need alpha in (0, 1)");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.grid().size(); ++i) {
    const double c = a.coefficient(i);
    const double g_min = std::pow(c, al) / (al * (1.0 - al));
    best = std::min(best, std::pow(g_min, -1.0 / al) / a.r()[i]);
  }
  return best;
}

std::vector<StarBody> alpha_fixed_point_solve(const AlphaProblem& a, double lambda) {
  const double al = a.alpha();
  if (!(al > 0.0)) throw Error(ErrorCode::InvalidArgument, "fixed points need alpha in (0, 1)");
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidLambda, "lambda must be positive");
  const std::size_t n = a.grid().size();
  std::vector<double> plus(n), minus(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rhs = std::pow(lambda * a.r()[i], -al);
    const auto roots = fixed_point_roots(al, a.coefficient(i), rhs);
    if (!roots) return {};
    minus[i] = roots->first;
    plus[i] = roots->second;
  }
  std::vector<StarBody> out;
  out.push_back(grid_body(a.grid_ptr(), std::move(plus), "K+^alpha"));
  out.push_back(grid_body(a.grid_ptr(), std::move(minus), "K-^alpha"));
  return out;
}

}  // namespace stargeo
