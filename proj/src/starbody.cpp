#include "stargeo/starbody.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stargeo/error.hpp"

namespace stargeo {

namespace {

void require_same_grid(const StarBody& a, const StarBody& b) {
  if (!a.grid().same_nodes(b.grid())) {
    throw Error(ErrorCode::GridMismatch, "bodies '" + a.label() + "' and '" + b.label() +
                                             "' live on different grids");
  }
}

void require_valid(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] <= 0.0) {
      throw Error(ErrorCode::PositivityViolated,
                  "radial value at node " + std::to_string(i) + " is " + std::to_string(values[i]));
    }
  }
}

}  // namespace

RadialProfile::RadialProfile(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw Error(ErrorCode::InvalidArgument, "profile needs a grid");
  if (values_.size() != grid_->size()) {
    throw Error(ErrorCode::SizeMismatch, "profile has " + std::to_string(values_.size()) +
                                             " values for a grid of " +
                                             std::to_string(grid_->size()));
  }
  require_valid(values_);
}

RadialProfile RadialProfile::from_function(GridPtr grid, Function f, bool keep_closed_form) {
  std::vector<double> values;
  values.reserve(grid->size());
  for (const auto& u : grid->directions()) values.push_back(f(u));
  RadialProfile profile(std::move(grid), std::move(values));
  if (keep_closed_form) profile.exact_ = std::move(f);
  return profile;
}

Interpolation RadialProfile::interpolation() const noexcept {
  if (exact_) return Interpolation::ClosedForm;
  return dim() == 2 ? Interpolation::PeriodicLinear : Interpolation::NearestNeighbor;
}

double RadialProfile::on_sphere(const Vec& u) const {
  if (exact_) return exact_(u);
  if (dim() == 2) {
    const auto [i, t] = grid_->bracket(u);
    const std::size_t j = (i + 1) % values_.size();
    return (1.0 - t) * values_[i] + t * values_[j];
  }
  return values_[grid_->nearest(u)];
}

double RadialProfile::at(const Vec& x) const {
  const double r = x.norm();
  return on_sphere(x / r) / r;
}

double RadialProfile::min() const { return *std::min_element(values_.begin(), values_.end()); }
double RadialProfile::max() const { return *std::max_element(values_.begin(), values_.end()); }

StarBody::StarBody(RadialProfile profile, std::string label)
    : profile_(std::move(profile)), label_(std::move(label)) {}

StarBody StarBody::with_label(std::string label) const {
  StarBody copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

double StarBody::gauge(const Vec& x) const {
  const double r = x.norm();
  if (r == 0.0) return 0.0;
  return r / profile_.on_sphere(x / r);
}

StarBody unit_ball(GridPtr grid, double radius) {
  return body_from_function(std::move(grid), [radius](const Vec&) { return radius; },
                            radius == 1.0 ? "B" : "ball");
}

StarBody lp_ball(GridPtr grid, double p, double radius) {
  if (!(p > 0.0)) throw Error(ErrorCode::InvalidArgument, "l_p ball needs p > 0");
  auto rho = [p, radius](const Vec& u) {
    if (std::isinf(p)) return radius / u.cwiseAbs().maxCoeff();
    double s = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) s += std::pow(std::abs(u[i]), p);
    return radius / std::pow(s, 1.0 / p);
  };
  return body_from_function(std::move(grid), rho, "l_p ball");
}

StarBody ellipsoid(GridPtr grid, const Eigen::MatrixXd& m) {
  if (m.rows() != grid->dim() || m.cols() != grid->dim()) {
    throw Error(ErrorCode::DimensionMismatch, "ellipsoid matrix must be d x d");
  }
  return body_from_function(std::move(grid), [m](const Vec& u) { return 1.0 / (m * u).norm(); },
                            "ellipsoid");
}

StarBody body_from_function(GridPtr grid, RadialProfile::Function rho, std::string label,
                            bool keep_closed_form) {
  return StarBody(RadialProfile::from_function(std::move(grid), std::move(rho), keep_closed_form),
                  std::move(label));
}

double gauge(const StarBody& k, const Vec& x) { return k.gauge(x); }

Vec gauge_gradient(const StarBody& k, const Vec& x) {
  const double h = 1e-6 * std::max(x.norm(), 1e-12);
  Vec g(x.size());
  Vec xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    const double fp = k.gauge(xp);
    xp[i] = x[i] - h;
    const double fm = k.gauge(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double volume(const StarBody& k) {
  const auto& grid = k.grid();
  const int d = grid.dim();
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) sum += grid.weight(i) * std::pow(k.profile()[i], d);
  return sum / d;
}

double dual_mixed_volume(const StarBody& l, const StarBody& k, double i) {
  require_same_grid(l, k);
  const auto& grid = k.grid();
  const int d = grid.dim();
  double sum = 0.0;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    sum += grid.weight(n) * std::pow(l.profile()[n], d - i) * std::pow(k.profile()[n], i);
  }
  return sum / d;
}

double radial_metric(const StarBody& k, const StarBody& l) {
  require_same_grid(k, l);
  double worst = 0.0;
  for (std::size_t n = 0; n < k.profile().size(); ++n) {
    worst = std::max(worst, std::abs(k.profile()[n] - l.profile()[n]));
  }
  return worst;
}

StarBody harmonic_combination(const StarBody& k, const StarBody& l, double a, double b, double q) {
  if (a < 0.0 || b < 0.0) throw Error(ErrorCode::InvalidArgument, "coefficients must be >= 0");
  if (a + b <= 0.0) throw Error(ErrorCode::DegenerateCombination, "a = b = 0");
  if (q < 1.0) throw Error(ErrorCode::InvalidArgument, "harmonic combination needs q >= 1");
  require_same_grid(k, l);
  auto combine = [a, b, q](double rk, double rl) {
    return std::pow(a * std::pow(rk, -q) + b * std::pow(rl, -q), -1.0 / q);
  };
  const std::string label = "harmonic(" + k.label() + "," + l.label() + ")";
  if (k.profile().has_closed_form() && l.profile().has_closed_form()) {
    auto fk = k.profile().closed_form();
    auto fl = l.profile().closed_form();
    return body_from_function(k.grid_ptr(),
                              [=](const Vec& u) { return combine(fk(u), fl(u)); }, label);
  }
  std::vector<double> values(k.profile().size());
  for (std::size_t n = 0; n < values.size(); ++n) {
    values[n] = combine(k.profile()[n], l.profile()[n]);
  }
  return StarBody(RadialProfile(k.grid_ptr(), std::move(values)), label);
}

StarBody dilate(const StarBody& k, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "dilation factor must be > 0");
  if (k.profile().has_closed_form()) {
    auto f = k.profile().closed_form();
    return body_from_function(k.grid_ptr(), [f, lambda](const Vec& u) { return lambda * f(u); },
                              k.label());
  }
  std::vector<double> values(k.profile().values().begin(), k.profile().values().end());
  for (double& v : values) v *= lambda;
  return StarBody(RadialProfile(k.grid_ptr(), std::move(values)), k.label());
}

std::optional<double> is_dilate(const StarBody& k, const StarBody& l, double tol) {
  require_same_grid(k, l);
  const std::size_t n = k.profile().size();
  std::vector<double> ratio(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ratio[i] = k.profile()[i] / l.profile()[i];
    mean += ratio[i];
  }
  mean /= static_cast<double>(n);
  for (double r : ratio) {
    if (std::abs(r - mean) > tol * mean) return std::nullopt;
  }
  return mean;
}

bool kernel_contains_ball(const StarBody& k, double gamma, const KernelCheckOptions& opts) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel radius must be > 0");
  const auto& grid = k.grid();
  const int d = grid.dim();
  constexpr double kSlack = 1e-9;

  std::vector<Vec> ball;
  if (d == 2) {
    const std::size_t m = std::max<std::size_t>(opts.ball_samples, 1);
    for (std::size_t j = 0; j < m; ++j) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
      Vec z(2);
      z << gamma * std::cos(t), gamma * std::sin(t);
      ball.push_back(std::move(z));
    }
  } else {
    const auto sampler = SphereGrid::make(d, std::max<std::size_t>(opts.ball_samples, 4));
    for (const auto& v : sampler->directions()) ball.push_back(gamma * v);
  }

  std::size_t stride = 1;
  if (opts.boundary_samples > 0 && opts.boundary_samples < grid.size()) {
    stride = grid.size() / opts.boundary_samples;
  }
  const std::size_t steps = opts.segment_points + 1;
  for (std::size_t i = 0; i < grid.size(); i += stride) {
    const Vec x = k.profile()[i] * grid.direction(i);
    for (const auto& z : ball) {
      for (std::size_t s = 0; s <= steps; ++s) {
        const double t = static_cast<double>(s) / static_cast<double>(steps);
        const Vec p = z + t * (x - z);
        if (k.gauge(p) > 1.0 + kSlack) return false;
      }
    }
  }
  return true;
}

bool is_convex_2d(const StarBody& k, double tol) {
  const auto& grid = k.grid();
  if (grid.dim() != 2) throw Error(ErrorCode::UnsupportedDimension, "convexity test is 2-D only");
  const std::size_t n = grid.size();
  std::vector<Vec> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = k.profile()[i] * grid.direction(i);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec e1 = p[(i + 1) % n] - p[i];
    const Vec e2 = p[(i + 2) % n] - p[(i + 1) % n];
    const double cross = e1[0] * e2[1] - e1[1] * e2[0];
    // Sine of the turning angle.
    if (cross < -tol * e1.norm() * e2.norm()) return false;
  }
  return true;
}

double max_radius_bound(int dim, double gamma) {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::UnsupportedDimension, "d must be 2 or 3");
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be > 0");
  return (dim + 1.0) / (std::pow(gamma, dim - 1) * unit_ball_volume(dim - 1));
}

}  // namespace stargeo
