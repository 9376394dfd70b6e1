#include "stargeo/density.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "stargeo/error.hpp"
#include "stargeo/radial_quadrature.hpp"

namespace stargeo {

namespace {

Vec standard_normal(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec z(dim);
  for (int i = 0; i < dim; ++i) z[i] = normal(rng);
  return z;
}

// Uniform point of a star body by rejection from its bounding box.
Vec uniform_in_body(const StarBody& body, double box, Rng& rng) {
  std::uniform_real_distribution<double> coord(-box, box);
  Vec y(body.dim());
  for (;;) {
    for (int i = 0; i < body.dim(); ++i) y[i] = coord(rng);
    if (body.gauge(y) <= 1.0) return y;
  }
}

double bounding_box(const StarBody& body) {
  // Closed-form profiles may peak slightly between nodes.
  return 1.05 * body.profile().max();
}

}  // namespace

std::optional<double> Density::radial_moment(double, const Vec&) const { return std::nullopt; }

// ---------------------------------------------------------------------------

GaugeGibbsDensity::GaugeGibbsDensity(StarBody body, double exponent, double rate)
    : body_(std::move(body)), exponent_(exponent), rate_(rate) {
  if (!(exponent_ > 0.0) || !(rate_ > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "Gibbs density needs exponent > 0 and rate > 0");
  }
  const double d = body_.dim();
  const double mass =
      d * volume(body_) * std::tgamma(d / exponent_) / (exponent_ * std::pow(rate_, d / exponent_));
  normalizer_ = 1.0 / mass;
  box_ = bounding_box(body_);
}

double GaugeGibbsDensity::eval(const Vec& x) const {
  return normalizer_ * std::exp(-rate_ * std::pow(body_.gauge(x), exponent_));
}

Vec GaugeGibbsDensity::sample(Rng& rng) const {
  // |X|_L has density proportional to s^{d-1} exp(-rate s^q), and X / |X|_L
  // follows the cone measure of L, which is the law of Y / |Y|_L for Y
  // uniform in L.
  std::gamma_distribution<double> gamma(body_.dim() / exponent_, 1.0);
  const double s = std::pow(gamma(rng) / rate_, 1.0 / exponent_);
  const Vec y = uniform_in_body(body_, box_, rng);
  return s * y / body_.gauge(y);
}

double GaugeGibbsDensity::moment_constant(double beta) const {
  const double a = body_.dim() + beta;
  return normalizer_ * std::tgamma(a / exponent_) / (exponent_ * std::pow(rate_, a / exponent_));
}

std::optional<double> GaugeGibbsDensity::radial_moment(double beta, const Vec& u) const {
  return moment_constant(beta) * std::pow(body_.radius(u), body_.dim() + beta);
}

// ---------------------------------------------------------------------------

GaussianDensity::GaussianDensity(Vec mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), cov_(std::move(covariance)) {
  const auto d = mean_.size();
  if (cov_.rows() != d || cov_.cols() != d) {
    throw Error(ErrorCode::DimensionMismatch, "covariance must be d x d");
  }
  if (!cov_.isApprox(cov_.transpose(), 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "covariance must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov_);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidArgument, "covariance must be positive definite");
  }
  factor_ = llt.matrixL();
  precision_ = llt.solve(Eigen::MatrixXd::Identity(d, d));
  const double log_det = 2.0 * factor_.diagonal().array().log().sum();
  log_normalizer_ = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det);
  centered_ = mean_.isZero(0.0);
}

double GaussianDensity::eval(const Vec& x) const {
  const Vec r = x - mean_;
  return std::exp(log_normalizer_ - 0.5 * r.dot(precision_ * r));
}

Vec GaussianDensity::sample(Rng& rng) const {
  return mean_ + factor_ * standard_normal(dim(), rng);
}

std::optional<double> GaussianDensity::radial_moment(double beta, const Vec& u) const {
  if (!centered_) return std::nullopt;
  // int_0^inf t^{a-1} exp(-t^2 q / 2) dt = Gamma(a/2) (2/q)^{a/2} / 2
  const double a = dim() + beta;
  const double q = u.dot(precision_ * u);
  return std::exp(log_normalizer_) * 0.5 * std::tgamma(a / 2.0) * std::pow(2.0 / q, a / 2.0);
}

// ---------------------------------------------------------------------------

MixtureDensity::MixtureDensity(std::vector<double> weights, std::vector<DensityPtr> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (components_.empty() || weights_.size() != components_.size()) {
    throw Error(ErrorCode::InvalidArgument, "mixture needs one weight per component");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative mixture weight");
    if (components_[i]->dim() != components_.front()->dim()) {
      throw Error(ErrorCode::DimensionMismatch, "mixture components differ in dimension");
    }
    total += weights_[i];
  }
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "mixture weights sum to zero");
  for (double& w : weights_) w /= total;
}

double MixtureDensity::eval(const Vec& x) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) sum += weights_[i] * components_[i]->eval(x);
  return sum;
}

Vec MixtureDensity::sample(Rng& rng) const {
  std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
  return components_[pick(rng)]->sample(rng);
}

std::optional<double> MixtureDensity::radial_moment(double beta, const Vec& u) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const auto m = components_[i]->radial_moment(beta, u);
    if (!m) return std::nullopt;
    sum += weights_[i] * *m;
  }
  return sum;
}

// ---------------------------------------------------------------------------

PushforwardDensity::PushforwardDensity(Eigen::MatrixXd pinv, DensityPtr base,
                                       double noise_variance, double scale)
    : pinv_(std::move(pinv)), base_(std::move(base)), noise_variance_(noise_variance),
      scale_(scale) {
  if (!base_ || pinv_.cols() != base_->dim()) {
    throw Error(ErrorCode::DimensionMismatch, "pseudo-inverse columns must match base dimension");
  }
  if (!(noise_variance_ >= 0.0) || !(scale_ > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise variance must be >= 0 and scale > 0");
  }
  const GaussianDensity* g = dynamic_cast<const GaussianDensity*>(base_.get());
  if (const auto* p = dynamic_cast<const PushforwardDensity*>(base_.get()); p && p->reduced()) {
    g = p->reduced().get();
  }
  if (g) {
    const auto d = pinv_.rows();
    Eigen::MatrixXd cov = pinv_ * g->covariance() * pinv_.transpose() +
                          noise_variance_ * Eigen::MatrixXd::Identity(d, d);
    cov = 0.5 * (cov + cov.transpose()).eval();
    reduced_ = std::make_shared<GaussianDensity>(std::sqrt(scale_) * pinv_ * g->mean(),
                                                 scale_ * cov);
  }
}

double PushforwardDensity::eval(const Vec& x) const {
  if (!reduced_) {
    throw Error(ErrorCode::UnsupportedDensity,
                "pushforward density is only evaluable for a Gaussian base");
  }
  return reduced_->eval(x);
}

Vec PushforwardDensity::sample(Rng& rng) const {
  const Vec y = base_->sample(rng);
  const Vec z = standard_normal(dim(), rng);
  return std::sqrt(scale_) * (pinv_ * y + std::sqrt(noise_variance_) * z);
}

std::optional<double> PushforwardDensity::radial_moment(double beta, const Vec& u) const {
  if (!reduced_) return std::nullopt;
  return reduced_->radial_moment(beta, u);
}

// ---------------------------------------------------------------------------

UniformBodyDensity::UniformBodyDensity(StarBody body)
    : body_(std::move(body)), volume_(volume(body_)), box_(bounding_box(body_)) {}

double UniformBodyDensity::eval(const Vec& x) const {
  return body_.gauge(x) <= 1.0 ? 1.0 / volume_ : 0.0;
}

Vec UniformBodyDensity::sample(Rng& rng) const { return uniform_in_body(body_, box_, rng); }

std::optional<double> UniformBodyDensity::radial_moment(double beta, const Vec& u) const {
  const double a = body_.dim() + beta;
  return std::pow(body_.radius(u), a) / (a * volume_);
}

// ---------------------------------------------------------------------------

EmpiricalDensity::EmpiricalDensity(std::vector<Vec> points) : points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorCode::InvalidArgument, "empirical measure needs a point");
}

double EmpiricalDensity::eval(const Vec&) const {
  throw Error(ErrorCode::UnsupportedDensity, "empirical measures have no density");
}

Vec EmpiricalDensity::sample(Rng& rng) const {
  std::uniform_int_distribution<std::size_t> pick(0, points_.size() - 1);
  return points_[pick(rng)];
}

std::vector<Vec> draw_samples(const Density& d, std::size_t n, Rng& rng) {
  std::vector<Vec> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(d.sample(rng));
  return out;
}

// ---------------------------------------------------------------------------

MomentProfile::MomentProfile(double beta, GridPtr grid, std::vector<double> values,
                             DensityPtr source, bool closed_form)
    : beta_(beta), grid_(std::move(grid)), values_(std::move(values)), source_(std::move(source)),
      closed_form_(closed_form) {}

std::vector<double> MomentProfile::moments() const {
  const double a = grid_->dim() + beta_;
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::pow(values_[i], a);
  return out;
}

bool MomentProfile::strictly_positive() const {
  for (double v : values_) {
    if (!(v > 0.0)) return false;
  }
  return true;
}

double MomentProfile::at_direction(const Vec& u) const {
  if (closed_form_) {
    return std::pow(std::max(0.0, *source_->radial_moment(beta_, u)), 1.0 / (grid_->dim() + beta_));
  }
  if (grid_->dim() == 2) {
    const auto [i, t] = grid_->bracket(u);
    return (1.0 - t) * values_[i] + t * values_[(i + 1) % values_.size()];
  }
  return values_[grid_->nearest(u)];
}

StarBody MomentProfile::to_body(std::string label) const {
  if (closed_form_) {
    auto src = source_;
    const double beta = beta_;
    const double root = 1.0 / (grid_->dim() + beta);
    return body_from_function(
        grid_, [src, beta, root](const Vec& u) { return std::pow(*src->radial_moment(beta, u), root); },
        std::move(label));
  }
  return StarBody(RadialProfile(grid_, values_), std::move(label));
}

MomentProfile moment_profile(const DensityPtr& density, double beta, const GridPtr& grid,
                             MomentMethod method) {
  const int d = grid->dim();
  if (density->dim() != d) {
    throw Error(ErrorCode::DimensionMismatch, "density and grid dimensions differ");
  }
  if (!(d + beta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "moment profile needs d + beta > 0");
  }
  if (!density->has_density()) {
    throw Error(ErrorCode::UnsupportedDensity,
                density->kind() + " measures have no directional moment profile");
  }
  const double root = 1.0 / (d + beta);
  std::vector<double> values(grid->size());

  bool closed = method == MomentMethod::Auto &&
                density->radial_moment(beta, grid->direction(0)).has_value();
  if (closed) {
    for (std::size_t i = 0; i < grid->size(); ++i) {
      values[i] = std::pow(std::max(0.0, *density->radial_moment(beta, grid->direction(i))), root);
    }
  } else {
    const double power = d + beta - 1.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const Vec& u = grid->direction(i);
      const double m = radial_integral([&](double t) { return density->eval(t * u); }, power);
      values[i] = std::pow(std::max(0.0, m), root);
    }
  }
  return MomentProfile(beta, grid, std::move(values), density, closed);
}

McEstimate mc_expectation(const Density& d, const std::function<double(const Vec&)>& f,
                          std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  Rng rng(seed);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = f(d.sample(rng));
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  McEstimate est;
  est.mean = mean;
  est.std_err = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return est;
}

McEstimate expected_gauge_mc(const Density& d, const StarBody& k, std::size_t n,
                             std::uint64_t seed) {
  return mc_expectation(d, [&k](const Vec& x) { return k.gauge(x); }, n, seed);
}

double expected_gauge_power(const MomentProfile& profile, const StarBody& k) {
  if (!profile.grid().same_nodes(k.grid())) {
    throw Error(ErrorCode::GridMismatch, "moment profile and body live on different grids");
  }
  const double s = profile.beta();
  const double a = k.dim() + s;
  const auto& grid = k.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sum += grid.weight(i) * std::pow(profile[i], a) * std::pow(k.profile()[i], -s);
  }
  return sum;
}

double expected_gauge_power(const DensityPtr& d, const StarBody& k, double s) {
  return expected_gauge_power(moment_profile(d, s, k.grid_ptr()), k);
}

double expected_gauge_quadrature(const DensityPtr& d, const StarBody& k) {
  return expected_gauge_power(d, k, 1.0);
}

}  // namespace stargeo
