#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stargeo/starbody.hpp"

namespace stargeo {

using Rng = std::mt19937_64;

/// A probability density on R^d that can be evaluated and sampled.
///
/// Kinds with an analytic radial structure also report the directional
/// moment  int_0^inf t^{d+beta-1} p(t u) dt  in closed form.
class Density {
 public:
  virtual ~Density() = default;

  virtual int dim() const = 0;
  virtual std::string kind() const = 0;
  /// Throws UnsupportedDensity for kinds without a Lebesgue density.
  virtual double eval(const Vec& x) const = 0;
  virtual Vec sample(Rng& rng) const = 0;
  virtual bool has_density() const { return true; }
  /// Closed-form directional moment at unit direction u, if known.
  virtual std::optional<double> radial_moment(double beta, const Vec& u) const;
};

using DensityPtr = std::shared_ptr<const Density>;

/// p(x) = C * exp(-rate * |x|_L^q), normalized over R^d.
class GaugeGibbsDensity final : public Density {
 public:
  GaugeGibbsDensity(StarBody body, double exponent, double rate);

  int dim() const override { return body_.dim(); }
  std::string kind() const override { return "gauge_gibbs"; }
  double eval(const Vec& x) const override;
  Vec sample(Rng& rng) const override;
  std::optional<double> radial_moment(double beta, const Vec& u) const override;

  const StarBody& body() const noexcept { return body_; }
  double exponent() const noexcept { return exponent_; }
  double rate() const noexcept { return rate_; }
  double normalizer() const noexcept { return normalizer_; }
  /// c_beta = int_0^inf t^{d+beta-1} psi(t^q) dt, so that the moment equals
  /// c_beta * rho_L(u)^{d+beta}. beta = 1 gives the constant c(psi).
  double moment_constant(double beta) const;

 private:
  StarBody body_;
  double exponent_;
  double rate_;
  double normalizer_;
  double box_;  // half-width of a box containing L, for rejection sampling
};

class GaussianDensity final : public Density {
 public:
  GaussianDensity(Vec mean, Eigen::MatrixXd covariance);

  int dim() const override { return static_cast<int>(mean_.size()); }
  std::string kind() const override { return "gaussian"; }
  double eval(const Vec& x) const override;
  Vec sample(Rng& rng) const override;
  /// Closed form for zero mean only.
  std::optional<double> radial_moment(double beta, const Vec& u) const override;

  const Vec& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& covariance() const noexcept { return cov_; }

 private:
  Vec mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd precision_;
  Eigen::MatrixXd factor_;  // lower Cholesky factor
  double log_normalizer_;
  bool centered_;
};

class MixtureDensity final : public Density {
 public:
  MixtureDensity(std::vector<double> weights, std::vector<DensityPtr> components);

  int dim() const override { return components_.front()->dim(); }
  std::string kind() const override { return "mixture"; }
  double eval(const Vec& x) const override;
  Vec sample(Rng& rng) const override;
  std::optional<double> radial_moment(double beta, const Vec& u) const override;

 private:
  std::vector<double> weights_;
  std::vector<DensityPtr> components_;
};

/// Law of sqrt(scale) * (P y + sigma z) with y ~ base, z ~ N(0, I_d) and P a
/// d x m pseudo-inverse. A Gaussian base reduces to a Gaussian in closed form.
class PushforwardDensity final : public Density {
 public:
  PushforwardDensity(Eigen::MatrixXd pinv, DensityPtr base, double noise_variance,
                     double scale = 1.0);

  int dim() const override { return static_cast<int>(pinv_.rows()); }
  std::string kind() const override { return "pushforward"; }
  double eval(const Vec& x) const override;
  Vec sample(Rng& rng) const override;
  std::optional<double> radial_moment(double beta, const Vec& u) const override;

  /// Equivalent Gaussian when the base is Gaussian.
  const std::shared_ptr<const GaussianDensity>& reduced() const noexcept { return reduced_; }

 private:
  Eigen::MatrixXd pinv_;
  DensityPtr base_;
  double noise_variance_;
  double scale_;
  std::shared_ptr<const GaussianDensity> reduced_;
};

class UniformBodyDensity final : public Density {
 public:
  explicit UniformBodyDensity(StarBody body);

  int dim() const override { return body_.dim(); }
  std::string kind() const override { return "uniform"; }
  double eval(const Vec& x) const override;
  Vec sample(Rng& rng) const override;
  std::optional<double> radial_moment(double beta, const Vec& u) const override;

 private:
  StarBody body_;
  double volume_;
  double box_;
};

class EmpiricalDensity final : public Density {
 public:
  explicit EmpiricalDensity(std::vector<Vec> points);

  int dim() const override { return static_cast<int>(points_.front().size()); }
  std::string kind() const override { return "empirical"; }
  double eval(const Vec& x) const override;
  Vec sample(Rng& rng) const override;
  bool has_density() const override { return false; }

  const std::vector<Vec>& points() const noexcept { return points_; }

 private:
  std::vector<Vec> points_;
};

std::vector<Vec> draw_samples(const Density& d, std::size_t n, Rng& rng);

enum class MomentMethod { Auto, Quadrature };

/// rho_{beta,D}(u) = (int_0^inf t^{d+beta-1} p(t u) dt)^{1/(d+beta)} on a grid.
class MomentProfile {
 public:
  MomentProfile(double beta, GridPtr grid, std::vector<double> values, DensityPtr source,
                bool closed_form);

  double beta() const noexcept { return beta_; }
  const SphereGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  /// values^{d+beta}, i.e. the raw directional moments.
  std::vector<double> moments() const;
  bool strictly_positive() const;
  bool closed_form() const noexcept { return closed_form_; }
  const DensityPtr& source() const noexcept { return source_; }
  /// Value at an arbitrary unit direction: exact when a closed form exists,
  /// otherwise interpolated like a radial profile.
  double at_direction(const Vec& u) const;

  /// Star body with this radial function; throws PositivityViolated on a zero.
  StarBody to_body(std::string label = {}) const;

 private:
  double beta_;
  GridPtr grid_;
  std::vector<double> values_;
  DensityPtr source_;
  bool closed_form_;
};

MomentProfile moment_profile(const DensityPtr& density, double beta, const GridPtr& grid,
                             MomentMethod method = MomentMethod::Auto);

struct McEstimate {
  double mean = 0.0;
  double std_err = 0.0;
};

/// Sample mean and standard error of f(X_i) over n draws.
McEstimate mc_expectation(const Density& d, const std::function<double(const Vec&)>& f,
                          std::size_t n, std::uint64_t seed);

McEstimate expected_gauge_mc(const Density& d, const StarBody& k, std::size_t n,
                             std::uint64_t seed);

/// E_D[|x|_K^s] = int rho_{s,D}^{d+s} rho_K^{-s} du from a precomputed profile (s = beta).
double expected_gauge_power(const MomentProfile& profile, const StarBody& k);
double expected_gauge_power(const DensityPtr& d, const StarBody& k, double s);

/// E_D[|x|_K] by spherical-coordinates quadrature.
double expected_gauge_quadrature(const DensityPtr& d, const StarBody& k);

}  // namespace stargeo
