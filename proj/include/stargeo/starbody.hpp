#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stargeo/spherequad.hpp"

namespace stargeo {

enum class Interpolation { PeriodicLinear, NearestNeighbor, ClosedForm };

/// Positive radial function sampled on a sphere grid.
///
/// Off-grid directions are evaluated by periodic linear interpolation in
/// angle (d = 2), nearest node (d = 3), or by an exact callable when the
/// profile was built from one. The homogeneous extension
/// rho(x) = rho(x / |x|) / |x| is available through at().
class RadialProfile {
 public:
  /// Callable evaluated on unit vectors.
  using Function = std::function<double(const Vec&)>;

  RadialProfile(GridPtr grid, std::vector<double> values);

  /// Samples f on the grid; keeps f for off-grid evaluation when requested.
  static RadialProfile from_function(GridPtr grid, Function f, bool keep_closed_form = true);

  const SphereGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  int dim() const noexcept { return grid_->dim(); }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  Interpolation interpolation() const noexcept;
  bool has_closed_form() const noexcept { return static_cast<bool>(exact_); }
  const Function& closed_form() const noexcept { return exact_; }

  /// rho at a unit direction.
  double on_sphere(const Vec& u) const;
  /// Homogeneous extension of degree -1; x must be nonzero.
  double at(const Vec& x) const;

  double min() const;
  double max() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
  Function exact_;
};

class StarBody {
 public:
  explicit StarBody(RadialProfile profile, std::string label = {});

  const RadialProfile& profile() const noexcept { return profile_; }
  const SphereGrid& grid() const noexcept { return profile_.grid(); }
  const GridPtr& grid_ptr() const noexcept { return profile_.grid_ptr(); }
  int dim() const noexcept { return profile_.dim(); }
  const std::string& label() const noexcept { return label_; }
  StarBody with_label(std::string label) const;

  /// Radial function at a unit direction.
  double radius(const Vec& u) const { return profile_.on_sphere(u); }
  /// Minkowski functional |x| / rho(x / |x|); zero at the origin.
  double gauge(const Vec& x) const;

 private:
  RadialProfile profile_;
  std::string label_;
};

// Constructors for reference bodies.
StarBody unit_ball(GridPtr grid, double radius = 1.0);
/// l_p ball {|x|_p <= radius}; p = infinity is allowed.
StarBody lp_ball(GridPtr grid, double p, double radius = 1.0);
/// {x : |M x|_2 <= 1} for an invertible d x d matrix M.
StarBody ellipsoid(GridPtr grid, const Eigen::MatrixXd& m);
StarBody body_from_function(GridPtr grid, RadialProfile::Function rho, std::string label = {},
                            bool keep_closed_form = true);

double gauge(const StarBody& k, const Vec& x);
/// Central-difference gradient of the gauge at x != 0.
Vec gauge_gradient(const StarBody& k, const Vec& x);

/// (1/d) * integral of rho^d over the sphere.
double volume(const StarBody& k);

/// i-th dual mixed volume (1/d) * integral of rho_L^{d-i} rho_K^i.
double dual_mixed_volume(const StarBody& l, const StarBody& k, double i);

/// Max over grid nodes of |rho_K - rho_L|.
double radial_metric(const StarBody& k, const StarBody& l);

/// Body with rho^{-q} = a rho_K^{-q} + b rho_L^{-q}.
StarBody harmonic_combination(const StarBody& k, const StarBody& l, double a, double b, double q);

StarBody dilate(const StarBody& k, double lambda);

/// Returns lambda with K = lambda L when the ratio rho_K / rho_L deviates
/// from its mean by at most tol * mean on every node.
std::optional<double> is_dilate(const StarBody& k, const StarBody& l, double tol);

struct KernelCheckOptions {
  /// Points on the sphere of radius gamma (d = 2: equally spaced).
  std::size_t ball_samples = 64;
  /// Boundary points tested; 0 means every grid node.
  std::size_t boundary_samples = 0;
  /// Interior points checked along each segment.
  std::size_t segment_points = 16;
};

/// Sampled test of gamma B^d being contained in the kernel of K: every segment
/// from a point of the gamma-sphere to a boundary point stays inside K.
bool kernel_contains_ball(const StarBody& k, double gamma, const KernelCheckOptions& opts = {});

/// Boundary polygon in grid order turns left everywhere: the sine of every
/// turning angle is at least -tol.
bool is_convex_2d(const StarBody& k, double tol = 1e-8);

/// R_gamma = (d + 1) / (gamma^{d-1} kappa_{d-1}); every unit-volume body with
/// gamma B^d in its kernel lies inside R_gamma B^d.
double max_radius_bound(int dim, double gamma);

}  // namespace stargeo
