#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace stargeo {

using Vec = Eigen::VectorXd;

inline constexpr std::size_t kDefaultGrid2d = 2048;
inline constexpr std::size_t kDefaultGrid3d = 20000;

/// Quadrature nodes and weights on the unit sphere S^{d-1}, d in {2, 3}.
///
/// d = 2 uses n equally spaced angles theta_i = 2 pi i / n with trapezoid
/// weights 2 pi / n, which is spectrally accurate for periodic integrands.
/// d = 3 uses a Fibonacci lattice with equal weights 4 pi / n. Grids are
/// immutable once built and are shared between profiles by pointer.
class SphereGrid {
 public:
  static std::shared_ptr<const SphereGrid> make(int dim, std::size_t n);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return directions_.size(); }
  const std::vector<Vec>& directions() const noexcept { return directions_; }
  const Vec& direction(std::size_t i) const { return directions_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// Angle of node i (d = 2 only).
  double angle(std::size_t i) const;

  /// Sum_i w_i f(u_i) in node order. Throws NonFiniteIntegrand.
  double integrate(const std::function<double(const Vec&)>& f) const;

  /// Sum_i w_i values[i]; values must be given per node.
  double integrate_values(std::span<const double> values) const;

  /// Same dimension and identical node set.
  bool same_nodes(const SphereGrid& other) const;

  /// Index of the node closest to the unit vector u.
  std::size_t nearest(const Vec& u) const;

  /// Periodic linear interpolation bracket for a direction in the plane:
  /// returns (i, t) with the direction lying between node i and i+1 (mod n)
  /// at fraction t in [0, 1). d = 2 only.
  std::pair<std::size_t, double> bracket(const Vec& u) const;

 private:
  SphereGrid(int dim, std::vector<Vec> directions, std::vector<double> weights);

  int dim_;
  std::vector<Vec> directions_;
  std::vector<double> weights_;
  // Fibonacci lattice z-coordinates, strictly decreasing with index.
  std::vector<double> z_;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

/// Surface area of S^{d-1}.
double sphere_area(int dim);

/// Volume of the unit ball B^k (kappa_k).
double unit_ball_volume(int k);

}  // namespace stargeo
