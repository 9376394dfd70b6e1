#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "stargeo/density.hpp"
#include "stargeo/starbody.hpp"

namespace stargeo {

/// Hellinger critic setup. a(u) is the beta = 1 profile of d_r (the body
/// L_r), b(u) the beta = -1 profile of d_n.
class HellingerProblem {
 public:
  HellingerProblem(const DensityPtr& d_r, const DensityPtr& d_n, GridPtr grid);
  /// Direct construction from profile values; both must be positive.
  static HellingerProblem from_values(GridPtr grid, std::vector<double> a, std::vector<double> b);

  const SphereGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  int dim() const noexcept { return grid_->dim(); }
  const std::vector<double>& a() const noexcept { return a_; }
  const std::vector<double>& b() const noexcept { return b_; }

  StarBody body_r() const;
  StarBody body_n_tilde() const;

 private:
  HellingerProblem(GridPtr grid, std::vector<double> a, std::vector<double> b);

  GridPtr grid_;
  std::vector<double> a_;
  std::vector<double> b_;
};

/// E_r |x|_K + E_n |x|_K^{-1}; the pair holds the two terms separately.
std::pair<double, double> hellinger_loss_terms(const HellingerProblem& h, const StarBody& k);
double hellinger_loss(const HellingerProblem& h, const StarBody& k);

/// rho = (1 / rho_K + rho_K b^{d-1} / a^{d+1})^{-1}.
StarBody build_Krn(const HellingerProblem& h, const StarBody& k);

/// min_u sqrt(1/4 (a / b)^{d-1}).
double lambda_star(const HellingerProblem& h);

struct DilatePair {
  StarBody plus;
  StarBody minus;
};

/// The two bodies K with K_{r,n} = lambda L_r. Throws InvalidLambda for
/// lambda <= 0 and LambdaAboveCritical when the discriminant turns negative.
DilatePair hellinger_dilate_solutions(const HellingerProblem& h, double lambda);

/// Positive real roots of qa x^2 + qb x + qc, ascending.
std::vector<double> quadratic_positive_roots(double qa, double qb, double qc);

/// alpha-divergence critic setup with r(u) the beta = alpha profile of d_r and
/// n(u) the beta = alpha - 1 profile of d_n.
class AlphaProblem {
 public:
  AlphaProblem(const DensityPtr& d_r, const DensityPtr& d_n, GridPtr grid, double alpha);
  static AlphaProblem from_values(GridPtr grid, double alpha, std::vector<double> r,
                                  std::vector<double> n);

  const SphereGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  int dim() const noexcept { return grid_->dim(); }
  double alpha() const noexcept { return alpha_; }
  const std::vector<double>& r() const noexcept { return r_; }
  const std::vector<double>& n() const noexcept { return n_; }
  /// c(u) = n^{d+alpha-1} / r^{d+alpha}.
  double coefficient(std::size_t i) const;

  /// L_r^alpha, the body with radial function r.
  StarBody body_r() const;

 private:
  AlphaProblem(GridPtr grid, double alpha, std::vector<double> r, std::vector<double> n);

  GridPtr grid_;
  double alpha_;
  std::vector<double> r_;
  std::vector<double> n_;
};

/// alpha^{-1} E_r |x|_K^alpha + (1 - alpha)^{-1} E_n |x|_K^{alpha-1}.
std::pair<double, double> alpha_loss_terms(const AlphaProblem& a, const StarBody& k);
double alpha_loss(const AlphaProblem& a, const StarBody& k);

/// K-dependent bodies whose -1 dual mixed volumes with K give the two
/// expectations: rho^{d+1} = r^{d+alpha} rho_K^{1-alpha} and
/// rho^{d+1} = n^{d+alpha-1} rho_K^{2-alpha}.
std::pair<StarBody, StarBody> alpha_tilde_bodies(const AlphaProblem& a, const StarBody& k);

/// rho = (alpha^{-1} rho_K^{-alpha} + (1-alpha)^{-1} c rho_K^{1-alpha})^{-1/alpha}, alpha in (0, 1).
StarBody build_Kalpha(const AlphaProblem& a, const StarBody& k);

/// g(x) = alpha^{-1} x^{-alpha} + c (1 - alpha)^{-1} x^{1-alpha}.
double alpha_g(double alpha, double c, double x);

/// Both positive solutions (smaller first) of g(x) = rhs; empty when rhs is
/// below the minimum g(1 / c).
std::optional<std::pair<double, double>> fixed_point_roots(double alpha, double c, double rhs);

/// Largest lambda for which g = (lambda r)^{-alpha} is solvable on every node.
double alpha_lambda_star(const AlphaProblem& a);

/// Bodies K with build_Kalpha(K) = lambda L_r^alpha, solved per direction.
/// Holds {plus, minus} or nothing.
std::vector<StarBody> alpha_fixed_point_solve(const AlphaProblem& a, double lambda);

}  // namespace stargeo
