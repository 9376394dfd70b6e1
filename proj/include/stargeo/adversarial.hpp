#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stargeo/density.hpp"
#include "stargeo/starbody.hpp"

namespace stargeo {

/// Wasserstein-critic setup: clean density d_r, noisy density d_n and the
/// weight lambda_w on the noisy term. Both beta = 1 moment profiles are
/// computed once at construction.
class AdversarialProblem {
 public:
  AdversarialProblem(DensityPtr d_r, DensityPtr d_n, GridPtr grid, double noise_weight = 1.0);

  const DensityPtr& d_r() const noexcept { return d_r_; }
  const DensityPtr& d_n() const noexcept { return d_n_; }
  const SphereGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  int dim() const noexcept { return grid_->dim(); }
  double noise_weight() const noexcept { return noise_weight_; }
  const MomentProfile& profile_r() const noexcept { return profile_r_; }
  const MomentProfile& profile_n() const noexcept { return profile_n_; }

  /// Same densities and profiles with another noise weight.
  AdversarialProblem with_noise_weight(double noise_weight) const;

  /// rho_r^{d+1} - lambda_w rho_n^{d+1} at grid node i.
  double net_moment(std::size_t i) const;

 private:
  DensityPtr d_r_;
  DensityPtr d_n_;
  GridPtr grid_;
  double noise_weight_;
  MomentProfile profile_r_;
  MomentProfile profile_n_;
};

/// E_r |x|_K - lambda_w E_n |x|_K by quadrature.
double adversarial_loss(const AdversarialProblem& p, const StarBody& k);

/// Monte Carlo version; std_err combines both sample means.
McEstimate adversarial_loss_mc(const AdversarialProblem& p, const StarBody& k, std::size_t n,
                               std::uint64_t seed);

/// Body with rho^{d+1} = rho_r^{d+1} - lambda_w rho_n^{d+1}. Throws
/// ContainmentError at the node with the smallest (non-positive) margin.
StarBody build_Lrn(const AdversarialProblem& p);

/// Unit-volume dilate of L_{r,n}.
StarBody optimal_adversarial(const AdversarialProblem& p);

/// Largest lambda_w with lambda_w rho_n^{d+1} <= (1 - margin) rho_r^{d+1} on
/// the grid; empty when rho_n vanishes everywhere.
std::optional<double> reweight_to_containment(const AdversarialProblem& p, double margin);

/// 1/2 (vol K_n / vol K_r) (m / M)^{d+1} with m the smallest and M the
/// largest radius over both bodies.
double scaling_alpha_star(const StarBody& k_r, const StarBody& k_n);

struct ErmOptions {
  std::size_t steps = 300;
  double step_size = 1.0;
  /// Lower clamp on every radial value after a step.
  double gamma_floor = 1e-3;
  /// Stop when the relative loss decrease falls below this.
  double rel_tol = 1e-12;
};

struct ErmTraceRow {
  std::size_t step = 0;
  double loss = 0.0;
  double volume = 0.0;
  /// Radial distance to the previous iterate.
  double radial_gap = 0.0;
};

struct ErmResult {
  StarBody body;
  std::vector<ErmTraceRow> trace;
};

/// Empirical loss (1/N_r) sum |x_i|_K - (1/N_n) sum |y_j|_K for a grid body.
double empirical_adversarial_loss(const std::vector<Vec>& samples_r,
                                  const std::vector<Vec>& samples_n, const StarBody& k);

/// Projected gradient descent on the grid values of rho under vol = 1.
/// Planar only. Starts from the unit-volume disk.
ErmResult erm_solve(const std::vector<Vec>& samples_r, const std::vector<Vec>& samples_n,
                    const GridPtr& grid, const ErmOptions& opts = {});

struct W1Check {
  double f_hat = 0.0;
  double f_se = 0.0;
  double w1_hat = 0.0;
  /// f_hat >= w1_hat - 3 se.
  bool literal_bound = false;
  /// f_hat >= -w1_hat - 3 se, the dual Kantorovich bound for a 1-Lipschitz gauge.
  bool kantorovich_bound = false;
  /// |f_hat| <= w1_hat + 3 se.
  bool abs_bound = false;
};

/// Draws n samples from each density, estimates F(K) (unweighted) and the
/// exact empirical W1 between the two sample sets. Throws LipschitzViolated
/// unless the unit ball lies in the kernel of K.
W1Check w1_lower_bound_check(const AdversarialProblem& p, const StarBody& k, std::size_t n,
                             std::uint64_t seed);

}  // namespace stargeo
