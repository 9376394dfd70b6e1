#include "stargeo/adversarial.hpp"

#include <cmath>
#include <limits>

#include "stargeo/error.hpp"
#include "stargeo/transport.hpp"

namespace stargeo {

namespace {

void require_grid(const AdversarialProblem& p, const StarBody& k) {
  if (!p.grid().same_nodes(k.grid())) {
    throw Error(ErrorCode::GridMismatch, "body and problem live on different grids");
  }
}

McEstimate mean_and_se(const std::vector<double>& v) {
  McEstimate est;
  const double n = static_cast<double>(v.size());
  double m2 = 0.0;
  for (double x : v) est.mean += x;
  est.mean /= n;
  for (double x : v) m2 += (x - est.mean) * (x - est.mean);
  est.std_err = v.size() > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
  return est;
}

}  // namespace

AdversarialProblem::AdversarialProblem(DensityPtr d_r, DensityPtr d_n, GridPtr grid,
                                       double noise_weight)
    : d_r_(std::move(d_r)), d_n_(std::move(d_n)), grid_(std::move(grid)),
      noise_weight_(noise_weight), profile_r_(moment_profile(d_r_, 1.0, grid_)),
      profile_n_(moment_profile(d_n_, 1.0, grid_)) {
  if (!(noise_weight_ > 0.0) || !std::isfinite(noise_weight_)) {
    throw Error(ErrorCode::InvalidArgument, "noise weight must be positive and finite");
  }
}

AdversarialProblem AdversarialProblem::with_noise_weight(double noise_weight) const {
  if (!(noise_weight > 0.0) || !std::isfinite(noise_weight)) {
    throw Error(ErrorCode::InvalidArgument, "noise weight must be positive and finite");
  }
  AdversarialProblem copy = *this;
  copy.noise_weight_ = noise_weight;
  return copy;
}

double AdversarialProblem::net_moment(std::size_t i) const {
  const double a = dim() + 1.0;
  return std::pow(profile_r_[i], a) - noise_weight_ * std::pow(profile_n_[i], a);
}

double adversarial_loss(const AdversarialProblem& p, const StarBody& k) {
  require_grid(p, k);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.grid().size(); ++i) {
    sum += p.grid().weight(i) * p.net_moment(i) / k.profile()[i];
  }
  return sum;
}

McEstimate adversarial_loss_mc(const AdversarialProblem& p, const StarBody& k, std::size_t n,
                               std::uint64_t seed) {
  const McEstimate r = expected_gauge_mc(*p.d_r(), k, n, seed);
  const McEstimate s = expected_gauge_mc(*p.d_n(), k, n, seed ^ 0x9e3779b97f4a7c15ULL);
  const double w = p.noise_weight();
  return {r.mean - w * s.mean, std::hypot(r.std_err, w * s.std_err)};
}

StarBody build_Lrn(const AdversarialProblem& p) {
  const auto& grid = p.grid();
  std::size_t worst = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double m = p.net_moment(i);
    if (m < worst_margin) {
      worst_margin = m;
      worst = i;
    }
    values[i] = m > 0.0 ? std::pow(m, 1.0 / (p.dim() + 1.0)) : 0.0;
  }
  if (!(worst_margin > 0.0)) {
    throw ContainmentError(grid.direction(worst), worst_margin,
                           "clean moment does not dominate the weighted noisy moment");
  }
  if (p.profile_r().closed_form() && p.profile_n().closed_form()) {
    const MomentProfile r = p.profile_r();
    const MomentProfile n = p.profile_n();
    const double w = p.noise_weight();
    const double a = p.dim() + 1.0;
    return body_from_function(
        p.grid_ptr(),
        [r, n, w, a](const Vec& u) {
          const double m = std::pow(r.at_direction(u), a) - w * std::pow(n.at_direction(u), a);
          return std::pow(std::max(m, 0.0), 1.0 / a);
        },
        "L_rn");
  }
  return StarBody(RadialProfile(p.grid_ptr(), std::move(values)), "L_rn");
}

StarBody optimal_adversarial(const AdversarialProblem& p) {
  const StarBody l = build_Lrn(p);
  return dilate(l, std::pow(volume(l), -1.0 / p.dim())).with_label("K*");
}

std::optional<double> reweight_to_containment(const AdversarialProblem& p, double margin) {
  if (!(margin > 0.0 && margin < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "margin must lie in (0, 1)");
  }
  std::optional<double> best;
  const double a = p.dim() + 1.0;
  for (std::size_t i = 0; i < p.grid().size(); ++i) {
    const double rn = p.profile_n()[i];
    if (!(rn > 0.0)) continue;
    const double w = (1.0 - margin) * std::pow(p.profile_r()[i] / rn, a);
    if (!best || w < *best) best = w;
  }
  return best;
}

double scaling_alpha_star(const StarBody& k_r, const StarBody& k_n) {
  if (k_r.dim() != k_n.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "bodies differ in dimension");
  }
  const double m = std::min(k_r.profile().min(), k_n.profile().min());
  const double big_m = std::max(k_r.profile().max(), k_n.profile().max());
  return 0.5 * (volume(k_n) / volume(k_r)) * std::pow(m / big_m, k_r.dim() + 1.0);
}

// ---------------------------------------------------------------------------

namespace {

struct BinnedSample {
  std::size_t i;
  std::size_t j;
  double t;
  double r;
};

std::vector<BinnedSample> bin_samples(const std::vector<Vec>& xs, const SphereGrid& grid) {
  std::vector<BinnedSample> out;
  out.reserve(xs.size());
  for (const Vec& x : xs) {
    if (x.size() != 2) throw Error(ErrorCode::DimensionMismatch, "ERM samples must be planar");
    const double r = x.norm();
    if (r == 0.0) {
      out.push_back({0, 1, 0.0, 0.0});
      continue;
    }
    const auto [i, t] = grid.bracket(x / r);
    out.push_back({i, (i + 1) % grid.size(), t, r});
  }
  return out;
}

double binned_mean_gauge(const std::vector<BinnedSample>& s, const std::vector<double>& rho) {
  double sum = 0.0;
  for (const auto& b : s) sum += b.r / ((1.0 - b.t) * rho[b.i] + b.t * rho[b.j]);
  return sum / static_cast<double>(s.size());
}

void accumulate_gradient(const std::vector<BinnedSample>& s, const std::vector<double>& rho,
                         double sign, std::vector<double>& grad) {
  const double scale = sign / static_cast<double>(s.size());
  for (const auto& b : s) {
    const double r = (1.0 - b.t) * rho[b.i] + b.t * rho[b.j];
    const double g = -scale * b.r / (r * r);
    grad[b.i] += g * (1.0 - b.t);
    grad[b.j] += g * b.t;
  }
}

double grid_volume(const SphereGrid& grid, const std::vector<double>& rho) {
  double v = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) v += grid.weight(i) * rho[i] * rho[i];
  return 0.5 * v;
}

void project(const SphereGrid& grid, double floor, std::vector<double>& rho) {
  for (double& r : rho) r = std::max(r, floor);
  const double s = 1.0 / std::sqrt(grid_volume(grid, rho));
  for (double& r : rho) r *= s;
}

}  // namespace

double empirical_adversarial_loss(const std::vector<Vec>& samples_r,
                                  const std::vector<Vec>& samples_n, const StarBody& k) {
  if (samples_r.empty() || samples_n.empty()) {
    throw Error(ErrorCode::InvalidArgument, "ERM needs samples from both distributions");
  }
  double a = 0.0;
  for (const Vec& x : samples_r) a += k.gauge(x);
  double b = 0.0;
  for (const Vec& x : samples_n) b += k.gauge(x);
  return a / static_cast<double>(samples_r.size()) - b / static_cast<double>(samples_n.size());
}

ErmResult erm_solve(const std::vector<Vec>& samples_r, const std::vector<Vec>& samples_n,
                    const GridPtr& grid, const ErmOptions& opts) {
  if (grid->dim() != 2) throw Error(ErrorCode::UnsupportedDimension, "ERM solver is planar");
  if (samples_r.empty() || samples_n.empty()) {
    throw Error(ErrorCode::InvalidArgument, "ERM needs samples from both distributions");
  }
  if (!(opts.step_size > 0.0) || !(opts.gamma_floor > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "ERM needs positive step size and floor");
  }
  const auto br = bin_samples(samples_r, *grid);
  const auto bn = bin_samples(samples_n, *grid);
  auto loss_of = [&](const std::vector<double>& rho) {
    const double l = binned_mean_gauge(br, rho) - binned_mean_gauge(bn, rho);
    if (!std::isfinite(l)) throw Error(ErrorCode::DivergedERM, "empirical loss is not finite");
    return l;
  };

  const std::size_t n = grid->size();
  std::vector<double> rho(n, std::sqrt(1.0 / M_PI));
  project(*grid, opts.gamma_floor, rho);
  double loss = loss_of(rho);

  ErmResult result{StarBody(RadialProfile(grid, rho), "ERM"), {}};
  result.trace.push_back({0, loss, grid_volume(*grid, rho), 0.0});

  double step = opts.step_size;
  std::vector<double> grad(n), trial(n);
  for (std::size_t it = 1; it <= opts.steps; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    accumulate_gradient(br, rho, 1.0, grad);
    accumulate_gradient(bn, rho, -1.0, grad);
    bool accepted = false;
    double trial_loss = loss;
    for (int attempt = 0; attempt < 50; ++attempt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = rho[i] - step * grad[i] / grid->weight(i);
      project(*grid, opts.gamma_floor, trial);
      trial_loss = loss_of(trial);
      if (trial_loss < loss) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, std::abs(trial[i] - rho[i]));
    const double decrease = (loss - trial_loss) / std::max(std::abs(loss), 1e-300);
    rho.swap(trial);
    loss = trial_loss;
    result.trace.push_back({it, loss, grid_volume(*grid, rho), gap});
    step *= 1.5;
    if (decrease < opts.rel_tol) break;
  }
  result.body = StarBody(RadialProfile(grid, std::move(rho)), "ERM");
  return result;
}

W1Check w1_lower_bound_check(const AdversarialProblem& p, const StarBody& k, std::size_t n,
                             std::uint64_t seed) {
  if (!kernel_contains_ball(k, 1.0)) {
    throw Error(ErrorCode::LipschitzViolated, "unit ball is not in the kernel of the body");
  }
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  Rng rng(seed);
  const auto xs = draw_samples(*p.d_r(), n, rng);
  const auto ys = draw_samples(*p.d_n(), n, rng);
  std::vector<double> gx(n), gy(n);
  for (std::size_t i = 0; i < n; ++i) {
    gx[i] = k.gauge(xs[i]);
    gy[i] = k.gauge(ys[i]);
  }
  const McEstimate a = mean_and_se(gx);
  const McEstimate b = mean_and_se(gy);
  W1Check c;
  c.f_hat = a.mean - b.mean;
  c.f_se = std::hypot(a.std_err, b.std_err);
  c.w1_hat = w1_exact(xs, ys);
  c.literal_bound = c.f_hat >= c.w1_hat - 3.0 * c.f_se;
  c.kantorovich_bound = c.f_hat >= -c.w1_hat - 3.0 * c.f_se;
  c.abs_bound = std::abs(c.f_hat) <= c.w1_hat + 3.0 * c.f_se;
  return c;
}

}  // namespace stargeo
