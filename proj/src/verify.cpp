#include "stargeo/verify.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "stargeo/adversarial.hpp"
#include "stargeo/divergence.hpp"
#include "stargeo/error.hpp"
#include "stargeo/random_bodies.hpp"
#include "stargeo/starnet.hpp"
#include "stargeo/transport.hpp"
#include "stargeo/weakconvex.hpp"

namespace stargeo {

namespace {

class Recorder {
 public:
  explicit Recorder(std::vector<CheckResult>& out) : out_(out) {}
  // Passes when value <= tol.
  void below(const std::string& suite, const std::string& name, double value, double tol) {
    out_.push_back({suite, name, value <= tol, value, tol});
  }
  void flag(const std::string& suite, const std::string& name, bool ok) {
    out_.push_back({suite, name, ok, ok ? 1.0 : 0.0, 1.0});
  }

 private:
  std::vector<CheckResult>& out_;
};

DensityPtr iso_gaussian(double sigma) {
  return std::make_shared<GaussianDensity>(Vec::Zero(2), sigma * sigma * Eigen::MatrixXd::Identity(2, 2));
}

Vec normal_vec(int d, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

}  // namespace

std::vector<CheckResult> run_verify_suite(bool quick, std::uint64_t seed) {
  std::vector<CheckResult> out;
  Recorder rec(out);
  Rng rng(seed);
  const int trials = quick ? 10 : 100;
  const auto g2 = SphereGrid::make(2, quick ? 512 : 2048);
  const auto g3 = SphereGrid::make(3, quick ? 2000 : 20000);

  // spherequad
  {
    double s2 = 0.0;
    for (double w : g2->weights()) s2 += w;
    rec.below("spherequad", "weights sum to 2 pi", std::abs(s2 - 2.0 * std::numbers::pi), 1e-9);
    double s3 = 0.0;
    for (double w : g3->weights()) s3 += w;
    rec.below("spherequad", "weights sum to 4 pi", std::abs(s3 / (4.0 * std::numbers::pi) - 1.0), 1e-3);
    double norm_err = 0.0;
    for (const auto& u : g3->directions()) norm_err = std::max(norm_err, std::abs(u.norm() - 1.0));
    rec.below("spherequad", "unit directions", norm_err, 1e-12);
  }

  // starbody
  {
    double duality = 0.0, lutwak = std::numeric_limits<double>::infinity(), chain = lutwak;
    double homog = 0.0;
    for (int t = 0; t < trials; ++t) {
      const StarBody k = random_smooth_body(g2, rng);
      const StarBody l = random_smooth_body(g2, rng);
      for (std::size_t i = 0; i < g2->size(); i += 17) {
        duality = std::max(duality, std::abs(k.gauge(k.profile()[i] * g2->direction(i)) - 1.0));
      }
      const double lhs = std::pow(dual_mixed_volume(l, k, -1.0), 2);
      const double rhs = std::pow(volume(l), 3) / volume(k);
      lutwak = std::min(lutwak, (lhs - rhs) / rhs);
      for (double a : {0.25, 0.5, 0.75}) {
        const double v = dual_mixed_volume(l, k, -a);
        const double bound = std::pow(volume(l), (2.0 + a) / 2.0) * std::pow(volume(k), -a / 2.0);
        chain = std::min(chain, (v - bound) / bound);
      }
      const Vec x = normal_vec(2, rng);
      homog = std::max(homog, std::abs(k.profile().at(2.5 * x) - k.profile().at(x) / 2.5) /
                                  k.profile().at(x));
    }
    rec.below("starbody", "gauge(rho(u) u) = 1", duality, 1e-12);
    rec.below("starbody", "Lutwak inequality slack", -lutwak, 1e-9);
    rec.below("starbody", "dual mixed volume chain slack", -chain, 1e-9);
    rec.below("starbody", "radial extension homogeneity", homog, 1e-12);
    rec.flag("starbody", "unit disk convex", is_convex_2d(unit_ball(g2)));
    rec.flag("starbody", "l_1/2 ball nonconvex", !is_convex_2d(lp_ball(g2, 0.5)));
    rec.flag("starbody", "2B contains B in kernel", kernel_contains_ball(unit_ball(g2, 2.0), 1.0));
    rec.flag("starbody", "B/2 does not", !kernel_contains_ball(unit_ball(g2, 0.5), 1.0));
  }

  // density
  {
    const double sigma = 0.7;
    const auto mp = moment_profile(iso_gaussian(sigma), 1.0, g2, MomentMethod::Quadrature);
    const double want = sigma / (2.0 * std::sqrt(2.0 * std::numbers::pi));
    double err = 0.0;
    for (double v : mp.values()) err = std::max(err, std::abs(std::pow(v, 3) - want) / want);
    rec.below("density", "Gaussian moment quadrature vs closed form", err, 1e-8);
    const auto uni = std::make_shared<UniformBodyDensity>(unit_ball(g2));
    rec.below("density", "E|x| uniform disk = 2/3",
              std::abs(expected_gauge_quadrature(uni, unit_ball(g2)) - 2.0 / 3.0), 1e-6);
    rec.below("density", "E 1/|x| uniform disk = 2",
              std::abs(expected_gauge_power(uni, unit_ball(g2), -1.0) - 2.0), 1e-6);
  }

  // adversarial
  {
    AdversarialProblem p(iso_gaussian(1.0), iso_gaussian(0.5), g2);
    const StarBody ks = optimal_adversarial(p);
    const double best = adversarial_loss(p, ks);
    double gap = std::numeric_limits<double>::infinity();
    double homog = 0.0;
    for (int t = 0; t < trials; ++t) {
      StarBody k = random_smooth_body(g2, rng);
      k = dilate(k, std::pow(volume(k), -0.5));
      gap = std::min(gap, adversarial_loss(p, k) - best);
      homog = std::max(homog, std::abs(adversarial_loss(p, dilate(k, 3.0)) * 3.0 -
                                       adversarial_loss(p, k)) / adversarial_loss(p, k));
    }
    rec.below("adversarial", "optimality certificate", -gap, 1e-9);
    rec.below("adversarial", "loss homogeneity in scaling", homog, 1e-10);
    rec.below("adversarial", "unit volume optimum", std::abs(volume(ks) - 1.0), 1e-9);
    bool raised = false;
    try {
      build_Lrn(AdversarialProblem(iso_gaussian(0.5), iso_gaussian(1.0), g2));
    } catch (const ContainmentError&) {
      raised = true;
    }
    rec.flag("adversarial", "containment violation reported", raised);
  }

  // divergence
  {
    std::vector<double> a(g2->size()), b(g2->size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double th = g2->angle(i);
      a[i] = 1.0 + 0.3 * std::cos(2.0 * th);
      b[i] = 0.8 + 0.2 * std::sin(th);
    }
    const auto h = HellingerProblem::from_values(g2, a, b);
    const double ls = lambda_star(h);
    const StarBody lr = h.body_r();
    double plug = 0.0;
    for (double f : {0.3, 0.7, 1.0}) {
      const auto kp = hellinger_dilate_solutions(h, f * ls);
      for (const StarBody* k : {&kp.plus, &kp.minus}) {
        const auto got = is_dilate(build_Krn(h, *k), lr, 1e-9);
        plug = std::max(plug, got ? std::abs(*got / (f * ls) - 1.0) : 1.0);
      }
    }
    rec.below("divergence", "plug-in dilate consistency", plug, 1e-9);
    bool above = false;
    try {
      hellinger_dilate_solutions(h, ls * (1.0 + 1e-6));
    } catch (const Error& e) {
      above = e.code() == ErrorCode::LambdaAboveCritical;
    }
    rec.flag("divergence", "above-critical lambda rejected", above);
    bool below = true;
    try {
      hellinger_dilate_solutions(h, ls * (1.0 - 1e-6));
    } catch (const Error&) {
      below = false;
    }
    rec.flag("divergence", "below-critical lambda accepted", below);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    std::uniform_int_distribution<int> dd(2, 6);
    bool roots_ok = true;
    for (int t = 0; t < trials * 10; ++t) {
      const double av = u(rng), bv = u(rng), lam = u(rng) * 0.5;
      const int d = dd(rng);
      const double disc = 1.0 - 4.0 * lam * lam * std::pow(bv / av, d - 1);
      const auto roots = quadratic_positive_roots(lam * std::pow(bv, d - 1) / std::pow(av, d), -1.0, lam * av);
      const std::size_t want = disc > 1e-12 ? 2 : (disc < -1e-12 ? 0 : roots.size());
      roots_ok = roots_ok && roots.size() == want;
    }
    rec.flag("divergence", "positive root count matches discriminant sign", roots_ok);
  }

  // weakconvex
  {
    const StarBody k = lp_ball(SphereGrid::make(2, 1024), 0.8);
    bool monotone = true;
    bool seen = false;
    for (double rho : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
      const bool c = is_weakly_convex(k, rho);
      monotone = monotone && (!seen || c);
      seen = seen || c;
    }
    rec.flag("weakconvex", "monotone convexification", monotone);
  }

  // starnet
  {
    double homog = 0.0;
    for (int t = 0; t < trials; ++t) {
      const auto net = random_net(2, {}, rng);
      const Vec x = normal_vec(2, rng);
      homog = std::max(homog, std::abs(forward(net, 3.0 * x) - 3.0 * forward(net, x)) / (3.0 * forward(net, x)));
    }
    rec.below("starnet", "positive homogeneity", homog, 1e-6);
  }

  // transport
  {
    std::vector<Vec> xs, ys;
    for (int i = 0; i < 40; ++i) {
      xs.push_back(normal_vec(2, rng));
      ys.push_back(normal_vec(2, rng));
    }
    const double w = w1_exact(xs, ys);
    auto shifted = [](std::vector<Vec> v, double s, const Vec& t) {
      for (auto& x : v) x = s * x + t;
      return v;
    };
    const Vec t = normal_vec(2, rng);
    const Vec z = Vec::Zero(2);
    double err = std::abs(w1_exact(ys, xs) - w);
    err = std::max(err, std::abs(w1_exact(shifted(xs, 1.0, t), shifted(ys, 1.0, t)) - w));
    err = std::max(err, std::abs(w1_exact(shifted(xs, 2.5, z), shifted(ys, 2.5, z)) - 2.5 * w));
    rec.below("transport", "symmetry, translation and scaling", err, 1e-10);
  }
  return out;
}

}  // namespace stargeo
