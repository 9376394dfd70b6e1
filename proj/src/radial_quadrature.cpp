#include "stargeo/radial_quadrature.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "stargeo/error.hpp"

namespace stargeo {

namespace {

using Rule = boost::math::quadrature::gauss<double, 32>;

constexpr int kGradingLevels = 48;

// Gauss-Legendre on [lo, hi] of g(s).
template <typename G>
double panel(const G& g, double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] == 0.0) {
      sum += w[k] * g(mid);
    } else {
      sum += w[k] * (g(mid - half * x[k]) + g(mid + half * x[k]));
    }
  }
  return half * sum;
}

}  // namespace

double radial_integral(const std::function<double(double)>& f, double power,
                       const RadialIntegralOptions& opts) {
  if (!(power > -1.0)) {
    throw Error(ErrorCode::InvalidArgument, "radial power must exceed -1");
  }
  auto g = [&](double s) {
    const double one_minus = 1.0 - s;
    const double t = s / one_minus;
    const double v = f(t);
    if (v == 0.0) return 0.0;
    return std::pow(t, power) * v / (one_minus * one_minus);
  };

  auto estimate = [&](std::size_t panels) {
    const double h = 1.0 / static_cast<double>(panels);
    double sum = 0.0;
    double hi = h;
    for (int level = 0; level < kGradingLevels; ++level) {
      const double lo = 0.5 * hi;
      sum += panel(g, lo, hi);
      hi = lo;
    }
    for (std::size_t p = 1; p < panels; ++p) {
      sum += panel(g, h * static_cast<double>(p), h * static_cast<double>(p + 1));
    }
    return sum;
  };

  std::size_t panels = std::max<std::size_t>(opts.initial_panels, 1);
  double previous = estimate(panels);
  while (panels < opts.max_panels) {
    panels *= 2;
    const double current = estimate(panels);
    if (!std::isfinite(current)) break;
    if (std::abs(current - previous) <= opts.rel_tol * std::abs(current)) return current;
    previous = current;
  }
  throw Error(ErrorCode::DivergentMoment,
              "radial moment did not converge within " + std::to_string(opts.max_panels) +
                  " panels (power " + std::to_string(power) + ")");
}

}  // namespace stargeo
