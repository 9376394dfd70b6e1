#include "stargeo/spherequad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stargeo/error.hpp"

namespace stargeo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DegenerateCombination: return "DegenerateCombination";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::UnsupportedDensity: return "UnsupportedDensity";
    case ErrorCode::DivergentMoment: return "DivergentMoment";
    case ErrorCode::ContainmentViolated: return "ContainmentViolated";
    case ErrorCode::LipschitzViolated: return "LipschitzViolated";
    case ErrorCode::DivergedERM: return "DivergedERM";
    case ErrorCode::LambdaAboveCritical: return "LambdaAboveCritical";
    case ErrorCode::InvalidLambda: return "InvalidLambda";
    case ErrorCode::PositivityViolated: return "PositivityViolated";
    case ErrorCode::DivergedTraining: return "DivergedTraining";
    case ErrorCode::DivergedDenoise: return "DivergedDenoise";
    case ErrorCode::ScenarioInvalid: return "ScenarioInvalid";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteIntegrand:
    case ErrorCode::DivergentMoment:
    case ErrorCode::ContainmentViolated:
    case ErrorCode::LipschitzViolated:
    case ErrorCode::DivergedERM:
    case ErrorCode::LambdaAboveCritical:
    case ErrorCode::PositivityViolated:
    case ErrorCode::DivergedTraining:
    case ErrorCode::DivergedDenoise:
      return true;
    default:
      return false;
  }
}

double sphere_area(int dim) {
  // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
  return 2.0 * std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0);
}

double unit_ball_volume(int k) {
  return std::pow(std::numbers::pi, k / 2.0) / std::tgamma(k / 2.0 + 1.0);
}

SphereGrid::SphereGrid(int dim, std::vector<Vec> directions, std::vector<double> weights)
    : dim_(dim), directions_(std::move(directions)), weights_(std::move(weights)) {
  if (dim_ == 3) {
    z_.reserve(directions_.size());
    for (const auto& u : directions_) z_.push_back(u[2]);
  }
}

std::shared_ptr<const SphereGrid> SphereGrid::make(int dim, std::size_t n) {
  if (dim != 2 && dim != 3) {
    throw Error(ErrorCode::UnsupportedDimension,
                "sphere grids exist for d = 2 and d = 3, got d = " + std::to_string(dim));
  }
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "grid needs at least 4 nodes");

  std::vector<Vec> dirs;
  dirs.reserve(n);
  std::vector<double> weights;
  if (dim == 2) {
    const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
    weights.assign(n, h);
    for (std::size_t i = 0; i < n; ++i) {
      const double theta = h * static_cast<double>(i);
      Vec u(2);
      u << std::cos(theta), std::sin(theta);
      dirs.push_back(std::move(u));
    }
  } else {
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    weights.assign(n, 4.0 * std::numbers::pi / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden_angle * static_cast<double>(i);
      Vec u(3);
      u << r * std::cos(phi), r * std::sin(phi), z;
      u /= u.norm();
      dirs.push_back(std::move(u));
    }
  }
  return std::shared_ptr<const SphereGrid>(new SphereGrid(dim, std::move(dirs), std::move(weights)));
}

double SphereGrid::angle(std::size_t i) const {
  return 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(size());
}

double SphereGrid::integrate(const std::function<double(const Vec&)>& f) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double v = f(directions_[i]);
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteIntegrand,
                  "integrand is not finite at node " + std::to_string(i));
    }
    sum += weights_[i] * v;
  }
  return sum;
}

double SphereGrid::integrate_values(std::span<const double> values) const {
  if (values.size() != size()) {
    throw Error(ErrorCode::SizeMismatch, "values do not match grid size");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::NonFiniteIntegrand,
                  "integrand is not finite at node " + std::to_string(i));
    }
    sum += weights_[i] * values[i];
  }
  return sum;
}

bool SphereGrid::same_nodes(const SphereGrid& other) const {
  if (this == &other) return true;
  if (dim_ != other.dim_ || size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (directions_[i] != other.directions_[i]) return false;
  }
  return true;
}

std::pair<std::size_t, double> SphereGrid::bracket(const Vec& u) const {
  const double n = static_cast<double>(size());
  double theta = std::atan2(u[1], u[0]);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  double pos = theta / (2.0 * std::numbers::pi) * n;
  if (pos >= n) pos -= n;
  auto i = static_cast<std::size_t>(pos);
  if (i >= size()) i = size() - 1;
  return {i, pos - static_cast<double>(i)};
}

std::size_t SphereGrid::nearest(const Vec& u) const {
  if (dim_ == 2) {
    auto [i, t] = bracket(u);
    return t < 0.5 ? i : (i + 1) % size();
  }
  // Fibonacci nodes are sorted by z; scan outward from the z-matched index and
  // stop once the z-gap alone exceeds the best chord distance found.
  const double n = static_cast<double>(size());
  const double z = u[2];
  long start = static_cast<long>(std::lround((1.0 - z) * n / 2.0 - 0.5));
  start = std::clamp(start, 0L, static_cast<long>(size()) - 1);
  std::size_t best = static_cast<std::size_t>(start);
  double best_d2 = (directions_[best] - u).squaredNorm();
  auto visit = [&](long j) {
    const double d2 = (directions_[static_cast<std::size_t>(j)] - u).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<std::size_t>(j);
    }
  };
  for (long j = start + 1; j < static_cast<long>(size()); ++j) {
    const double dz = z_[static_cast<std::size_t>(j)] - z;
    if (dz * dz > best_d2) break;
    visit(j);
  }
  for (long j = start - 1; j >= 0; --j) {
    const double dz = z_[static_cast<std::size_t>(j)] - z;
    if (dz * dz > best_d2) break;
    visit(j);
  }
  return best;
}

}  // namespace stargeo
