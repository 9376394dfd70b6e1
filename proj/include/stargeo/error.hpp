#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace stargeo {

enum class ErrorCode {
  InvalidArgument,
  UnsupportedDimension,
  NonFiniteIntegrand,
  GridMismatch,
  DegenerateCombination,
  DimensionMismatch,
  SizeMismatch,
  UnsupportedDensity,
  DivergentMoment,
  ContainmentViolated,
  LipschitzViolated,
  DivergedERM,
  LambdaAboveCritical,
  InvalidLambda,
  PositivityViolated,
  DivergedTraining,
  DivergedDenoise,
  ScenarioInvalid,
};

std::string_view to_string(ErrorCode code);

/// Numerical failures (as opposed to bad input) map to a distinct CLI exit code.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when the real-data moment profile fails to dominate the weighted
/// noise profile. Carries the worst grid direction and its (negative) margin
/// rho_r^{d+1} - w * rho_n^{d+1}.
class ContainmentError : public Error {
 public:
  ContainmentError(Eigen::VectorXd direction, double margin, const std::string& what)
      : Error(ErrorCode::ContainmentViolated, what),
        direction_(std::move(direction)),
        margin_(margin) {}

  const Eigen::VectorXd& direction() const noexcept { return direction_; }
  double margin() const noexcept { return margin_; }

 private:
  Eigen::VectorXd direction_;
  double margin_;
};

}  // namespace stargeo
