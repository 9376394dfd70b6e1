#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "stargeo/density.hpp"
#include "stargeo/starbody.hpp"

namespace stargeo {

/// x -> LeakyReLU(W x), no bias.
struct DenseLayer {
  Eigen::MatrixXd w;
  double slope = 0.5;
};

/// x -> x + V LeakyReLU(U x), no bias. Invertible when |U| |V| < 1.
struct ResidualLayer {
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;
  double slope = 0.5;
};

using NetLayer = std::variant<DenseLayer, ResidualLayer>;

/// Positively homogeneous regularizer R(x) = |f_L o ... o f_1(x)|_2.
class HomogeneousNet {
 public:
  HomogeneousNet(int input_dim, std::vector<NetLayer> layers);

  int input_dim() const noexcept { return input_dim_; }
  int output_dim() const noexcept;
  const std::vector<NetLayer>& layers() const noexcept { return layers_; }
  std::vector<NetLayer>& mutable_layers() noexcept { return layers_; }

 private:
  int input_dim_;
  std::vector<NetLayer> layers_;
};

double forward(const HomogeneousNet& net, const Vec& x);
/// Reverse-mode gradient of R with respect to the input. Kinks take the
/// slope-1 side.
Vec input_gradient(const HomogeneousNet& net, const Vec& x);
/// Smallest absolute pre-activation met while evaluating x; used to pick
/// probe points away from kinks.
double min_preactivation(const HomogeneousNet& net, const Vec& x);

struct ArchitectureReport {
  std::vector<std::string> violations;
  bool ok() const noexcept { return violations.empty(); }
};

ArchitectureReport validate_architecture(const HomogeneousNet& net);

/// Largest singular value by power iteration.
double spectral_norm(const Eigen::MatrixXd& m, int iterations = 200);

/// Body with rho(u) = 1 / R(u); grid interpolation unless exact is set.
StarBody to_star_body(const HomogeneousNet& net, const GridPtr& grid, bool exact = false);

struct RandomNetOptions {
  std::vector<int> widths{4, 8};
  double slope = 0.5;
  std::size_t residual_layers = 1;
  int residual_hidden = 8;
  /// Target |U| |V| for residual blocks.
  double residual_norm = 0.5;
};

HomogeneousNet random_net(int input_dim, const RandomNetOptions& opts, Rng& rng);

enum class CriticLoss { Adversarial, Hellinger };

struct TrainOptions {
  std::size_t steps = 1500;
  double lr = 1e-2;
  std::size_t batch = 256;
  double gp_weight = 10.0;
  std::uint64_t seed = 0;
  /// Residual blocks are rescaled after each step to keep |U| |V| below this.
  double residual_bound = 0.99;
};

struct TrainTraceRow {
  std::size_t step = 0;
  double loss = 0.0;
  double critic = 0.0;
  double penalty = 0.0;
};

struct TrainResult {
  HomogeneousNet net;
  std::vector<TrainTraceRow> trace;
};

/// Minibatch Adam on the critic loss plus gp_weight * mean (|grad R| - 1)^2
/// at random interpolates of clean and noisy samples.
TrainResult train(const HomogeneousNet& net, const std::vector<Vec>& samples_r,
                  const std::vector<Vec>& samples_n, CriticLoss loss, const TrainOptions& opts);

/// Critic objective of a net on full sample sets, without penalty.
double critic_loss(const HomogeneousNet& net, const std::vector<Vec>& samples_r,
                   const std::vector<Vec>& samples_n, CriticLoss loss);

enum class Phi { Identity, Square };

struct DenoiseProblem {
  Vec y;
  std::variant<StarBody, HomogeneousNet> regularizer;
  double lambda = 0.0;
  Phi phi = Phi::Identity;
  std::size_t steps = 2000;
  double step_size = 0.25;
};

struct DenoiseResult {
  Vec x;
  std::vector<double> objective;
};

/// Gradient descent from y on |x - y|^2 + lambda phi(R(x)) with backtracking.
DenoiseResult denoise(const DenoiseProblem& p);

/// lambda presets for the two critic losses given a base value.
double adversarial_lambda_preset(double base);
double hellinger_lambda_preset(double base);

std::string net_to_json(const HomogeneousNet& net);
HomogeneousNet net_from_json(const std::string& text);

}  // namespace stargeo
