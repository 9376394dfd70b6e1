#include "stargeo/starnet.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>
#include <json.hpp>

#include "stargeo/error.hpp"

namespace stargeo {

namespace {

using Mask = Eigen::ArrayXd;

Mask activation_mask(const Vec& z, double slope) {
  return (z.array() >= 0.0).select(Mask::Ones(z.size()), Mask::Constant(z.size(), slope));
}

// Activation pattern plus the input of every layer for one evaluation point.
struct Tape {
  std::vector<Mask> masks;
  std::vector<Vec> inputs;
  Vec output;
  double min_abs_pre = std::numeric_limits<double>::infinity();
};

Tape record(const HomogeneousNet& net, const Vec& x) {
  if (x.size() != net.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "input dimension does not match the network");
  }
  Tape t;
  Vec h = x;
  for (const auto& layer : net.layers()) {
    t.inputs.push_back(h);
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      const Vec z = d->w * h;
      t.min_abs_pre = std::min(t.min_abs_pre, z.cwiseAbs().minCoeff());
      t.masks.push_back(activation_mask(z, d->slope));
      h = (t.masks.back() * z.array()).matrix();
    } else {
      const auto& r = std::get<ResidualLayer>(layer);
      const Vec z = r.u * h;
      t.min_abs_pre = std::min(t.min_abs_pre, z.cwiseAbs().minCoeff());
      t.masks.push_back(activation_mask(z, r.slope));
      h = h + r.v * (t.masks.back() * z.array()).matrix();
    }
  }
  t.output = h;
  return t;
}

// Linear chain with frozen masks applied to an arbitrary input.
std::vector<Vec> replay(const HomogeneousNet& net, const std::vector<Mask>& masks, const Vec& x,
                        Vec& out) {
  std::vector<Vec> inputs;
  Vec h = x;
  for (std::size_t l = 0; l < masks.size(); ++l) {
    inputs.push_back(h);
    const auto& layer = net.layers()[l];
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      h = (masks[l] * (d->w * h).array()).matrix();
    } else {
      const auto& r = std::get<ResidualLayer>(layer);
      h = h + r.v * (masks[l] * (r.u * h).array()).matrix();
    }
  }
  out = h;
  return inputs;
}

struct LayerGrad {
  Eigen::MatrixXd a;  // dW or dU
  Eigen::MatrixXd b;  // dV
};

std::vector<LayerGrad> zero_grads(const HomogeneousNet& net) {
  std::vector<LayerGrad> g;
  for (const auto& layer : net.layers()) {
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      g.push_back({Eigen::MatrixXd::Zero(d->w.rows(), d->w.cols()), {}});
    } else {
      const auto& r = std::get<ResidualLayer>(layer);
      g.push_back({Eigen::MatrixXd::Zero(r.u.rows(), r.u.cols()),
                   Eigen::MatrixXd::Zero(r.v.rows(), r.v.cols())});
    }
  }
  return g;
}

// Pulls the output cotangent back through the frozen chain; accumulates
// scale * weight gradients into grads (when given) and returns the input
// cotangent.
Vec backward(const HomogeneousNet& net, const std::vector<Mask>& masks,
             const std::vector<Vec>& inputs, Vec cot, double scale, std::vector<LayerGrad>* grads) {
  for (std::size_t l = masks.size(); l-- > 0;) {
    const auto& layer = net.layers()[l];
    const Vec& h = inputs[l];
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      const Vec gz = (masks[l] * cot.array()).matrix();
      if (grads) (*grads)[l].a.noalias() += scale * gz * h.transpose();
      cot = d->w.transpose() * gz;
    } else {
      const auto& r = std::get<ResidualLayer>(layer);
      const Vec s = (masks[l] * (r.u * h).array()).matrix();
      if (grads) (*grads)[l].b.noalias() += scale * cot * s.transpose();
      const Vec gz = (masks[l] * (r.v.transpose() * cot).array()).matrix();
      if (grads) (*grads)[l].a.noalias() += scale * gz * h.transpose();
      cot = cot + r.u.transpose() * gz;
    }
  }
  return cot;
}

double leaky(double z, double slope) { return z >= 0.0 ? z : slope * z; }

}  // namespace

HomogeneousNet::HomogeneousNet(int input_dim, std::vector<NetLayer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)) {
  if (input_dim_ < 1) throw Error(ErrorCode::InvalidArgument, "network input dimension must be >= 1");
  int width = input_dim_;
  for (const auto& layer : layers_) {
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      if (d->w.cols() != width) throw Error(ErrorCode::DimensionMismatch, "dense layer width mismatch");
      width = static_cast<int>(d->w.rows());
    } else {
      const auto& r = std::get<ResidualLayer>(layer);
      if (r.u.cols() != width || r.v.rows() != width || r.v.cols() != r.u.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "residual layer shape mismatch");
      }
    }
  }
}

int HomogeneousNet::output_dim() const noexcept {
  int width = input_dim_;
  for (const auto& layer : layers_) {
    if (const auto* d = std::get_if<DenseLayer>(&layer)) width = static_cast<int>(d->w.rows());
  }
  return width;
}

double forward(const HomogeneousNet& net, const Vec& x) {
  if (x.size() != net.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "input dimension does not match the network");
  }
  Vec h = x;
  for (const auto& layer : net.layers()) {
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      h = (d->w * h).unaryExpr([s = d->slope](double z) { return leaky(z, s); });
    } else {
      const auto& r = std::get<ResidualLayer>(layer);
      h = h + r.v * (r.u * h).unaryExpr([s = r.slope](double z) { return leaky(z, s); });
    }
  }
  return h.norm();
}

Vec input_gradient(const HomogeneousNet& net, const Vec& x) {
  const Tape t = record(net, x);
  const double n = t.output.norm();
  if (n == 0.0) return Vec::Zero(x.size());
  return backward(net, t.masks, t.inputs, t.output / n, 1.0, nullptr);
}

double min_preactivation(const HomogeneousNet& net, const Vec& x) {
  return record(net, x).min_abs_pre;
}

double spectral_norm(const Eigen::MatrixXd& m, int iterations) {
  if (m.size() == 0) return 0.0;
  Vec v = Vec::LinSpaced(m.cols(), 1.0, 2.0);
  v.normalize();
  double sigma = 0.0;
  for (int i = 0; i < iterations; ++i) {
    Vec w = m.transpose() * (m * v);
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    v = w / n;
    sigma = std::sqrt(n);
  }
  return sigma;
}

ArchitectureReport validate_architecture(const HomogeneousNet& net) {
  ArchitectureReport rep;
  int width = net.input_dim();
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const std::string at = "layer " + std::to_string(l) + ": ";
    const auto& layer = net.layers()[l];
    double slope = 0.0;
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      slope = d->slope;
      if (d->w.rows() < width) rep.violations.push_back(at + "width decreases");
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(d->w);
      const auto& s = svd.singularValues();
      const double top = s.size() ? s[0] : 0.0;
      const bool full = s.size() == d->w.cols() && top > 0.0 && s[s.size() - 1] > 1e-10 * top;
      if (!full) rep.violations.push_back(at + "weight lacks full column rank");
      width = static_cast<int>(d->w.rows());
    } else {
      const auto& r = std::get<ResidualLayer>(layer);
      slope = r.slope;
      const double bound = spectral_norm(r.u) * spectral_norm(r.v);
      if (bound > 0.99) {
        rep.violations.push_back(at + "residual Lipschitz bound " + std::to_string(bound) +
                                 " exceeds 0.99");
      }
    }
    if (!(slope > 0.0 && slope < 1.0)) rep.violations.push_back(at + "slope outside (0, 1)");
  }
  return rep;
}

StarBody to_star_body(const HomogeneousNet& net, const GridPtr& grid, bool exact) {
  if (grid->dim() != net.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "grid and network dimensions differ");
  }
  for (std::size_t i = 0; i < grid->size(); ++i) {
    if (!(forward(net, grid->direction(i)) > 1e-12)) {
      throw Error(ErrorCode::PositivityViolated, "network vanishes on a sphere direction");
    }
  }
  return body_from_function(
      grid, [net](const Vec& u) { return 1.0 / forward(net, u); }, "net", exact);
}

HomogeneousNet random_net(int input_dim, const RandomNetOptions& opts, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = normal(rng);
    }
    return m;
  };
  std::vector<NetLayer> layers;
  int width = input_dim;
  for (int w : opts.widths) {
    layers.emplace_back(DenseLayer{gaussian(w, width) / std::sqrt(static_cast<double>(width)),
                                   opts.slope});
    width = w;
  }
  for (std::size_t k = 0; k < opts.residual_layers; ++k) {
    Eigen::MatrixXd u = gaussian(opts.residual_hidden, width);
    Eigen::MatrixXd v = gaussian(width, opts.residual_hidden);
    u *= std::sqrt(opts.residual_norm) / spectral_norm(u);
    v *= std::sqrt(opts.residual_norm) / spectral_norm(v);
    layers.emplace_back(ResidualLayer{u, v, opts.slope});
  }
  return HomogeneousNet(input_dim, std::move(layers));
}

// ---------------------------------------------------------------------------

double critic_loss(const HomogeneousNet& net, const std::vector<Vec>& samples_r,
                   const std::vector<Vec>& samples_n, CriticLoss loss) {
  double a = 0.0;
  for (const Vec& x : samples_r) a += forward(net, x);
  a /= static_cast<double>(samples_r.size());
  double b = 0.0;
  for (const Vec& x : samples_n) {
    const double r = forward(net, x);
    b += loss == CriticLoss::Adversarial ? r : 1.0 / r;
  }
  b /= static_cast<double>(samples_n.size());
  return loss == CriticLoss::Adversarial ? a - b : a + b;
}

namespace {

// Adds scale * dR/dtheta at x; returns R(x).
double add_value_gradient(const HomogeneousNet& net, const Vec& x, double scale_of_r_fn(double),
                          double scale, std::vector<LayerGrad>& grads) {
  const Tape t = record(net, x);
  const double r = t.output.norm();
  if (r == 0.0) return 0.0;
  backward(net, t.masks, t.inputs, t.output / r, scale * scale_of_r_fn(r), &grads);
  return r;
}

// Adds scale * d/dtheta (|grad_x R| - 1)^2 at x with the activation pattern
// held fixed; returns the penalty value.
double add_penalty_gradient(const HomogeneousNet& net, const Vec& x, double scale,
                            std::vector<LayerGrad>& grads) {
  const Tape t = record(net, x);
  const double an = t.output.norm();
  if (an == 0.0) return 1.0;
  const Vec ahat = t.output / an;
  const Vec g = backward(net, t.masks, t.inputs, ahat, 1.0, nullptr);
  const double q = g.norm();
  if (q == 0.0) return 1.0;
  const Vec v = 2.0 * (q - 1.0) * g / q;
  Vec b;
  const auto v_inputs = replay(net, t.masks, v, b);
  // Weight part through J^T: cotangent ahat with the chain driven by v.
  backward(net, t.masks, v_inputs, ahat, scale, &grads);
  // Normalization part: cotangent (I - ahat ahat^T) J v / |a| with the chain driven by x.
  const Vec c = (b - ahat * ahat.dot(b)) / an;
  backward(net, t.masks, t.inputs, c, scale, &grads);
  return (q - 1.0) * (q - 1.0);
}

double identity_scale(double) { return 1.0; }
double inverse_scale(double r) { return -1.0 / (r * r); }

struct AdamState {
  std::vector<LayerGrad> m;
  std::vector<LayerGrad> v;
  std::size_t t = 0;
};

void adam_update(Eigen::MatrixXd& w, const Eigen::MatrixXd& g, Eigen::MatrixXd& m,
                 Eigen::MatrixXd& v, std::size_t t, double lr) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  m = b1 * m + (1.0 - b1) * g;
  v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
  w.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

}  // namespace

TrainResult train(const HomogeneousNet& net, const std::vector<Vec>& samples_r,
                  const std::vector<Vec>& samples_n, CriticLoss loss, const TrainOptions& opts) {
  if (samples_r.empty() || samples_n.empty()) {
    throw Error(ErrorCode::InvalidArgument, "training needs samples from both distributions");
  }
  if (opts.batch == 0 || !(opts.lr > 0.0) || !(opts.gp_weight >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid training options");
  }
  TrainResult res{net, {}};
  HomogeneousNet& cur = res.net;
  Rng rng(opts.seed);
  std::uniform_int_distribution<std::size_t> pick_r(0, samples_r.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_n(0, samples_n.size() - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  AdamState adam{zero_grads(cur), zero_grads(cur), 0};
  const double inv_b = 1.0 / static_cast<double>(opts.batch);

  for (std::size_t step = 1; step <= opts.steps; ++step) {
    auto grads = zero_grads(cur);
    double mean_r = 0.0, mean_n = 0.0, penalty = 0.0;
    for (std::size_t k = 0; k < opts.batch; ++k) {
      const Vec& xr = samples_r[pick_r(rng)];
      const Vec& xn = samples_n[pick_n(rng)];
      mean_r += add_value_gradient(cur, xr, identity_scale, inv_b, grads) * inv_b;
      if (loss == CriticLoss::Adversarial) {
        mean_n += add_value_gradient(cur, xn, identity_scale, -inv_b, grads) * inv_b;
      } else {
        const double r = add_value_gradient(cur, xn, inverse_scale, inv_b, grads);
        mean_n += inv_b / r;
      }
      if (opts.gp_weight > 0.0) {
        const double e = unif(rng);
        const Vec xi = e * xr + (1.0 - e) * xn;
        penalty += add_penalty_gradient(cur, xi, opts.gp_weight * inv_b, grads) * inv_b;
      }
    }
    const double critic = loss == CriticLoss::Adversarial ? mean_r - mean_n : mean_r + mean_n;
    const double total = critic + opts.gp_weight * penalty;
    if (!std::isfinite(total)) throw Error(ErrorCode::DivergedTraining, "training loss is not finite");
    res.trace.push_back({step, total, critic, penalty});

    ++adam.t;
    for (std::size_t l = 0; l < cur.layers().size(); ++l) {
      auto& layer = cur.mutable_layers()[l];
      if (auto* d = std::get_if<DenseLayer>(&layer)) {
        adam_update(d->w, grads[l].a, adam.m[l].a, adam.v[l].a, adam.t, opts.lr);
      } else {
        auto& r = std::get<ResidualLayer>(layer);
        adam_update(r.u, grads[l].a, adam.m[l].a, adam.v[l].a, adam.t, opts.lr);
        adam_update(r.v, grads[l].b, adam.m[l].b, adam.v[l].b, adam.t, opts.lr);
        const double bound = spectral_norm(r.u, 50) * spectral_norm(r.v, 50);
        if (bound > opts.residual_bound) {
          const double s = std::sqrt(opts.residual_bound / bound);
          r.u *= s;
          r.v *= s;
        }
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------

namespace {

struct RegValue {
  double value;
  Vec grad;
};

RegValue regularizer_at(const DenoiseProblem& p, const Vec& x) {
  if (x.norm() == 0.0) return {0.0, Vec::Zero(x.size())};
  if (const auto* k = std::get_if<StarBody>(&p.regularizer)) {
    return {k->gauge(x), gauge_gradient(*k, x)};
  }
  const auto& net = std::get<HomogeneousNet>(p.regularizer);
  return {forward(net, x), input_gradient(net, x)};
}

double phi_value(Phi phi, double r) { return phi == Phi::Identity ? r : r * r; }
double phi_slope(Phi phi, double r) { return phi == Phi::Identity ? 1.0 : 2.0 * r; }

}  // namespace

DenoiseResult denoise(const DenoiseProblem& p) {
  if (p.steps < 1 || !(p.step_size > 0.0) || !(p.lambda >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "denoiser needs steps >= 1, step > 0, lambda >= 0");
  }
  auto objective = [&](const Vec& x) {
    return (x - p.y).squaredNorm() + p.lambda * phi_value(p.phi, regularizer_at(p, x).value);
  };
  DenoiseResult res{p.y, {}};
  double f = objective(res.x);
  res.objective.push_back(f);
  if (p.lambda == 0.0) return res;
  double step = p.step_size;
  for (std::size_t it = 0; it < p.steps; ++it) {
    const RegValue r = regularizer_at(p, res.x);
    const Vec g = 2.0 * (res.x - p.y) + p.lambda * phi_slope(p.phi, r.value) * r.grad;
    if (!g.allFinite()) throw Error(ErrorCode::DivergedDenoise, "denoiser gradient is not finite");
    if (g.norm() <= 1e-14 * std::max(1.0, res.x.norm())) break;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      const Vec trial = res.x - step * g;
      const double ft = objective(trial);
      if (!std::isfinite(ft)) throw Error(ErrorCode::DivergedDenoise, "objective is not finite");
      if (ft <= f - 1e-4 * step * g.squaredNorm()) {
        res.x = trial;
        f = ft;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    res.objective.push_back(f);
    step = std::min(p.step_size, step * 2.0);
  }
  return res;
}

double adversarial_lambda_preset(double base) { return 2.0 * base; }
double hellinger_lambda_preset(double base) { return 5.1 * base * base; }

// ---------------------------------------------------------------------------

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  j["data"] = data;
  return j;
}

Eigen::MatrixXd matrix_from(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw Error(ErrorCode::SizeMismatch, "matrix data does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

}  // namespace

std::string net_to_json(const HomogeneousNet& net) {
  nlohmann::json j;
  j["input_dim"] = net.input_dim();
  std::vector<int> widths{net.input_dim()};
  auto layers = nlohmann::json::array();
  for (const auto& layer : net.layers()) {
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      layers.push_back({{"type", "dense"}, {"slope", d->slope}, {"w", matrix_json(d->w)}});
      widths.push_back(static_cast<int>(d->w.rows()));
    } else {
      const auto& r = std::get<ResidualLayer>(layer);
      layers.push_back({{"type", "residual"},
                        {"slope", r.slope},
                        {"u", matrix_json(r.u)},
                        {"v", matrix_json(r.v)}});
    }
  }
  j["widths"] = widths;
  j["layers"] = layers;
  return j.dump(2);
}

HomogeneousNet net_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    std::vector<NetLayer> layers;
    for (const auto& l : j.at("layers")) {
      const auto type = l.at("type").get<std::string>();
      if (type == "dense") {
        layers.emplace_back(DenseLayer{matrix_from(l.at("w")), l.at("slope").get<double>()});
      } else if (type == "residual") {
        layers.emplace_back(ResidualLayer{matrix_from(l.at("u")), matrix_from(l.at("v")),
                                          l.at("slope").get<double>()});
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown layer type " + type);
      }
    }
    return HomogeneousNet(j.at("input_dim").get<int>(), std::move(layers));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad network JSON: ") + e.what());
  }
}

}  // namespace stargeo
