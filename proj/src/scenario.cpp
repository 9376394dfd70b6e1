#include "stargeo/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include <Eigen/QR>

#include "stargeo/adversarial.hpp"
#include "stargeo/divergence.hpp"
#include "stargeo/error.hpp"
#include "stargeo/export.hpp"
#include "stargeo/starnet.hpp"
#include "stargeo/verify.hpp"
#include "stargeo/weakconvex.hpp"

namespace stargeo {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ScenarioInvalid, what); }

void allow_keys(const json& j, const std::string& where, const std::vector<std::string>& keys) {
  if (!j.is_object()) invalid(where + " must be an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) invalid("unknown field '" + k + "' in " + where);
  }
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) invalid("missing field '" + std::string(key) + "' in " + where);
  return j.at(key);
}

double num(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_number()) invalid(where + "." + key + " must be a number");
  return v.get<double>();
}

double num_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? num(j, key, where) : fallback;
}

Eigen::MatrixXd matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) invalid(where + " must be a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) invalid(where + " is ragged");
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) invalid(where + " has a non-number entry");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

Vec vector_of(const json& j, const std::string& where) {
  if (!j.is_array()) invalid(where + " must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) invalid(where + " has a non-number entry");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

TaskKind task_from(const std::string& s) {
  static const std::pair<const char*, TaskKind> names[] = {
      {"AdversarialFigure", TaskKind::AdversarialFigure},
      {"HellingerFigure", TaskKind::HellingerFigure},
      {"AlphaSweep", TaskKind::AlphaSweep},
      {"ToyInverse", TaskKind::ToyInverse},
      {"WeakConvexSweep", TaskKind::WeakConvexSweep},
      {"VerifySuite", TaskKind::VerifySuite},
      {"ErmRun", TaskKind::ErmRun},
      {"TrainRun", TaskKind::TrainRun}};
  for (const auto& [n, k] : names) {
    if (s == n) return k;
  }
  invalid("unknown task '" + s + "'");
}

// Densities each task expects, and the parameter keys it accepts.
std::vector<std::string> required_densities(TaskKind t) {
  switch (t) {
    case TaskKind::WeakConvexSweep:
      return {"r"};
    case TaskKind::VerifySuite:
      return {};
    default:
      return {"r", "n"};
  }
}

std::vector<std::string> param_keys(TaskKind t) {
  switch (t) {
    case TaskKind::AdversarialFigure:
      return {"noise_weight", "reweight_margin", "alpha"};
    case TaskKind::HellingerFigure:
      return {"lambda_fractions", "alpha"};
    case TaskKind::AlphaSweep:
      return {"alphas", "lambda_fraction"};
    case TaskKind::ToyInverse:
      return {"noise_weight", "kernel_direction", "sigma2", "scale"};
    case TaskKind::WeakConvexSweep:
      return {"probes", "cap", "tol", "beta"};
    case TaskKind::VerifySuite:
      return {"quick"};
    case TaskKind::ErmRun:
      return {"samples", "steps", "erm_grid", "step_size", "gamma_floor"};
    case TaskKind::TrainRun:
      return {"samples", "steps", "loss", "lr", "batch", "gp_weight", "widths", "residual_layers"};
  }
  return {};
}

const char* task_name(TaskKind t) {
  switch (t) {
    case TaskKind::AdversarialFigure: return "AdversarialFigure";
    case TaskKind::HellingerFigure: return "HellingerFigure";
    case TaskKind::AlphaSweep: return "AlphaSweep";
    case TaskKind::ToyInverse: return "ToyInverse";
    case TaskKind::WeakConvexSweep: return "WeakConvexSweep";
    case TaskKind::VerifySuite: return "VerifySuite";
    case TaskKind::ErmRun: return "ErmRun";
    case TaskKind::TrainRun: return "TrainRun";
  }
  return "";
}

}  // namespace

// ---------------------------------------------------------------------------

Scenario parse_scenario(const json& j) {
  allow_keys(j, "scenario", {"schema", "name", "dim", "grid", "seed", "task", "densities", "params"});
  const json& schema = need(j, "schema", "scenario");
  if (!schema.is_number_integer() || schema.get<int>() != 1) invalid("schema must be 1");
  Scenario s;
  const json& name = need(j, "name", "scenario");
  if (!name.is_string() || name.get<std::string>().empty()) invalid("name must be a nonempty string");
  s.name = name.get<std::string>();
  if (s.name.find('/') != std::string::npos || s.name == "." || s.name == "..") {
    invalid("name must be a plain file name");
  }
  const json& dim = need(j, "dim", "scenario");
  if (!dim.is_number_integer() || (dim.get<int>() != 2 && dim.get<int>() != 3)) invalid("dim must be 2 or 3");
  s.dim = dim.get<int>();
  if (j.contains("grid")) {
    if (!j["grid"].is_number_integer() || j["grid"].get<long long>() < 8) invalid("grid must be an integer >= 8");
    s.grid = j["grid"].get<std::size_t>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) invalid("seed must be a nonnegative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  const json& task = need(j, "task", "scenario");
  if (!task.is_string()) invalid("task must be a string");
  s.task = task_from(task.get<std::string>());
  if (j.contains("densities")) s.densities = j["densities"];
  if (!s.densities.is_object()) invalid("densities must be an object");
  for (const auto& key : required_densities(s.task)) {
    if (!s.densities.contains(key)) invalid(std::string(task_name(s.task)) + " needs density '" + key + "'");
  }
  for (const auto& [k, v] : s.densities.items()) {
    if (k != "r" && k != "n") invalid("densities may only be named 'r' or 'n'");
  }
  if (j.contains("params")) s.params = j["params"];
  allow_keys(s.params, "params", param_keys(s.task));
  if (s.dim == 3 && (s.task == TaskKind::WeakConvexSweep || s.task == TaskKind::ErmRun ||
                     s.task == TaskKind::TrainRun || s.task == TaskKind::ToyInverse)) {
    invalid(std::string(task_name(s.task)) + " is planar");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) invalid("cannot read " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    invalid(std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(j);
}

StarBody body_from_spec(const json& spec, const GridPtr& grid) {
  const std::string where = "body";
  const std::string kind = need(spec, "kind", where).get<std::string>();
  if (kind == "lp_ball") {
    allow_keys(spec, where, {"kind", "p", "radius"});
    const json& p = need(spec, "p", where);
    const double pv = p.is_string() && p.get<std::string>() == "inf"
                          ? std::numeric_limits<double>::infinity()
                          : num(spec, "p", where);
    return lp_ball(grid, pv, num_or(spec, "radius", 1.0, where));
  }
  if (kind == "ball") {
    allow_keys(spec, where, {"kind", "radius", "alpha_scaled"});
    if (spec.contains("alpha_scaled")) {
      // Radius 1 / (alpha sqrt(d)).
      const double a = num(spec, "alpha_scaled", where);
      if (!(a > 0.0)) invalid("alpha_scaled must be positive");
      return unit_ball(grid, 1.0 / (a * std::sqrt(static_cast<double>(grid->dim()))));
    }
    return unit_ball(grid, num_or(spec, "radius", 1.0, where));
  }
  if (kind == "ellipsoid") {
    allow_keys(spec, where, {"kind", "matrix"});
    return ellipsoid(grid, matrix(need(spec, "matrix", where), "ellipsoid.matrix"));
  }
  invalid("unknown body kind '" + kind + "'");
}

DensityPtr density_from_spec(const json& spec, const GridPtr& grid,
                             const std::map<std::string, DensityPtr>& context) {
  const std::string where = "density";
  if (!spec.is_object()) invalid("density spec must be an object");
  const std::string kind = need(spec, "kind", where).get<std::string>();
  const int d = grid->dim();
  DensityPtr out;
  if (kind == "gauge_gibbs") {
    allow_keys(spec, where, {"kind", "body", "exponent", "rate"});
    out = std::make_shared<GaugeGibbsDensity>(body_from_spec(need(spec, "body", where), grid),
                                              num_or(spec, "exponent", 1.0, where),
                                              num_or(spec, "rate", 1.0, where));
  } else if (kind == "gaussian") {
    allow_keys(spec, where, {"kind", "mean", "covariance", "factor", "scale"});
    if (spec.contains("covariance") == spec.contains("factor")) {
      invalid("gaussian needs exactly one of covariance or factor");
    }
    Eigen::MatrixXd cov;
    if (spec.contains("covariance")) {
      cov = matrix(spec["covariance"], "gaussian.covariance");
    } else {
      const Eigen::MatrixXd u = matrix(spec["factor"], "gaussian.factor");
      cov = u * u.transpose();
    }
    cov *= num_or(spec, "scale", 1.0, where);
    const Vec mean = spec.contains("mean") ? vector_of(spec["mean"], "gaussian.mean") : Vec::Zero(cov.rows());
    out = std::make_shared<GaussianDensity>(mean, cov);
  } else if (kind == "mixture") {
    allow_keys(spec, where, {"kind", "weights", "components"});
    const json& comps = need(spec, "components", where);
    if (!comps.is_array()) invalid("mixture.components must be an array");
    std::vector<DensityPtr> parts;
    for (const auto& c : comps) parts.push_back(density_from_spec(c, grid, context));
    const Vec w = vector_of(need(spec, "weights", where), "mixture.weights");
    out = std::make_shared<MixtureDensity>(std::vector<double>(w.data(), w.data() + w.size()), parts);
  } else if (kind == "pushforward") {
    allow_keys(spec, where, {"kind", "forward", "base", "base_from", "noise_variance", "scale"});
    const Eigen::MatrixXd a = matrix(need(spec, "forward", where), "pushforward.forward");
    if (a.cols() != d) invalid("pushforward.forward must have d columns");
    DensityPtr base;
    if (spec.contains("base") == spec.contains("base_from")) invalid("pushforward needs exactly one of base or base_from");
    if (spec.contains("base")) {
      // Measurement-space density, dimension = rows of the forward map.
      base = density_from_spec(spec["base"], grid, context);
    } else {
      const auto it = context.find(spec["base_from"].get<std::string>());
      if (it == context.end()) invalid("pushforward.base_from names an unknown density");
      // Measurements y = A x of the referenced signal density.
      base = std::make_shared<PushforwardDensity>(a, it->second, 0.0);
    }
    const Eigen::MatrixXd pinv = a.completeOrthogonalDecomposition().pseudoInverse();
    out = std::make_shared<PushforwardDensity>(pinv, base, num_or(spec, "noise_variance", 0.0, where),
                                               num_or(spec, "scale", 1.0, where));
  } else if (kind == "uniform") {
    allow_keys(spec, where, {"kind", "body"});
    out = std::make_shared<UniformBodyDensity>(body_from_spec(need(spec, "body", where), grid));
  } else {
    invalid("unknown density kind '" + kind + "'");
  }
  if (out->dim() != d && kind != "pushforward") invalid("density dimension does not match dim");
  return out;
}

// ---------------------------------------------------------------------------

namespace {

json angle_of(const Vec& u) {
  return u.size() == 2 ? json(std::atan2(u[1], u[0])) : json(std::vector<double>(u.data(), u.data() + u.size()));
}

std::size_t argmax_node(const StarBody& k) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < k.grid().size(); ++i) {
    if (k.profile()[i] > k.profile()[best]) best = i;
  }
  return best;
}

json body_summary(const StarBody& k) {
  const std::size_t i = argmax_node(k);
  return {{"volume", volume(k)},
          {"rho_min", k.profile().min()},
          {"rho_max", k.profile().max()},
          {"argmax_direction", angle_of(k.grid().direction(i))}};
}

std::optional<double> gibbs_constant(const DensityPtr& d) {
  if (const auto* g = dynamic_cast<const GaugeGibbsDensity*>(d.get())) return g->moment_constant(1.0);
  return std::nullopt;
}

struct Built {
  GridPtr grid;
  DensityPtr r;
  DensityPtr n;
};

Built build_densities(const Scenario& s, std::size_t grid_size) {
  Built b;
  b.grid = SphereGrid::make(s.dim, grid_size);
  std::map<std::string, DensityPtr> ctx;
  if (s.densities.contains("r")) {
    b.r = density_from_spec(s.densities["r"], b.grid, ctx);
    ctx["r"] = b.r;
  }
  if (s.densities.contains("n")) b.n = density_from_spec(s.densities["n"], b.grid, ctx);
  for (const DensityPtr& d : {b.r, b.n}) {
    if (d && d->dim() != s.dim) invalid("density dimension does not match dim");
  }
  return b;
}

struct TaskOutput {
  std::vector<StarBody> bodies;
  json report = json::object();
  std::vector<std::pair<std::string, std::string>> extra_files;
};

TaskOutput adversarial_figure(const Scenario& s, const Built& b) {
  TaskOutput out;
  const auto& p = s.params;
  AdversarialProblem prob(b.r, b.n, b.grid, num_or(p, "noise_weight", 1.0, "params"));
  if (p.contains("reweight_margin")) {
    const auto w = reweight_to_containment(prob, num(p, "reweight_margin", "params"));
    out.report["reweighted"] = true;
    if (w) prob = prob.with_noise_weight(std::min(*w, prob.noise_weight()));
  } else {
    out.report["reweighted"] = false;
  }
  out.report["noise_weight"] = prob.noise_weight();
  if (p.contains("alpha")) out.report["alpha"] = num(p, "alpha", "params");
  if (auto c = gibbs_constant(b.r)) out.report["c_r"] = *c;
  if (auto c = gibbs_constant(b.n)) out.report["c_n"] = *c;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < b.grid->size(); ++i) margin = std::min(margin, prob.net_moment(i));
  out.report["containment_margin"] = margin;

  const StarBody lr = prob.profile_r().to_body("L_r");
  const StarBody ln = prob.profile_n().to_body("L_n");
  const StarBody lrn = build_Lrn(prob);
  const StarBody ks = optimal_adversarial(prob);
  out.report["L_r"] = body_summary(lr);
  out.report["L_n"] = body_summary(ln);
  out.report["L_rn"] = body_summary(lrn);
  out.report["K_star"] = body_summary(ks);
  out.report["loss_at_K_star"] = adversarial_loss(prob, ks);
  out.report["K_star_unit_ball_in_kernel"] = s.dim == 2 ? json(kernel_contains_ball(ks, 1.0)) : json(nullptr);
  out.bodies = {lr, ln, lrn, ks};
  return out;
}

TaskOutput hellinger_figure(const Scenario& s, const Built& b) {
  TaskOutput out;
  const HellingerProblem h(b.r, b.n, b.grid);
  const double ls = lambda_star(h);
  out.report["lambda_star"] = ls;
  if (s.params.contains("alpha")) out.report["alpha"] = num(s.params, "alpha", "params");
  std::vector<double> fracs{1.0};
  if (s.params.contains("lambda_fractions")) {
    const Vec f = vector_of(s.params["lambda_fractions"], "params.lambda_fractions");
    fracs.assign(f.data(), f.data() + f.size());
  }
  out.bodies = {h.body_r(), h.body_n_tilde()};
  json sols = json::array();
  for (double f : fracs) {
    const double lambda = f * ls;
    const DilatePair kp = hellinger_dilate_solutions(h, lambda);
    const std::string tag = "(" + format_double(f) + " lambda*)";
    json entry{{"lambda_fraction", f},
               {"lambda", lambda},
               {"K_plus", body_summary(kp.plus)},
               {"K_minus", body_summary(kp.minus)},
               {"loss_K_plus", hellinger_loss(h, kp.plus)},
               {"loss_K_minus", hellinger_loss(h, kp.minus)}};
    if (s.dim == 2) {
      // Is the widest direction of K_+ a coordinate axis (to grid resolution)?
      const Vec& u = kp.plus.grid().direction(argmax_node(kp.plus));
      const double off = std::min(std::abs(u[0]), std::abs(u[1]));
      entry["K_plus_argmax_on_axis"] = off <= std::sin(2.0 * std::numbers::pi / b.grid->size());
    }
    sols.push_back(entry);
    out.bodies.push_back(kp.plus.with_label("K+ " + tag));
    out.bodies.push_back(kp.minus.with_label("K- " + tag));
  }
  out.report["solutions"] = sols;
  return out;
}

TaskOutput alpha_sweep(const Scenario& s, const Built& b) {
  TaskOutput out;
  std::vector<double> alphas{0.25, 0.5, 0.75};
  if (s.params.contains("alphas")) {
    const Vec a = vector_of(s.params["alphas"], "params.alphas");
    alphas.assign(a.data(), a.data() + a.size());
  }
  const double frac = num_or(s.params, "lambda_fraction", 0.5, "params");
  json rows = json::array();
  for (double al : alphas) {
    if (!(al > 0.0 && al < 1.0)) invalid("alphas must lie in (0, 1)");
    const AlphaProblem a(b.r, b.n, b.grid, al);
    const double ls = alpha_lambda_star(a);
    const auto sols = alpha_fixed_point_solve(a, frac * ls);
    json row{{"alpha", al}, {"lambda_star", ls}, {"lambda", frac * ls}, {"solutions", sols.size()}};
    const std::string tag = " (alpha " + format_double(al) + ")";
    out.bodies.push_back(a.body_r().with_label("L_r^alpha" + tag));
    if (sols.size() == 2) {
      row["K_plus"] = body_summary(sols[0]);
      row["K_minus"] = body_summary(sols[1]);
      row["loss_K_plus"] = alpha_loss(a, sols[0]);
      row["loss_K_minus"] = alpha_loss(a, sols[1]);
      out.bodies.push_back(sols[0].with_label("K+" + tag));
      out.bodies.push_back(sols[1].with_label("K-" + tag));
    }
    rows.push_back(row);
  }
  out.report["alphas"] = rows;
  return out;
}

TaskOutput toy_inverse(const Scenario& s, const Built& b) {
  TaskOutput out;
  AdversarialProblem prob(b.r, b.n, b.grid, num_or(s.params, "noise_weight", 1.0, "params"));
  Vec axis(2);
  axis << 0.0, 1.0;
  if (s.params.contains("kernel_direction")) axis = vector_of(s.params["kernel_direction"], "params.kernel_direction");
  if (axis.size() != 2 || axis.norm() == 0.0) invalid("kernel_direction must be a nonzero planar vector");
  axis.normalize();
  for (const char* k : {"sigma2", "scale"}) {
    if (s.params.contains(k)) out.report[k] = num(s.params, k, "params");
  }
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < b.grid->size(); ++i) margin = std::min(margin, prob.net_moment(i));
  out.report["containment_margin"] = margin;
  const StarBody lrn = build_Lrn(prob);
  const Vec perp = Vec::Unit(2, 0) * axis[1] - Vec::Unit(2, 1) * axis[0];
  const double along = std::max(lrn.radius(axis), lrn.radius(-axis));
  const double across = std::max(lrn.radius(perp), lrn.radius(-perp));
  out.report["rho_along_kernel"] = along;
  out.report["rho_across_kernel"] = across;
  out.report["kernel_axis_exceeds_row_axis"] = along > across;
  // Global argmax within one grid spacing of the kernel axis.
  const Vec& top = b.grid->direction(argmax_node(lrn));
  const double spacing = 2.0 * std::numbers::pi / static_cast<double>(b.grid->size());
  out.report["argmax_on_kernel_axis"] = std::abs(top.dot(axis)) >= std::cos(spacing) - 1e-12;
  out.report["global_argmax_direction"] = angle_of(top);
  out.report["L_rn"] = body_summary(lrn);
  const StarBody ks = optimal_adversarial(prob);
  out.report["K_star"] = body_summary(ks);
  out.bodies = {prob.profile_r().to_body("L_r"), prob.profile_n().to_body("L_n"), lrn, ks};
  return out;
}

TaskOutput weak_convex_sweep(const Scenario& s, const Built& b) {
  TaskOutput out;
  const double beta = num_or(s.params, "beta", 1.0, "params");
  const StarBody k = moment_profile(b.r, beta, b.grid).to_body("K");
  std::vector<double> probes{10.0, 50.0, 100.0};
  if (s.params.contains("probes")) {
    const Vec v = vector_of(s.params["probes"], "params.probes");
    probes.assign(v.data(), v.data() + v.size());
  }
  const double cap = num_or(s.params, "cap", 100.0, "params");
  const double tol = num_or(s.params, "tol", 0.1, "params");
  const WeakConvexityReport rep = weak_convexity_report(k, probes, cap, tol);
  json pr = json::array();
  for (const auto& [rho, c] : rep.probes) pr.push_back({{"rho", rho}, {"is_convex", c}});
  out.report["probes"] = pr;
  out.report["rho_star"] = rep.rho_star ? json(*rep.rho_star) : json("not found below cap");
  out.report["cap"] = cap;
  out.report["tol"] = tol;
  out.report["grid"] = rep.grid_size;
  out.report["K"] = body_summary(k);
  out.bodies.push_back(k);
  for (double rho : probes) out.bodies.push_back(m2(k, rho).with_label("M2 rho=" + format_double(rho)));
  out.extra_files.emplace_back("weak_convexity.csv", weak_convexity_csv(rep));
  return out;
}

TaskOutput verify_suite(const Scenario& s, const Built& b) {
  TaskOutput out;
  const bool quick = s.params.contains("quick") ? s.params["quick"].get<bool>() : true;
  const auto results = run_verify_suite(quick, s.seed);
  json checks = json::array();
  bool all = true;
  for (const auto& r : results) {
    checks.push_back({{"suite", r.suite}, {"name", r.name}, {"pass", r.pass}, {"value", r.value}, {"tolerance", r.tolerance}});
    all = all && r.pass;
  }
  out.report["checks"] = checks;
  out.report["all_passed"] = all;
  out.bodies.push_back(unit_ball(b.grid).with_label("B"));
  return out;
}

TaskOutput erm_run(const Scenario& s, const Built& b) {
  TaskOutput out;
  const auto n = static_cast<std::size_t>(num_or(s.params, "samples", 100000, "params"));
  const auto grid = SphereGrid::make(2, static_cast<std::size_t>(num_or(s.params, "erm_grid", 64, "params")));
  ErmOptions opts;
  opts.steps = static_cast<std::size_t>(num_or(s.params, "steps", static_cast<double>(opts.steps), "params"));
  opts.step_size = num_or(s.params, "step_size", opts.step_size, "params");
  opts.gamma_floor = num_or(s.params, "gamma_floor", opts.gamma_floor, "params");
  Rng rng(s.seed);
  const auto xr = draw_samples(*b.r, n, rng);
  const auto xn = draw_samples(*b.n, n, rng);
  const ErmResult res = erm_solve(xr, xn, grid, opts);
  out.report["samples"] = n;
  out.report["steps_taken"] = res.trace.back().step;
  out.report["final_loss"] = res.trace.back().loss;
  try {
    const StarBody ks = optimal_adversarial(AdversarialProblem(b.r, b.n, grid));
    out.report["radial_metric_to_K_star"] = radial_metric(res.body, ks);
    out.bodies = {res.body, ks};
  } catch (const ContainmentError&) {
    out.report["radial_metric_to_K_star"] = nullptr;
    out.bodies = {res.body};
  }
  out.extra_files.emplace_back("erm_trace.csv", erm_trace_csv(res.trace));
  return out;
}

TaskOutput train_run(const Scenario& s, const Built& b) {
  TaskOutput out;
  const auto& p = s.params;
  const auto n = static_cast<std::size_t>(num_or(p, "samples", 20000, "params"));
  TrainOptions opts;
  opts.steps = static_cast<std::size_t>(num_or(p, "steps", static_cast<double>(opts.steps), "params"));
  opts.lr = num_or(p, "lr", opts.lr, "params");
  opts.batch = static_cast<std::size_t>(num_or(p, "batch", static_cast<double>(opts.batch), "params"));
  opts.gp_weight = num_or(p, "gp_weight", opts.gp_weight, "params");
  opts.seed = s.seed + 2;
  CriticLoss loss = CriticLoss::Adversarial;
  if (p.contains("loss")) {
    const auto l = p["loss"].get<std::string>();
    if (l == "hellinger") loss = CriticLoss::Hellinger;
    else if (l != "adversarial") invalid("params.loss must be adversarial or hellinger");
  }
  RandomNetOptions net_opts;
  if (p.contains("widths")) net_opts.widths = p["widths"].get<std::vector<int>>();
  net_opts.residual_layers = static_cast<std::size_t>(num_or(p, "residual_layers", 1, "params"));
  Rng rng(s.seed);
  const auto xr = draw_samples(*b.r, n, rng);
  const auto xn = draw_samples(*b.n, n, rng);
  Rng net_rng(s.seed + 1);
  const TrainResult res = train(random_net(2, net_opts, net_rng), xr, xn, loss, opts);
  const StarBody kb = to_star_body(res.net, b.grid);
  const StarBody kn = dilate(kb, std::pow(volume(kb), -0.5)).with_label("trained (unit volume)");
  out.report["final_loss"] = res.trace.back().loss;
  out.report["architecture_ok"] = validate_architecture(res.net).ok();
  out.bodies = {kn};
  try {
    const StarBody ks = optimal_adversarial(AdversarialProblem(b.r, b.n, b.grid));
    out.report["radial_metric_to_K_star"] = radial_metric(kn, ks);
    out.bodies.push_back(ks);
  } catch (const ContainmentError&) {
    out.report["radial_metric_to_K_star"] = nullptr;
  }
  out.extra_files.emplace_back("train_trace.csv", train_trace_csv(res.trace));
  out.extra_files.emplace_back("net.json", net_to_json(res.net));
  return out;
}

}  // namespace

ScenarioOutcome run_scenario(const Scenario& scenario, const std::string& out_root,
                             const RunOverrides& overrides) {
  Scenario s = scenario;
  if (overrides.seed) s.seed = *overrides.seed;
  if (overrides.grid) s.grid = *overrides.grid;
  std::size_t grid = s.grid ? s.grid : (s.dim == 2 ? kDefaultGrid2d : kDefaultGrid3d);
  if (s.task == TaskKind::WeakConvexSweep && !s.grid) grid = 4096;
  TaskOutput t;
  try {
    const Built b = build_densities(s, grid);
    switch (s.task) {
    case TaskKind::AdversarialFigure: t = adversarial_figure(s, b); break;
    case TaskKind::HellingerFigure: t = hellinger_figure(s, b); break;
    case TaskKind::AlphaSweep: t = alpha_sweep(s, b); break;
    case TaskKind::ToyInverse: t = toy_inverse(s, b); break;
    case TaskKind::WeakConvexSweep: t = weak_convex_sweep(s, b); break;
    case TaskKind::VerifySuite: t = verify_suite(s, b); break;
    case TaskKind::ErmRun: t = erm_run(s, b); break;
    case TaskKind::TrainRun: t = train_run(s, b); break;
    }
  } catch (const json::exception& e) {
    invalid(std::string("bad parameter: ") + e.what());
  }
  t.report["name"] = s.name;
  t.report["task"] = task_name(s.task);
  t.report["dim"] = s.dim;
  t.report["grid"] = grid;
  t.report["seed"] = s.seed;
  json labels = json::array();
  for (const auto& body : t.bodies) labels.push_back(body.label());
  t.report["bodies"] = labels;

  namespace fs = std::filesystem;
  const fs::path dir = fs::path(out_root) / s.name;
  fs::create_directories(dir);
  write_text_file((dir / "bodies.csv").string(), bodies_csv(t.bodies));
  write_text_file((dir / "figure.svg").string(), figure_svg(t.bodies, s.name));
  write_text_file((dir / "report.json").string(), t.report.dump(2) + "\n");
  for (const auto& [file, text] : t.extra_files) write_text_file((dir / file).string(), text);
  return {dir.string(), t.report};
}

ScenarioOutcome run_scenario_file(const std::string& path, const std::string& out_root,
                                  const RunOverrides& overrides) {
  return run_scenario(load_scenario(path), out_root, overrides);
}

}  // namespace stargeo
