#include "ota/risk.hpp"

#include <cmath>

#include "ota/model.hpp"

namespace ota {

namespace {

void check_theta_box(const Vector& theta, int d, const char* who) {
  if (theta.size() != d)
    throw std::invalid_argument(std::string(who) + ": theta has dimension " + std::to_string(theta.size()) +
                                ", expected " + std::to_string(d));
  for (int j = 0; j < d; ++j)
    if (theta[j] < -1e-9 || theta[j] > 1.0 + 1e-9)
      throw std::invalid_argument(std::string(who) + ": theta[" + std::to_string(j) + "] outside [0, 1]");
}

}  // namespace

QuadRiskCoeffs two_level_risk_coeffs_levels(double lo, double hi, double alpha, double beta, int n,
                                            double sigma0_sq, int d) {
  if (n < 1 || d < 1) throw std::invalid_argument("two_level_risk_coeffs: need n >= 1 and d >= 1");
  if (sigma0_sq < 0.0) throw std::invalid_argument("two_level_risk_coeffs: sigma0_sq must be nonnegative");
  if (!(hi > lo)) throw std::invalid_argument("two_level_risk_coeffs: need hi > lo");

  // Per coordinate: Y = n*lo + gap*S + Z with S ~ Binomial(n, theta), so
  //   E (alpha*Y + beta - theta)^2
  //     = alpha^2 (n theta(1-theta) gap^2 + sigma0^2) + ((alpha n gap - 1) theta + alpha n lo + beta)^2.
  const double nn = static_cast<double>(n);
  const double gap = hi - lo;
  const double slope = alpha * nn * gap - 1.0;   // coefficient of theta in the bias
  const double intercept = alpha * nn * lo + beta;
  const double var_scale = alpha * alpha * nn * gap * gap;  // variance term: var_scale * theta(1-theta)

  QuadRiskCoeffs coeffs;
  coeffs.theta_sq = slope * slope - var_scale;
  coeffs.theta_lin = var_scale + 2.0 * slope * intercept;
  coeffs.constant = static_cast<double>(d) * (alpha * alpha * sigma0_sq + intercept * intercept);
  return coeffs;
}

QuadRiskCoeffs two_level_risk_coeffs(double C, double alpha, double beta, int n, double sigma0_sq,
                                     int d) {
  if (!(C > 0.0)) throw std::invalid_argument("two_level_risk_coeffs: C must be positive");
  return two_level_risk_coeffs_levels(-C, C, alpha, beta, n, sigma0_sq, d);
}

double exact_risk_two_level(double C, double alpha, double beta, const Vector& theta,
                            const SystemConfig& cfg) {
  cfg.validate();
  check_theta_box(theta, cfg.d, "exact_risk_two_level");
  const QuadRiskCoeffs coeffs = two_level_risk_coeffs(C, alpha, beta, cfg.n, cfg.sigma0_sq, cfg.d);
  return coeffs.at_sums(theta.squaredNorm(), theta.sum());
}

double exact_risk_gaussian(const SystemConfig& cfg, const GaussianLocation& model, const Vector& theta) {
  cfg.validate();
  validate_model(model, cfg);
  const ThetaValidation check = validate_theta(model, theta, cfg.d);
  if (!check.ok) throw ConfigError("exact_risk_gaussian: " + check.error);

  // The optimal gaussian scheme is unbiased with theta-independent error variance.
  const double n = static_cast<double>(cfg.n);
  const double d = static_cast<double>(cfg.d);
  return d * model.sigma_sq / n +
         d * (model.B * model.B + model.sigma_sq) * cfg.sigma0_sq / (n * n * cfg.P);
}

WorstCase worst_case_quad(const QuadRiskCoeffs& coeffs, int d, double t_max) {
  if (d < 1) throw std::invalid_argument("worst_case_quad: d must be at least 1");
  if (t_max < 0.0 || t_max > static_cast<double>(d))
    throw std::invalid_argument("worst_case_quad: need 0 <= t_max <= d");

  WorstCase result;
  if (coeffs.theta_sq >= 0.0) {
    // At fixed sum t the squared norm is maximized at a vertex with at most one
    // fractional coordinate, so the envelope is h(t) = theta_sq * (floor(t) + frac(t)^2)
    // + theta_lin * t + constant: continuous, convex on each unit segment, and linear
    // across integer sums. Its max over [0, t_max] is at t = 0, floor(t_max), or t_max.
    const int whole = static_cast<int>(std::floor(t_max));
    Vector best = Vector::Zero(d);
    double best_value = coeffs.constant;
    for (const bool include_fraction : {false, true}) {
      Vector theta = Vector::Zero(d);
      for (int j = 0; j < whole; ++j) theta[j] = 1.0;
      if (include_fraction && whole < d) theta[whole] = t_max - static_cast<double>(whole);
      const double value = coeffs.at_sums(theta.squaredNorm(), theta.sum());
      if (value > best_value) {
        best_value = value;
        best = theta;
      }
    }
    result.theta = best;
  } else {
    // Lower bound (sum theta)^2 / d <= sum theta^2 is tight on all-equal vectors; the
    // resulting concave 1-D quadratic peaks at t* = -theta_lin * d / (2 theta_sq).
    double t = -coeffs.theta_lin * static_cast<double>(d) / (2.0 * coeffs.theta_sq);
    t = std::clamp(t, 0.0, t_max);
    result.theta = Vector::Constant(d, t / static_cast<double>(d));
  }
  result.sup_risk = coeffs.at_sums(result.theta.squaredNorm(), result.theta.sum());
  return result;
}

WorstCase worst_case_theta(double C, double alpha, double beta, const SystemConfig& cfg, double t_max) {
  cfg.validate();
  return worst_case_quad(two_level_risk_coeffs(C, alpha, beta, cfg.n, cfg.sigma0_sq, cfg.d), cfg.d, t_max);
}

double gaussian_minimax_risk_for(const SystemConfig& cfg, const GaussianLocation& model, double power,
                                 double noise_var) {
  cfg.validate();
  validate_model(model, cfg);
  if (!(power > 0.0)) throw std::invalid_argument("gaussian_minimax_risk: power must be positive");
  const double n = static_cast<double>(cfg.n);
  const double d = static_cast<double>(cfg.d);
  return d * model.sigma_sq / n *
         (1.0 + noise_var / (n * power) * (1.0 + model.B * model.B / model.sigma_sq));
}

double bernoulli_minimax_risk_for(const SystemConfig& cfg, double power, double noise_var) {
  cfg.validate();
  if (!(power > 0.0)) throw std::invalid_argument("bernoulli_minimax_risk: power must be positive");
  const double n = static_cast<double>(cfg.n);
  const double d = static_cast<double>(cfg.d);
  const double sqrt_n = std::sqrt(n);
  const TwoLevelOptimum opt = two_level_optimum(std::sqrt(power), cfg.d, cfg.d, cfg.n, noise_var);
  if (opt.branch == 1)
    return d / (4.0 * (sqrt_n + 1.0) * (sqrt_n + 1.0)) * (1.0 + noise_var / (n * power));
  return d / 4.0 / (1.0 + n * (n * power / noise_var));
}

double sparse_minimax_risk_for(const SystemConfig& cfg, int m, double power, double noise_var) {
  cfg.validate();
  validate_model(SparseBernoulli{m}, cfg);
  if (2 * m >= cfg.d) return bernoulli_minimax_risk_for(cfg, power, noise_var);

  const double n = static_cast<double>(cfg.n);
  const double d = static_cast<double>(cfg.d);
  const double md = static_cast<double>(m);
  const double rest = d - md;
  const double sqrt_n = std::sqrt(n);
  const double g = std::sqrt(rest / md) + std::sqrt(md / rest);
  const double C = std::sqrt(power) * g / 2.0;
  const TwoLevelOptimum opt = two_level_optimum(C, md, cfg.d, cfg.n, noise_var);

  if (opt.branch == 1)
    return md / ((sqrt_n + 1.0) * (sqrt_n + 1.0)) *
           (rest / d + d * noise_var / (md * n * power * g * g));
  return md / (d / rest + n * (md * n * power * g * g) / (d * noise_var));
}

double gaussian_minimax_risk(const SystemConfig& cfg, const GaussianLocation& model) {
  return gaussian_minimax_risk_for(cfg, model, cfg.P, cfg.sigma0_sq);
}

double bernoulli_minimax_risk(const SystemConfig& cfg) {
  return bernoulli_minimax_risk_for(cfg, cfg.P, cfg.sigma0_sq);
}

double sparse_minimax_risk(const SystemConfig& cfg, int m) {
  return sparse_minimax_risk_for(cfg, m, cfg.P, cfg.sigma0_sq);
}

double minimax_risk(const ModelSpec& model, const SystemConfig& cfg) {
  if (const auto* g = std::get_if<GaussianLocation>(&model)) return gaussian_minimax_risk(cfg, *g);
  if (std::holds_alternative<ProductBernoulli>(model)) return bernoulli_minimax_risk(cfg);
  return sparse_minimax_risk(cfg, std::get<SparseBernoulli>(model).m);
}

int risk_branch(const ModelSpec& model, const SystemConfig& cfg) {
  return make_scheme(model, cfg).branch;
}

double robust_risk(const ModelSpec& model, const SystemConfig& cfg, double epsilon) {
  const double sigma_pri_sq = privacy_noise_variance(cfg, epsilon);
  const double power = cfg.P - sigma_pri_sq;
  const double noise = cfg.sigma0_sq + static_cast<double>(cfg.n) * sigma_pri_sq;
  if (const auto* g = std::get_if<GaussianLocation>(&model))
    return gaussian_minimax_risk_for(cfg, *g, power, noise);
  if (std::holds_alternative<ProductBernoulli>(model))
    return bernoulli_minimax_risk_for(cfg, power, noise);
  return sparse_minimax_risk_for(cfg, std::get<SparseBernoulli>(model).m, power, noise);
}

bool RiskReport::mc_consistent(double z) const {
  if (!mc_mean || !mc_std_error) return true;
  return std::abs(*mc_mean - closed_form) <= z * *mc_std_error;
}

RiskReport risk_report(const ModelSpec& model, const SystemConfig& cfg, std::optional<double> epsilon,
                       long long trials) {
  cfg.validate();
  validate_model(model, cfg);
  const Scheme scheme = epsilon ? robustify(model, cfg, *epsilon) : make_scheme(model, cfg);

  RiskReport report;
  report.branch = scheme.branch;
  report.closed_form = epsilon ? robust_risk(model, cfg, *epsilon) : minimax_risk(model, cfg);

  if (std::holds_alternative<GaussianLocation>(model)) {
    // Risk is flat over the parameter set; pick the power-boundary point.
    report.worst_theta = Vector::Constant(cfg.d, std::get<GaussianLocation>(model).B);
  } else {
    const auto& levels = std::get<TwoLevel>(scheme.encoder.map);
    const CenteredEquivalent centered =
        equivalent_centered(levels.level_lo, levels.level_hi, scheme.estimator, cfg.n);
    // Exact risk of the physical pipeline sees channel plus aggregated privacy noise.
    const double total_noise =
        cfg.sigma0_sq + static_cast<double>(cfg.n) * scheme.encoder.local_noise_var;
    const QuadRiskCoeffs coeffs =
        two_level_risk_coeffs(centered.C, centered.estimator.alpha, centered.estimator.beta, cfg.n,
                              total_noise, cfg.d);
    report.worst_theta = worst_case_quad(coeffs, cfg.d, static_cast<double>(scheme.m)).theta;
  }

  if (trials > 0) {
    const McEstimate mc = mc_risk(model, report.worst_theta, scheme, cfg, trials, cfg.master_seed);
    report.mc_mean = mc.mean;
    report.mc_std_error = mc.std_error;
  }
  return report;
}

}  // namespace ota
