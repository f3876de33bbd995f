#include "ota/scheme.hpp"

#include <cmath>
#include <string>

#include "ota/model.hpp"

namespace ota {

namespace {

double require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
  return v;
}

}  // namespace

TwoLevelOptimum two_level_optimum(double C, double m, int d, int n, double sigma0_sq) {
  require_positive(C, "two_level_optimum: C");
  if (n < 1) throw std::invalid_argument("two_level_optimum: n must be at least 1");
  if (d < 1) throw std::invalid_argument("two_level_optimum: d must be at least 1");
  if (!(m > 0.0) || m > static_cast<double>(d))
    throw std::invalid_argument("two_level_optimum: need 0 < m <= d");
  if (sigma0_sq < 0.0) throw std::invalid_argument("two_level_optimum: sigma0_sq must be nonnegative");

  const double nn = static_cast<double>(n);
  const double sqrt_n = std::sqrt(nn);
  const double ratio = m / static_cast<double>(d);

  // Candidate 1: boundary of the region where the theta^2 coefficient of the exact risk
  // is nonnegative. Candidate 2: unconstrained minimizer of the worst-case risk in that
  // region. The optimum is the smaller of the two.
  const double alpha1 = 1.0 / (2.0 * sqrt_n * C * (sqrt_n + 1.0));
  double alpha2;
  if (ratio >= 0.5) {
    alpha2 = nn * C / (2.0 * (sigma0_sq + nn * nn * C * C));
  } else {
    const double w = m * (static_cast<double>(d) - m);
    alpha2 = 2.0 * w * nn * C /
             (static_cast<double>(d) * static_cast<double>(d) * sigma0_sq + 4.0 * w * nn * nn * C * C);
  }

  TwoLevelOptimum opt;
  opt.branch = alpha1 <= alpha2 ? 1 : 2;
  opt.alpha = std::min(alpha1, alpha2);
  opt.beta_centered = ratio >= 0.5 ? 0.5 : (1.0 - 2.0 * ratio) * nn * C * opt.alpha + ratio;
  return opt;
}

double privacy_noise_variance(const SystemConfig& cfg, double epsilon) {
  cfg.validate();
  if (!(epsilon > 0.0))
    throw ConfigError("scheme.epsilon: the leakage budget must be positive");
  const double s = static_cast<double>(cfg.s);
  const double n = static_cast<double>(cfg.n);
  return std::max((s * cfg.P - 2.0 * epsilon * cfg.sigma0_sq) / (2.0 * epsilon * n + s), 0.0);
}

Scheme gaussian_scheme_for(const SystemConfig& cfg, const GaussianLocation& model, double power,
                           double noise_var) {
  cfg.validate();
  validate_model(model, cfg);
  require_positive(power, "gaussian_scheme: power");
  (void)noise_var;  // the gaussian coefficients do not depend on the channel noise

  const double second_moment = model.B * model.B + model.sigma_sq;
  Scheme scheme;
  scheme.family = Family::gaussian;
  scheme.encoder.map = LinearGain{std::sqrt(power / second_moment)};
  scheme.estimator = {std::sqrt(second_moment / power) / static_cast<double>(cfg.n), 0.0};
  scheme.config = cfg;
  scheme.m = cfg.d;
  scheme.branch = 0;
  return scheme;
}

Scheme bernoulli_scheme_for(const SystemConfig& cfg, double power, double noise_var) {
  cfg.validate();
  require_positive(power, "bernoulli_scheme: power");
  const double C = std::sqrt(power);
  const TwoLevelOptimum opt = two_level_optimum(C, cfg.d, cfg.d, cfg.n, noise_var);

  Scheme scheme;
  scheme.family = Family::bernoulli;
  scheme.encoder.map = TwoLevel{-C, C};
  scheme.estimator = {opt.alpha, opt.beta_centered};  // symmetric levels: no offset to fold
  scheme.config = cfg;
  scheme.m = cfg.d;
  scheme.branch = opt.branch;
  return scheme;
}

Scheme sparse_scheme_for(const SystemConfig& cfg, int m, double power, double noise_var) {
  cfg.validate();
  validate_model(SparseBernoulli{m}, cfg);
  require_positive(power, "sparse_scheme: power");

  if (2 * m >= cfg.d) {
    // Dense enough that the symmetric scheme is already optimal.
    Scheme scheme = bernoulli_scheme_for(cfg, power, noise_var);
    scheme.family = Family::sparse_bernoulli;
    scheme.m = m;
    return scheme;
  }

  const double md = static_cast<double>(m);
  const double rest = static_cast<double>(cfg.d - m);
  // Asymmetric levels: rare ones get the large level, so the power budget binds at
  // sum(theta) = m rather than pointwise.
  const double level_lo = -std::sqrt(md / rest * power);
  const double level_hi = std::sqrt(rest / md * power);
  const double C = (level_hi - level_lo) / 2.0;
  const TwoLevelOptimum opt = two_level_optimum(C, md, cfg.d, cfg.n, noise_var);
  const double offset = static_cast<double>(cfg.n) * (level_lo + level_hi) / 2.0;

  Scheme scheme;
  scheme.family = Family::sparse_bernoulli;
  scheme.encoder.map = TwoLevel{level_lo, level_hi};
  scheme.estimator = {opt.alpha, opt.beta_centered - opt.alpha * offset};
  scheme.config = cfg;
  scheme.m = m;
  scheme.branch = opt.branch;
  return scheme;
}

Scheme gaussian_scheme(const SystemConfig& cfg, const GaussianLocation& model) {
  return gaussian_scheme_for(cfg, model, cfg.P, cfg.sigma0_sq);
}

Scheme bernoulli_scheme(const SystemConfig& cfg) {
  return bernoulli_scheme_for(cfg, cfg.P, cfg.sigma0_sq);
}

Scheme sparse_scheme(const SystemConfig& cfg, int m) {
  return sparse_scheme_for(cfg, m, cfg.P, cfg.sigma0_sq);
}

Scheme make_scheme(const ModelSpec& model, const SystemConfig& cfg) {
  if (const auto* g = std::get_if<GaussianLocation>(&model)) return gaussian_scheme(cfg, *g);
  if (std::holds_alternative<ProductBernoulli>(model)) return bernoulli_scheme(cfg);
  return sparse_scheme(cfg, std::get<SparseBernoulli>(model).m);
}

Scheme robustify(const ModelSpec& model, const SystemConfig& cfg, double epsilon) {
  const double sigma_pri_sq = privacy_noise_variance(cfg, epsilon);
  const double power = cfg.P - sigma_pri_sq;
  const double noise = cfg.sigma0_sq + static_cast<double>(cfg.n) * sigma_pri_sq;

  Scheme scheme;
  if (const auto* g = std::get_if<GaussianLocation>(&model)) {
    scheme = gaussian_scheme_for(cfg, *g, power, noise);
  } else if (std::holds_alternative<ProductBernoulli>(model)) {
    scheme = bernoulli_scheme_for(cfg, power, noise);
  } else {
    scheme = sparse_scheme_for(cfg, std::get<SparseBernoulli>(model).m, power, noise);
  }
  scheme.encoder.local_noise_var = sigma_pri_sq;
  return scheme;
}

Vector encode(const Scheme& scheme, const Vector& u, std::mt19937_64& rng) {
  if (u.size() != scheme.config.d)
    throw std::invalid_argument("encode: sample has dimension " + std::to_string(u.size()) + ", expected " +
                                std::to_string(scheme.config.d));

  Vector x(u.size());
  if (const auto* lin = std::get_if<LinearGain>(&scheme.encoder.map)) {
    x = lin->gain * u;
  } else {
    const auto& lv = std::get<TwoLevel>(scheme.encoder.map);
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      if (u[j] == 0.0)
        x[j] = lv.level_lo;
      else if (u[j] == 1.0)
        x[j] = lv.level_hi;
      else
        throw std::invalid_argument("encode: two-level map needs binary samples, got " + std::to_string(u[j]));
    }
  }

  if (scheme.encoder.local_noise_var > 0.0) {
    std::normal_distribution<double> normal(0.0, std::sqrt(scheme.encoder.local_noise_var));
    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] += normal(rng);
  }
  return x;
}

Vector estimate(const Scheme& scheme, const Vector& y) {
  if (y.size() != scheme.config.s)
    throw std::invalid_argument("estimate: received vector has dimension " + std::to_string(y.size()) +
                                ", expected " + std::to_string(scheme.config.s));
  return (scheme.estimator.alpha * y).array() + scheme.estimator.beta;
}

double power_audit(const Scheme& scheme, const ModelSpec& model, const Vector& theta) {
  const int d = scheme.config.d;
  const ThetaValidation check = validate_theta(model, theta, d);
  if (!check.ok) throw ConfigError("power_audit: " + check.error);

  if (const auto* lin = std::get_if<LinearGain>(&scheme.encoder.map)) {
    const auto* g = std::get_if<GaussianLocation>(&model);
    if (g == nullptr)
      throw std::invalid_argument("power_audit: linear-gain encoder applies to the gaussian model only");
    const double mean_second_moment = theta.squaredNorm() / static_cast<double>(d) + g->sigma_sq;
    return lin->gain * lin->gain * mean_second_moment + scheme.encoder.local_noise_var;
  }

  if (std::holds_alternative<GaussianLocation>(model))
    throw std::invalid_argument("power_audit: two-level encoder applies to the binary models only");
  const auto& lv = std::get<TwoLevel>(scheme.encoder.map);
  const double lo_sq = lv.level_lo * lv.level_lo;
  const double hi_sq = lv.level_hi * lv.level_hi;
  double total = 0.0;
  for (int j = 0; j < d; ++j) total += theta[j] * hi_sq + (1.0 - theta[j]) * lo_sq;
  return total / static_cast<double>(d) + scheme.encoder.local_noise_var;
}

CenteredEquivalent equivalent_centered(double level_lo, double level_hi, const AffineEstimator& est,
                                       int n) {
  if (!(level_hi > level_lo))
    throw std::invalid_argument("equivalent_centered: need level_hi > level_lo");
  if (n < 1) throw std::invalid_argument("equivalent_centered: n must be at least 1");
  const double offset = static_cast<double>(n) * (level_lo + level_hi) / 2.0;
  return {(level_hi - level_lo) / 2.0, {est.alpha, est.beta + est.alpha * offset}};
}

}  // namespace ota
