#include "ota/privacy.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "ota/model.hpp"
#include "ota/scheme.hpp"

namespace ota {

namespace {

// log k! for k <= 64 by exact accumulation; lgamma beyond.
double log_factorial(int k) {
  static const std::array<double, 65> table = [] {
    std::array<double, 65> t{};
    t[0] = 0.0;
    for (int i = 1; i < 65; ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (k < 0) throw std::invalid_argument("log_factorial: negative argument");
  if (k < static_cast<int>(table.size())) return table[static_cast<std::size_t>(k)];
  return std::lgamma(static_cast<double>(k) + 1.0);
}

double log_binomial_pmf(int count, int k, double theta) {
  // caller guarantees theta in (0,1) and 0 <= k <= count
  return log_factorial(count) - log_factorial(k) - log_factorial(count - k) +
         static_cast<double>(k) * std::log(theta) +
         static_cast<double>(count - k) * std::log1p(-theta);
}

// n - 1 + sigma0^2 (B^2 + sigma^2) / (P sigma^2); zero only for a single user over a
// noiseless channel, where the leakage diverges.
std::optional<double> gaussian_denominator(const SystemConfig& cfg, const GaussianLocation& model) {
  cfg.validate();
  validate_model(model, cfg);
  const double denom = static_cast<double>(cfg.n) - 1.0 +
                       cfg.sigma0_sq * (model.B * model.B + model.sigma_sq) / (cfg.P * model.sigma_sq);
  if (denom <= 0.0) return std::nullopt;
  return denom;
}

}  // namespace

std::optional<double> gaussian_mi_bound(const SystemConfig& cfg, const GaussianLocation& model) {
  const auto denom = gaussian_denominator(cfg, model);
  if (!denom) return std::nullopt;
  return static_cast<double>(cfg.d) / 2.0 / *denom;
}

std::optional<double> gaussian_mi_exact(const SystemConfig& cfg, const GaussianLocation& model) {
  const auto denom = gaussian_denominator(cfg, model);
  if (!denom) return std::nullopt;
  return static_cast<double>(cfg.d) / 2.0 * std::log1p(1.0 / *denom);
}

double bernoulli_mi_exact(int n, double theta) {
  if (n < 1) throw std::invalid_argument("bernoulli_mi_exact: n must be at least 1");
  if (theta < 0.0 || theta > 1.0)
    throw std::invalid_argument("bernoulli_mi_exact: theta must lie in [0, 1]");
  if (theta == 0.0 || theta == 1.0) return 0.0;  // degenerate users reveal nothing

  // I(S; U_1) = sum_u p(u) sum_s p(s|u) (log p(s|u) - log p(s)) with S ~ Binomial(n, theta);
  // conditioned on one user's bit, the remaining count is Binomial(n-1, theta).
  double info = 0.0;
  for (int u = 0; u <= 1; ++u) {
    const double pu = u == 1 ? theta : 1.0 - theta;
    for (int rest = 0; rest <= n - 1; ++rest) {
      const int s = rest + u;
      const double log_cond = n == 1 ? 0.0 : log_binomial_pmf(n - 1, rest, theta);
      const double log_marg = log_binomial_pmf(n, s, theta);
      info += pu * std::exp(log_cond) * (log_cond - log_marg);
    }
  }
  return info;
}

double bernoulli_mi_bound(const SystemConfig& cfg) {
  cfg.validate();
  return static_cast<double>(cfg.d) / static_cast<double>(cfg.n);
}

double calibrate_sigma_pri(const SystemConfig& cfg, double epsilon) {
  return privacy_noise_variance(cfg, epsilon);
}

double robust_cmi_bound(const SystemConfig& cfg, double sigma_pri_sq) {
  cfg.validate();
  if (sigma_pri_sq < 0.0) throw std::invalid_argument("robust_cmi_bound: sigma_pri_sq must be nonnegative");
  if (sigma_pri_sq >= cfg.P)
    throw ConfigError("robust_cmi_bound: sigma_pri_sq >= P leaves no signal power");
  if (sigma_pri_sq == 0.0 && cfg.sigma0_sq == 0.0)
    throw ConfigError("robust_cmi_bound: no privacy or channel noise, leakage is unbounded");
  const double s = static_cast<double>(cfg.s);
  const double n = static_cast<double>(cfg.n);
  return s / 2.0 * std::log1p((cfg.P - sigma_pri_sq) / (n * sigma_pri_sq + cfg.sigma0_sq));
}

VlnvCheck vlnv_bound_check(const Vector& values, const Vector& probs) {
  if (values.size() != probs.size())
    throw std::invalid_argument("vlnv_bound_check: values and probs must have equal length");
  if (values.size() == 0) throw std::invalid_argument("vlnv_bound_check: empty distribution");
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs[i] < 0.0) throw std::invalid_argument("vlnv_bound_check: negative probability");
    if (values[i] < 0.0) throw std::invalid_argument("vlnv_bound_check: negative support value");
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("vlnv_bound_check: probabilities must sum to 1");

  double mu = 0.0, second = 0.0, lhs = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    mu += probs[i] * values[i];
    second += probs[i] * values[i] * values[i];
    if (values[i] > 0.0) lhs += probs[i] * values[i] * std::log(values[i]);  // 0 log 0 = 0
  }

  VlnvCheck check;
  check.lhs = lhs;
  if (mu == 0.0) {
    check.rhs = 0.0;       // point mass at zero: both sides vanish
    check.holds = true;
    return check;
  }
  const double omega_sq = second - mu * mu;
  check.rhs = mu * std::log((omega_sq + mu * mu) / mu);
  check.holds = check.lhs <= check.rhs + 1e-12 * std::max(1.0, std::abs(check.rhs));
  return check;
}

PrivacyReport privacy_report(const ModelSpec& model, const SystemConfig& cfg,
                             std::optional<double> epsilon) {
  cfg.validate();
  validate_model(model, cfg);

  PrivacyReport report;
  if (const auto* g = std::get_if<GaussianLocation>(&model)) {
    report.mi_bound = gaussian_mi_bound(cfg, *g);
    report.mi_exact = gaussian_mi_exact(cfg, *g);
  } else {
    report.mi_bound = bernoulli_mi_bound(cfg);
    // Exact leakage depends on theta; report the worst coordinate value on the grid
    // {0, 0.01, ..., 1} scaled to d coordinates.
    double worst = 0.0;
    for (int k = 0; k <= 100; ++k)
      worst = std::max(worst, bernoulli_mi_exact(cfg.n, static_cast<double>(k) / 100.0));
    report.mi_exact = static_cast<double>(cfg.d) * worst;
  }

  if (epsilon) {
    report.epsilon = *epsilon;
    const double sigma_pri_sq = calibrate_sigma_pri(cfg, *epsilon);
    report.sigma_pri_sq = sigma_pri_sq;
    report.cmi_bound = robust_cmi_bound(cfg, sigma_pri_sq);
  }
  return report;
}

}  // namespace ota
