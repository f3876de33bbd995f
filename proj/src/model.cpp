#include "ota/model.hpp"

#include <cmath>
#include <string>

namespace ota {

namespace {

constexpr double kBoundarySlack = 1e-9;  // relative slack so boundary points validate

}  // namespace

void SystemConfig::validate() const {
  if (n < 1) throw ConfigError("system.n: need at least one user, got " + std::to_string(n));
  if (d < 1) throw ConfigError("system.d: need at least one coordinate, got " + std::to_string(d));
  if (s != d)
    throw ConfigError("system.s: the analog schemes use one channel slot per coordinate, so s must equal d (s=" +
                      std::to_string(s) + ", d=" + std::to_string(d) + ")");
  if (!(P > 0.0)) throw ConfigError("system.P: power budget must be positive");
  if (!(sigma0_sq >= 0.0)) throw ConfigError("system.sigma0_sq: channel noise variance must be nonnegative");
}

Family family_of(const ModelSpec& model) {
  if (std::holds_alternative<GaussianLocation>(model)) return Family::gaussian;
  if (std::holds_alternative<ProductBernoulli>(model)) return Family::bernoulli;
  return Family::sparse_bernoulli;
}

void validate_model(const ModelSpec& model, const SystemConfig& cfg) {
  if (const auto* g = std::get_if<GaussianLocation>(&model)) {
    if (!(g->sigma_sq > 0.0)) throw ConfigError("model.sigma_sq: observation variance must be positive");
    if (!(g->B > 0.0)) throw ConfigError("model.B: mean radius scale must be positive");
  } else if (const auto* s = std::get_if<SparseBernoulli>(&model)) {
    if (s->m < 1 || s->m > cfg.d)
      throw ConfigError("model.m: sparsity budget must satisfy 1 <= m <= d, got m=" + std::to_string(s->m) +
                        " with d=" + std::to_string(cfg.d));
  }
}

ThetaValidation validate_theta(const ModelSpec& model, const Vector& theta, int d) {
  if (theta.size() != d)
    return {false, "theta has dimension " + std::to_string(theta.size()) + ", expected " + std::to_string(d)};

  if (const auto* g = std::get_if<GaussianLocation>(&model)) {
    const double radius = g->B * std::sqrt(static_cast<double>(d));
    const double norm = theta.norm();
    if (norm > radius * (1.0 + kBoundarySlack))
      return {false, "norm constraint violated: ||theta||_2 = " + std::to_string(norm) + " > B*sqrt(d) = " +
                         std::to_string(radius)};
    return {true, {}};
  }

  for (int j = 0; j < d; ++j) {
    const double v = theta[j];
    if (v < -kBoundarySlack || v > 1.0 + kBoundarySlack)
      return {false, "range constraint violated: theta[" + std::to_string(j) + "] = " + std::to_string(v) +
                         " outside [0, 1]"};
  }

  if (const auto* s = std::get_if<SparseBernoulli>(&model)) {
    const double sum = theta.sum();
    const double budget = static_cast<double>(s->m);
    if (sum > budget * (1.0 + kBoundarySlack))
      return {false, "sparsity constraint violated: sum(theta) = " + std::to_string(sum) + " > m = " +
                         std::to_string(s->m)};
  }
  return {true, {}};
}

Matrix sample_users(const ModelSpec& model, const Vector& theta, int n, std::mt19937_64& rng) {
  if (n < 1) throw std::invalid_argument("sample_users: need at least one user");
  const int d = static_cast<int>(theta.size());
  const ThetaValidation check = validate_theta(model, theta, d);
  if (!check.ok) throw ConfigError("sample_users: " + check.error);

  Matrix samples(n, d);
  if (const auto* g = std::get_if<GaussianLocation>(&model)) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd = std::sqrt(g->sigma_sq);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) samples(i, j) = theta[j] + sd * normal(rng);
    return samples;
  }

  // Both Bernoulli families sample coordinates independently; the sparsity budget
  // constrains theta, not the realized bits.
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) samples(i, j) = uniform(rng) < theta[j] ? 1.0 : 0.0;
  return samples;
}

}  // namespace ota
