#pragma once

#include <optional>

#include "ota/types.hpp"

namespace ota {

// Per-user mutual information values are in nats. A disengaged optional means the
// quantity diverges (only possible with a single user and zero channel noise); callers
// get an explicit signal instead of infinity arithmetic.

// Upper bound (d/2) / (n - 1 + sigma0^2 (B^2 + sigma^2) / (P sigma^2)).
std::optional<double> gaussian_mi_bound(const SystemConfig& cfg, const GaussianLocation& model);

// Exact value (d/2) log(1 + 1 / (n - 1 + sigma0^2 (B^2 + sigma^2) / (P sigma^2))).
std::optional<double> gaussian_mi_exact(const SystemConfig& cfg, const GaussianLocation& model);

// Exact per-coordinate leakage I(S; U_1) where S ~ Binomial(n, theta) is the superposed
// (noise-free) symbol count and U_1 one user's bit. Computed by direct outcome
// enumeration with log-space binomial weights.
double bernoulli_mi_exact(int n, double theta);

// Family-level bound d / n, valid for every theta (sparse included).
double bernoulli_mi_bound(const SystemConfig& cfg);

// Privacy noise variance meeting leakage budget epsilon (clamped at zero).
double calibrate_sigma_pri(const SystemConfig& cfg, double epsilon);

// Conditional leakage bound of the robustified scheme,
// (s/2) log(1 + (P - sigma_pri^2) / (n sigma_pri^2 + sigma0^2)).
double robust_cmi_bound(const SystemConfig& cfg, double sigma_pri_sq);

// Check of the moment inequality E[V log V] <= mu * log((omega^2 + mu^2) / mu) for a
// discrete nonnegative variable with mean mu and variance omega^2 (0 log 0 = 0).
struct VlnvCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

VlnvCheck vlnv_bound_check(const Vector& values, const Vector& probs);

struct PrivacyReport {
  std::optional<double> mi_bound;  // absent when the bound itself diverges
  std::optional<double> mi_exact;  // absent when the exact value diverges
  std::optional<double> epsilon;
  std::optional<double> sigma_pri_sq;
  std::optional<double> cmi_bound;
};

// mi_exact for the Bernoulli families is d times the worst coordinate leakage over the
// theta grid {0, 0.01, ..., 1}.
PrivacyReport privacy_report(const ModelSpec& model, const SystemConfig& cfg,
                             std::optional<double> epsilon);

}  // namespace ota
