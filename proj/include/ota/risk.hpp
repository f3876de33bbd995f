#pragma once

#include <optional>

#include "ota/channel.hpp"
#include "ota/scheme.hpp"
#include "ota/types.hpp"

namespace ota {

// Total MSE of an affine decoder on a two-level scheme as a quadratic in theta:
//   risk(theta) = theta_sq * sum_j theta_j^2 + theta_lin * sum_j theta_j + constant.
// The coefficients follow from the exact bias/variance decomposition of the shifted
// binomial channel output; `constant` already includes the dimension factor.
struct QuadRiskCoeffs {
  double theta_sq = 0.0;
  double theta_lin = 0.0;
  double constant = 0.0;

  double at_sums(double sum_sq, double sum) const {
    return theta_sq * sum_sq + theta_lin * sum + constant;
  }
};

QuadRiskCoeffs two_level_risk_coeffs(double C, double alpha, double beta, int n,
                                     double sigma0_sq, int d);

// Same decomposition for arbitrary levels (lo, hi); reduces to the centered form when
// lo = -hi. Kept as an independent algebraic route for the shift-equivalence check.
QuadRiskCoeffs two_level_risk_coeffs_levels(double lo, double hi, double alpha, double beta,
                                            int n, double sigma0_sq, int d);

// Exact risk of the centered two-level scheme at a specific theta.
double exact_risk_two_level(double C, double alpha, double beta, const Vector& theta,
                            const SystemConfig& cfg);

// Exact risk of the optimal gaussian scheme (independent of theta).
double exact_risk_gaussian(const SystemConfig& cfg, const GaussianLocation& model,
                           const Vector& theta);

struct WorstCase {
  Vector theta;
  double sup_risk = 0.0;
};

// Maximizes the quadratic risk over {theta in [0,1]^d : sum_j theta_j <= t_max}.
// Nonnegative theta_sq coefficient: at a fixed coordinate sum t the squared norm is
// maximized by a vertex with at most one fractional coordinate, and the resulting
// envelope in t is convex on unit segments and linear across integers, so the max sits
// at sum 0, floor(t_max), or t_max. Negative coefficient: all-equal theta makes the
// lower quadratic bound tight and the concave 1-D problem is solved at its (clipped)
// vertex.
WorstCase worst_case_quad(const QuadRiskCoeffs& coeffs, int d, double t_max);

WorstCase worst_case_theta(double C, double alpha, double beta, const SystemConfig& cfg,
                           double t_max);

// Closed-form minimax risks.
double gaussian_minimax_risk(const SystemConfig& cfg, const GaussianLocation& model);
double bernoulli_minimax_risk(const SystemConfig& cfg);
double sparse_minimax_risk(const SystemConfig& cfg, int m);
double minimax_risk(const ModelSpec& model, const SystemConfig& cfg);

// Closed-form branch index (1 or 2) for the two-level families; 0 for gaussian.
int risk_branch(const ModelSpec& model, const SystemConfig& cfg);

// Minimax risk of the epsilon-calibrated robust scheme: the base closed forms evaluated
// at power P - sigma_pri^2 and channel noise sigma0^2 + n*sigma_pri^2 (the base risk
// when the calibration clamps sigma_pri^2 to zero).
double robust_risk(const ModelSpec& model, const SystemConfig& cfg, double epsilon);

// Variants with explicit (power, noise) for reuse by the robust path.
double gaussian_minimax_risk_for(const SystemConfig& cfg, const GaussianLocation& model,
                                 double power, double noise_var);
double bernoulli_minimax_risk_for(const SystemConfig& cfg, double power, double noise_var);
double sparse_minimax_risk_for(const SystemConfig& cfg, int m, double power, double noise_var);

struct RiskReport {
  double closed_form = 0.0;
  std::optional<double> mc_mean;
  std::optional<double> mc_std_error;
  Vector worst_theta;
  int branch = 0;

  bool mc_consistent(double z = 3.0) const;
};

// Closed form + worst-case theta + (for trials > 0) Monte Carlo at that theta, using the
// base scheme or, when epsilon is given, the robustified one.
RiskReport risk_report(const ModelSpec& model, const SystemConfig& cfg,
                       std::optional<double> epsilon, long long trials);

}  // namespace ota
