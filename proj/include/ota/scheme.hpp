#pragma once

#include <random>

#include "ota/types.hpp"

namespace ota {

// Per-coordinate encoder maps. LinearGain scales the raw sample; TwoLevel maps the
// binary sample {0,1} to {level_lo, level_hi}.
struct LinearGain {
  double gain = 1.0;
};

struct TwoLevel {
  double level_lo = -1.0;
  double level_hi = 1.0;
};

struct EncoderSpec {
  std::variant<LinearGain, TwoLevel> map;
  // Variance of i.i.d. Gaussian noise each user adds on top of the mapped symbol
  // (privacy noise). Included in the power budget.
  double local_noise_var = 0.0;
};

// Componentwise affine decoder theta_hat = alpha * y + beta.
struct AffineEstimator {
  double alpha = 0.0;
  double beta = 0.0;
};

struct Scheme {
  Family family = Family::gaussian;
  EncoderSpec encoder;
  AffineEstimator estimator;
  SystemConfig config;  // snapshot of the physical channel parameters
  int m = 0;            // sparsity budget the scheme was built for (= d when not sparse)
  int branch = 0;       // which closed-form branch produced alpha (0 for gaussian)
};

// Optimal affine coefficients for a centered two-level encoder with half-gap C,
// population budget sum_j theta_j <= m over d coordinates. alpha is the smaller of the
// two candidate coefficients (low-noise boundary point vs. unconstrained quadratic
// minimizer); branch records which one was taken. beta_centered applies to the centered
// received signal.
struct TwoLevelOptimum {
  double alpha = 0.0;
  double beta_centered = 0.0;
  int branch = 1;
};

TwoLevelOptimum two_level_optimum(double C, double m, int d, int n, double sigma0_sq);

// Privacy noise variance that meets a conditional leakage budget epsilon:
// max{(s*P - 2*eps*sigma0^2) / (2*eps*n + s), 0}.
double privacy_noise_variance(const SystemConfig& cfg, double epsilon);

// Minimax-optimal schemes under power P and channel noise sigma0_sq.
Scheme gaussian_scheme(const SystemConfig& cfg, const GaussianLocation& model);
Scheme bernoulli_scheme(const SystemConfig& cfg);
Scheme sparse_scheme(const SystemConfig& cfg, int m);
Scheme make_scheme(const ModelSpec& model, const SystemConfig& cfg);

// Same constructors with an explicit (power, channel-noise) pair; used to rebuild
// schemes around a privacy-noise budget.
Scheme gaussian_scheme_for(const SystemConfig& cfg, const GaussianLocation& model, double power,
                           double noise_var);
Scheme bernoulli_scheme_for(const SystemConfig& cfg, double power, double noise_var);
Scheme sparse_scheme_for(const SystemConfig& cfg, int m, double power, double noise_var);

// Rebuilds the family's optimal scheme with power P - sigma_pri^2 against effective
// channel noise sigma0^2 + n*sigma_pri^2, and attaches sigma_pri^2 as local encoder noise.
Scheme robustify(const ModelSpec& model, const SystemConfig& cfg, double epsilon);

// One user's transmitted symbols for sample u (adds local noise when configured).
Vector encode(const Scheme& scheme, const Vector& u, std::mt19937_64& rng);

// Decodes a received vector.
Vector estimate(const Scheme& scheme, const Vector& y);

// Exact per-user average transmit power (1/d) * sum_j E[X_j^2] at parameter theta.
double power_audit(const Scheme& scheme, const ModelSpec& model, const Vector& theta);

// Equivalent centered representation of a two-level scheme: half-gap C = (hi - lo)/2 and
// the estimator that, applied to the centered channel output, reproduces the original
// decoder (beta absorbs the deterministic offset n*(lo + hi)/2).
struct CenteredEquivalent {
  double C = 0.0;
  AffineEstimator estimator;
};

CenteredEquivalent equivalent_centered(double level_lo, double level_hi,
                                       const AffineEstimator& est, int n);

}  // namespace ota
