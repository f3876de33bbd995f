#pragma once

#include <cstdint>

#include "ota/scheme.hpp"
#include "ota/types.hpp"

namespace ota {

struct TrialResult {
  Vector received;
  Vector estimate;
  double squared_error = 0.0;
  std::uint64_t seed_used = 0;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long trials = 0;
};

// Superimposes the rows of X (one row per user) and adds N(0, sigma0_sq) per component.
Vector transmit(const Matrix& X, double sigma0_sq, std::mt19937_64& rng);

// One end-to-end round: sample users, encode, transmit, estimate. All randomness comes
// from a fresh engine seeded with trial_seed, so a trial is a pure function of its seed.
TrialResult run_trial(const ModelSpec& model, const Vector& theta, const Scheme& scheme,
                      const SystemConfig& cfg, std::uint64_t trial_seed);

// Monte Carlo estimate of E||theta_hat - theta||^2 with per-trial seeds derived from
// (master_seed, trial index). threads = 0 picks a hardware default; the result is
// bit-identical for any thread count because per-trial errors land in an index-ordered
// buffer that is reduced sequentially.
McEstimate mc_risk(const ModelSpec& model, const Vector& theta, const Scheme& scheme,
                   const SystemConfig& cfg, long long trials, std::uint64_t master_seed,
                   int threads = 0);

}  // namespace ota
