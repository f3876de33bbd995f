#include "ota/channel.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "ota/model.hpp"
#include "ota/rng.hpp"

namespace ota {

Vector transmit(const Matrix& X, double sigma0_sq, std::mt19937_64& rng) {
  if (X.rows() < 1) throw std::invalid_argument("transmit: need at least one user row");
  if (sigma0_sq < 0.0) throw std::invalid_argument("transmit: sigma0_sq must be nonnegative");

  Vector y = X.colwise().sum().transpose();
  if (sigma0_sq > 0.0) {
    std::normal_distribution<double> normal(0.0, std::sqrt(sigma0_sq));
    for (Eigen::Index j = 0; j < y.size(); ++j) y[j] += normal(rng);
  }
  return y;
}

TrialResult run_trial(const ModelSpec& model, const Vector& theta, const Scheme& scheme,
                      const SystemConfig& cfg, std::uint64_t trial_seed) {
  if (cfg.n != scheme.config.n || cfg.d != scheme.config.d)
    throw std::invalid_argument("run_trial: cfg and scheme snapshot disagree on (n, d)");

  std::mt19937_64 rng = make_engine(trial_seed);
  const Matrix users = sample_users(model, theta, cfg.n, rng);

  Matrix symbols(cfg.n, cfg.d);
  for (int i = 0; i < cfg.n; ++i) symbols.row(i) = encode(scheme, users.row(i).transpose(), rng).transpose();

  TrialResult result;
  result.received = transmit(symbols, cfg.sigma0_sq, rng);
  result.estimate = estimate(scheme, result.received);
  result.squared_error = (result.estimate - theta).squaredNorm();
  result.seed_used = trial_seed;
  return result;
}

McEstimate mc_risk(const ModelSpec& model, const Vector& theta, const Scheme& scheme,
                   const SystemConfig& cfg, long long trials, std::uint64_t master_seed,
                   int threads) {
  if (trials < 2) throw std::invalid_argument("mc_risk: need at least two trials for a standard error");

  // Per-trial squared errors land at their trial index, so the reduction below is
  // independent of how the index range was carved up across threads.
  std::vector<double> errors(static_cast<std::size_t>(trials));
  auto worker = [&](long long begin, long long end) {
    for (long long t = begin; t < end; ++t) {
      const std::uint64_t seed = derive_seed(master_seed, static_cast<std::uint64_t>(t));
      errors[static_cast<std::size_t>(t)] = run_trial(model, theta, scheme, cfg, seed).squared_error;
    }
  };

  int count = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (count < 1) count = 1;
  count = static_cast<int>(std::min<long long>(count, trials));
  if (count == 1) {
    worker(0, trials);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(count));
    const long long chunk = (trials + count - 1) / count;
    for (int k = 0; k < count; ++k) {
      const long long begin = k * chunk;
      const long long end = std::min(trials, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  double sum = 0.0;
  for (const double e : errors) sum += e;
  const double mean = sum / static_cast<double>(trials);

  double ss = 0.0;
  for (const double e : errors) ss += (e - mean) * (e - mean);
  const double sample_var = ss / static_cast<double>(trials - 1);

  McEstimate est;
  est.mean = mean;
  est.std_error = std::sqrt(sample_var / static_cast<double>(trials));
  est.trials = trials;
  return est;
}

}  // namespace ota
