#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <variant>

namespace ota {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Validation failures on user-supplied configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented check (inequality, consistency, agreement band) did not hold.
class VerdictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Channel and population parameters shared by every operation.
struct SystemConfig {
  int n = 0;                 // number of users
  int d = 0;                 // parameter dimension
  int s = 0;                 // channel uses per round; the analog schemes need s == d
  double P = 0.0;            // per-user average power budget
  double sigma0_sq = 0.0;    // channel noise variance per use
  std::uint64_t master_seed = 0;

  void validate() const;
};

// Model families. The tag carries the family parameters so schemes can be rebuilt
// (e.g. with effective power after privacy-noise calibration).
struct GaussianLocation {
  double sigma_sq = 1.0;  // observation noise variance, > 0
  double B = 1.0;         // mean-norm radius scale, > 0; admissible ||theta||_2 <= B*sqrt(d)
};

struct ProductBernoulli {};

struct SparseBernoulli {
  int m = 1;  // sparsity budget: 1 <= m <= d and sum_j theta_j <= m
};

using ModelSpec = std::variant<GaussianLocation, ProductBernoulli, SparseBernoulli>;

enum class Family { gaussian, bernoulli, sparse_bernoulli };

Family family_of(const ModelSpec& model);

// Validates model parameters against cfg (m range, positivity).
void validate_model(const ModelSpec& model, const SystemConfig& cfg);

}  // namespace ota
