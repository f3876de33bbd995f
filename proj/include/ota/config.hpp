#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ota/types.hpp"

namespace ota {

enum class OutputFormat { csv, json };

OutputFormat parse_format(const std::string& name);

struct ExperimentConfig {
  ModelSpec model = ProductBernoulli{};
  SystemConfig system;
  std::optional<double> epsilon;   // single robustness target (scheme.epsilon)
  std::vector<double> epsilons;    // sweep list (run.epsilons)
  std::vector<int> sweep_n;        // n sweep (run.sweep_n)
  long long trials = 100000;
  bool trials_set = false;         // true when run.trials / --trials was given explicitly
  std::string out_path = "-";      // "-" writes to stdout
  OutputFormat format = OutputFormat::csv;

  // Effective epsilon list for sweeping subcommands: run.epsilons, else the single
  // scheme epsilon, else (when required) the default grid.
  std::vector<double> epsilon_list(bool fill_default) const;
  std::vector<int> n_list(bool fill_default_sweep) const;

  void validate() const;  // throws ConfigError naming the offending field
};

inline const std::vector<double> kDefaultEpsilons = {0.01, 0.05, 0.1, 0.5, 1.0};
inline const std::vector<int> kDefaultSweepN = {64, 128, 256, 512, 1024};

// Parses the JSON experiment description. `origin` labels error messages (file name).
ExperimentConfig parse_config(const std::string& json_text, const std::string& origin);

// Reads and parses a config file; IoError if unreadable, ConfigError on bad content.
ExperimentConfig load_config(const std::string& path);

}  // namespace ota
