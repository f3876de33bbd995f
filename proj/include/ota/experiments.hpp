#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ota/config.hpp"
#include "ota/oracle.hpp"
#include "ota/report.hpp"

namespace ota {

// Exit codes shared by the experiment drivers and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitVerdict = 2;
inline constexpr int kExitIo = 3;

struct RunOutcome {
  Report report;
  int exit_code = kExitOk;
  std::vector<std::string> messages;   // human-readable verdict/failure lines
  std::optional<double> fitted_slope;  // filled by run_scaling
  // Pre-rendered output that replaces the v1 report (used by the verify subcommand,
  // whose verdict table has its own column set).
  std::optional<std::string> rendered_override;
};

// Closed-form + Monte Carlo risk rows over the configured (n, epsilon) grid; exit code 2
// if any MC mean strays more than 3 standard errors from its closed form.
RunOutcome run_risk(const ExperimentConfig& config);

// MI bound/exact and calibrated CMI rows; exit code 2 on any ordering violation.
RunOutcome run_privacy(const ExperimentConfig& config);

// Oracle verification suite mapped to machine-readable rows; exit code 2 on any failed
// verdict.
RunOutcome run_verify(const ExperimentConfig& config, const VerifyOptions& options = {});

// Robust risk over the n sweep plus the fitted log-log slope and the reference exponent.
RunOutcome run_scaling(const ExperimentConfig& config);

// Privacy-noise calibration rows over the epsilon grid.
RunOutcome run_calibrate(const ExperimentConfig& config);

}  // namespace ota
