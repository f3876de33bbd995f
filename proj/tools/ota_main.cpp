// Command-line front end: builds an experiment description from a JSON config file
// and/or flags, dispatches to the experiment drivers, and writes the v1 report.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ota/experiments.hpp"

namespace {

using namespace ota;

struct CliArgs {
  std::optional<std::string> config_path;
  std::optional<std::string> model;
  std::optional<double> sigma_sq;
  std::optional<double> B;
  std::optional<int> m;
  std::optional<int> n;
  std::optional<int> d;
  std::optional<int> s;
  std::optional<double> P;
  std::optional<double> sigma0_sq;
  std::optional<double> epsilon;
  std::vector<double> epsilons;
  std::vector<int> sweep_n;
  std::optional<long long> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  std::optional<std::string> format;
  double perturb_alpha = 1.0;  // verify-only negative-control knob
};

void add_common_flags(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON experiment description; flags override it");
  cmd->add_option("--model", args.model, "model family: gaussian | bernoulli | sparse_bernoulli");
  cmd->add_option("--sigma-sq", args.sigma_sq, "gaussian observation noise variance");
  cmd->add_option("--B", args.B, "gaussian mean-norm radius scale");
  cmd->add_option("--m", args.m, "sparse family sparsity budget");
  cmd->add_option("--n", args.n, "number of users");
  cmd->add_option("--d", args.d, "parameter dimension");
  cmd->add_option("--s", args.s, "channel uses per round (must equal d; defaults to d)");
  cmd->add_option("--P", args.P, "per-user average power budget");
  cmd->add_option("--sigma0-sq", args.sigma0_sq, "channel noise variance");
  cmd->add_option("--epsilon", args.epsilon, "single conditional-leakage target");
  cmd->add_option("--epsilons", args.epsilons, "leakage-target sweep (comma separated)")
      ->delimiter(',');
  cmd->add_option("--sweep-n", args.sweep_n, "user-count sweep (comma separated)")->delimiter(',');
  cmd->add_option("--trials", args.trials, "Monte Carlo trials per row (0 skips sampling)");
  cmd->add_option("--seed", args.seed, "master seed (overrides OTA_SEED and the config)");
  cmd->add_option("--out", args.out_path, "output path; - writes to stdout");
  cmd->add_option("--format", args.format, "report format: csv | json");
}

ModelSpec model_from_token(const std::string& token) {
  if (token == "gaussian") return GaussianLocation{};
  if (token == "bernoulli") return ProductBernoulli{};
  if (token == "sparse_bernoulli") return SparseBernoulli{};
  throw ConfigError("flag --model: unknown family \"" + token +
                    "\" (expected gaussian, bernoulli, or sparse_bernoulli)");
}

ExperimentConfig build_config(const CliArgs& args) {
  ExperimentConfig config;
  if (args.config_path.has_value()) config = load_config(*args.config_path);

  if (const char* env_seed = std::getenv("OTA_SEED")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env_seed, &end, 10);
    if (end == env_seed || *end != '\0' || std::string(env_seed).find('-') != std::string::npos)
      throw ConfigError("environment variable OTA_SEED: must be a non-negative integer");
    config.system.master_seed = value;
  }

  if (args.model.has_value()) config.model = model_from_token(*args.model);
  if (args.sigma_sq.has_value()) {
    auto* gaussian = std::get_if<GaussianLocation>(&config.model);
    if (gaussian == nullptr)
      throw ConfigError("flag --sigma-sq: only valid for the gaussian family");
    gaussian->sigma_sq = *args.sigma_sq;
  }
  if (args.B.has_value()) {
    auto* gaussian = std::get_if<GaussianLocation>(&config.model);
    if (gaussian == nullptr) throw ConfigError("flag --B: only valid for the gaussian family");
    gaussian->B = *args.B;
  }
  if (args.m.has_value()) {
    auto* sparse = std::get_if<SparseBernoulli>(&config.model);
    if (sparse == nullptr)
      throw ConfigError("flag --m: only valid for the sparse_bernoulli family");
    sparse->m = *args.m;
  }
  if (args.n.has_value()) config.system.n = *args.n;
  if (args.d.has_value()) {
    config.system.d = *args.d;
    if (!args.s.has_value()) config.system.s = *args.d;
  }
  if (args.s.has_value()) config.system.s = *args.s;
  if (args.P.has_value()) config.system.P = *args.P;
  if (args.sigma0_sq.has_value()) config.system.sigma0_sq = *args.sigma0_sq;
  if (args.epsilon.has_value()) {
    config.epsilon = *args.epsilon;
    config.epsilons.clear();
  }
  if (!args.epsilons.empty()) {
    config.epsilons = args.epsilons;
    config.epsilon.reset();
  }
  if (!args.sweep_n.empty()) config.sweep_n = args.sweep_n;
  if (args.trials.has_value()) {
    config.trials = *args.trials;
    config.trials_set = true;
  }
  if (args.seed.has_value()) config.system.master_seed = *args.seed;
  if (args.out_path.has_value()) config.out_path = *args.out_path;
  if (args.format.has_value()) config.format = parse_format(*args.format);
  return config;
}

int dispatch(const std::string& command, const CliArgs& args) {
  const ExperimentConfig config = build_config(args);

  RunOutcome outcome;
  if (command == "risk") {
    outcome = run_risk(config);
  } else if (command == "privacy") {
    outcome = run_privacy(config);
  } else if (command == "verify") {
    VerifyOptions options;
    options.alpha_perturbation = args.perturb_alpha;
    outcome = run_verify(config, options);
  } else if (command == "scaling") {
    outcome = run_scaling(config);
  } else {
    outcome = run_calibrate(config);
  }

  if (outcome.rendered_override.has_value())
    write_text(*outcome.rendered_override, config.out_path);
  else
    write_report(outcome.report, config.out_path, config.format);
  for (const std::string& message : outcome.messages) std::cerr << message << '\n';
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Over-the-air estimation: risk tables, leakage sweeps, verification suites"};
  app.require_subcommand(1);

  CliArgs args;
  CLI::App* risk = app.add_subcommand("risk", "closed-form and Monte Carlo risk rows");
  CLI::App* privacy = app.add_subcommand("privacy", "leakage bounds and calibrated targets");
  CLI::App* verify = app.add_subcommand("verify", "brute-force verification suite");
  CLI::App* scaling = app.add_subcommand("scaling", "risk scaling over the user-count sweep");
  CLI::App* calibrate = app.add_subcommand("calibrate", "privacy-noise calibration table");
  for (CLI::App* cmd : {risk, privacy, verify, scaling, calibrate}) add_common_flags(cmd, args);
  verify->add_option("--perturb-alpha", args.perturb_alpha,
                     "multiply the analytic alpha before comparison (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? ota::kExitOk : ota::kExitConfig;
  }

  try {
    return dispatch(app.get_subcommands().front()->get_name(), args);
  } catch (const ota::ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return ota::kExitConfig;
  } catch (const ota::VerdictError& err) {
    std::cerr << "verdict failure: " << err.what() << '\n';
    return ota::kExitVerdict;
  } catch (const ota::IoError& err) {
    std::cerr << "io error: " << err.what() << '\n';
    return ota::kExitIo;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return ota::kExitConfig;
  }
}
