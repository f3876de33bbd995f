// End-to-end tests driving the installed binary through a shell. Each invocation
// captures stdout/stderr into scratch files next to the test's working directory.
#include <doctest/doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "ota/report.hpp"

using doctest::Contains;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int g_invocation = 0;

// `prefix` is prepended verbatim (e.g. "OTA_SEED=5 "); `args` follows the binary name.
CliResult run_cli(const std::string& args, const std::string& prefix = "") {
  const std::string tag = std::to_string(++g_invocation);
  const std::string out_path = "cli_stdout_" + tag + ".txt";
  const std::string err_path = "cli_stderr_" + tag + ".txt";
  const std::string command =
      prefix + std::string(OTA_CLI_BIN) + " " + args + " > " + out_path + " 2> " + err_path;
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return result;
}

std::string write_temp(const std::string& name, const std::string& content) {
  std::ofstream out(name, std::ios::binary | std::ios::trunc);
  out << content;
  return name;
}

// Counts verify-table rows whose pass column (second CSV field) is "0".
int count_fail_rows(const std::string& csv) {
  int fails = 0;
  std::istringstream lines(csv);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("check,", 0) == 0) continue;
    const auto first = line.find(',');
    if (first == std::string::npos) continue;
    const auto second = line.find(',', first + 1);
    if (line.substr(first + 1, second - first - 1) == "0") ++fails;
  }
  return fails;
}

}  // namespace

TEST_CASE("risk: closed-form row on stdout, sampling skipped") {
  const CliResult r = run_cli("risk --model gaussian --n 10 --d 2 --P 1 --sigma0-sq 1 --trials 0");
  CHECK(r.exit_code == 0);
  CHECK(Contains("# ota-report v1").checkWith(r.out.c_str()));
  CHECK(Contains("gaussian[sigma_sq=1;B=1],10,2,").checkWith(r.out.c_str()));
  CHECK(Contains(",0.24,").checkWith(r.out.c_str()));
  CHECK(Contains("worst_theta").checkWith(r.out.c_str()));

  const ota::Report report = ota::parse_csv(r.out);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].risk_closed == doctest::Approx(0.24).epsilon(1e-12));
  CHECK_FALSE(report.rows[0].risk_mc.has_value());
  CHECK_FALSE(report.rows[0].trials.has_value());
}

TEST_CASE("risk: Monte Carlo agrees with the closed form") {
  const CliResult r =
      run_cli("risk --model gaussian --n 10 --d 2 --P 1 --sigma0-sq 1 --trials 20000 --seed 1");
  CHECK(r.exit_code == 0);
  CHECK(r.err.empty());
  const ota::Report report = ota::parse_csv(r.out);
  REQUIRE(report.rows.size() == 1);
  const ota::ReportRow& row = report.rows[0];
  REQUIRE(row.risk_mc.has_value());
  REQUIRE(row.risk_mc_stderr.has_value());
  CHECK(std::abs(*row.risk_mc - 0.24) <= 3.0 * *row.risk_mc_stderr);
  CHECK(row.trials == 20000);
  CHECK(row.seed == 1);
}

TEST_CASE("exit code 1 on configuration mistakes") {
  SUBCASE("family-mismatched flag") {
    const CliResult r = run_cli("risk --model gaussian --m 2 --n 4 --d 2 --P 1 --sigma0-sq 1");
    CHECK(r.exit_code == 1);
    CHECK(Contains("config error").checkWith(r.err.c_str()));
    CHECK(Contains("--m").checkWith(r.err.c_str()));
  }
  SUBCASE("slot count differs from dimension") {
    const CliResult r =
        run_cli("risk --model bernoulli --n 4 --d 2 --s 3 --P 1 --sigma0-sq 1 --trials 0");
    CHECK(r.exit_code == 1);
    CHECK(Contains("system.s").checkWith(r.err.c_str()));
  }
  SUBCASE("missing subcommand") {
    CHECK(run_cli("").exit_code == 1);
  }
  SUBCASE("unknown flag") {
    CHECK(run_cli("risk --bogus 1").exit_code == 1);
  }
  SUBCASE("bad OTA_SEED") {
    const CliResult r = run_cli(
        "risk --model bernoulli --n 4 --d 1 --P 1 --sigma0-sq 1 --trials 0", "OTA_SEED=abc ");
    CHECK(r.exit_code == 1);
    CHECK(Contains("OTA_SEED").checkWith(r.err.c_str()));
  }
}

TEST_CASE("verify: clean pass by default, failure is a verdict error") {
  const CliResult pass = run_cli("verify --seed 3");
  CHECK(pass.exit_code == 0);
  CHECK(Contains("# ota-verify v1").checkWith(pass.out.c_str()));
  CHECK(Contains("affine-recovery/").checkWith(pass.out.c_str()));
  CHECK(Contains("vlnv/sweep,1,").checkWith(pass.out.c_str()));
  CHECK(count_fail_rows(pass.out) == 0);

  const CliResult fail = run_cli("verify --seed 3 --perturb-alpha 1.15");
  CHECK(fail.exit_code == 2);
  CHECK(count_fail_rows(fail.out) > 0);
  CHECK(Contains("verify FAIL").checkWith(fail.err.c_str()));
}

TEST_CASE("verify: json format carries the verdict schema") {
  const CliResult r = run_cli("verify --seed 3 --format json");
  CHECK(r.exit_code == 0);
  REQUIRE_FALSE(r.out.empty());
  CHECK(r.out.front() == '{');
  CHECK(Contains("\"schema\": \"verify-v1\"").checkWith(r.out.c_str()));
  CHECK_FALSE(Contains("\"pass\": false").checkWith(r.out.c_str()));
}

TEST_CASE("exit code 3 when the output path cannot be written") {
  const CliResult r = run_cli(
      "risk --model gaussian --n 10 --d 2 --P 1 --sigma0-sq 1 --trials 0 "
      "--out /nonexistent-dir/report.csv");
  CHECK(r.exit_code == 3);
  CHECK(Contains("io error").checkWith(r.err.c_str()));
}

TEST_CASE("repeated runs are byte-identical") {
  const std::string args =
      "risk --model sparse_bernoulli --m 1 --n 4 --d 4 --P 1 --sigma0-sq 1 --trials 5000 --seed 9";
  const CliResult a = run_cli(args);
  const CliResult b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK_FALSE(a.out.empty());
}

TEST_CASE("seed precedence: flag beats environment, environment beats config default") {
  const std::string base = "risk --model bernoulli --n 4 --d 1 --P 1 --sigma0-sq 1 --trials 4000";
  const CliResult via_env = run_cli(base, "OTA_SEED=5 ");
  const CliResult via_flag = run_cli(base + " --seed 5");
  CHECK(via_env.exit_code == 0);
  CHECK(via_env.out == via_flag.out);

  const CliResult flag_wins = run_cli(base + " --seed 7", "OTA_SEED=5 ");
  const CliResult plain_seed7 = run_cli(base + " --seed 7");
  CHECK(flag_wins.out == plain_seed7.out);
  CHECK(flag_wins.out != via_env.out);
}

TEST_CASE("json report format") {
  const CliResult r = run_cli(
      "risk --model gaussian --n 10 --d 2 --P 1 --sigma0-sq 1 --trials 0 --format json");
  CHECK(r.exit_code == 0);
  REQUIRE_FALSE(r.out.empty());
  CHECK(r.out.front() == '{');
  CHECK(Contains("\"schema\": \"v1\"").checkWith(r.out.c_str()));
  CHECK(Contains("\"risk_closed\": 0.24").checkWith(r.out.c_str()));
}

TEST_CASE("config file drives a run and flags override it") {
  const std::string path = write_temp("cli_config_tmp.json", R"({
    "model": {"family": "gaussian"},
    "system": {"n": 10, "d": 2, "P": 1.0, "sigma0_sq": 1.0},
    "run": {"trials": 0}
  })");

  const CliResult from_file = run_cli("risk --config " + path);
  CHECK(from_file.exit_code == 0);
  CHECK(Contains("gaussian[sigma_sq=1;B=1],10,2,").checkWith(from_file.out.c_str()));

  const CliResult overridden = run_cli("risk --config " + path + " --n 20");
  CHECK(overridden.exit_code == 0);
  CHECK(Contains("gaussian[sigma_sq=1;B=1],20,2,").checkWith(overridden.out.c_str()));
  // d*sigma^2/n + d*(B^2+sigma^2)*sigma0^2/(n^2*P) at n=20: 0.1 + 0.01
  const ota::Report overridden_report = ota::parse_csv(overridden.out);
  REQUIRE(overridden_report.rows.size() == 1);
  REQUIRE(overridden_report.rows[0].risk_closed.has_value());
  CHECK(*overridden_report.rows[0].risk_closed == doctest::Approx(0.11).epsilon(1e-12));

  const CliResult missing = run_cli("risk --config /nonexistent-dir/none.json");
  CHECK(missing.exit_code == 3);

  std::remove(path.c_str());
}

TEST_CASE("calibrate: default target grid yields one row per epsilon") {
  const CliResult r = run_cli("calibrate --model bernoulli --n 10 --d 2 --P 1 --sigma0-sq 1");
  CHECK(r.exit_code == 0);
  const ota::Report report = ota::parse_csv(r.out);
  REQUIRE(report.rows.size() == 5);
  for (const ota::ReportRow& row : report.rows) {
    REQUIRE(row.epsilon.has_value());
    REQUIRE(row.cmi_bound.has_value());
    CHECK(*row.cmi_bound <= *row.epsilon + 1e-12);
  }
  // Pinned point: P=1, sigma0_sq=1, s=2, n=10, eps=0.1 -> privacy noise 0.45.
  bool found = false;
  for (const ota::ReportRow& row : report.rows)
    if (*row.epsilon == 0.1) {
      found = true;
      CHECK(*row.sigma_pri_sq == doctest::Approx(0.45).epsilon(1e-12));
    }
  CHECK(found);
}

TEST_CASE("privacy: pinned gaussian leakage values appear in the table") {
  const CliResult r = run_cli(
      "privacy --model gaussian --sigma-sq 1 --B 1 --n 5 --d 2 --P 2 --sigma0-sq 1 "
      "--epsilon 0.1");
  CHECK(r.exit_code == 0);
  const ota::Report report = ota::parse_csv(r.out);
  REQUIRE(report.rows.size() == 1);
  const ota::ReportRow& row = report.rows[0];
  REQUIRE(row.mi_bound.has_value());
  REQUIRE(row.mi_exact.has_value());
  CHECK(*row.mi_bound == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(*row.mi_exact == doctest::Approx(std::log(1.2)).epsilon(1e-12));
  REQUIRE(row.cmi_bound.has_value());
  CHECK(*row.cmi_bound <= 0.1 + 1e-12);
}

TEST_CASE("scaling: closed-form sweep reports the fitted slope") {
  const CliResult r = run_cli(
      "scaling --model gaussian --d 2 --n 4 --P 1 --sigma0-sq 1 --epsilon 0.1 "
      "--sweep-n 16,32,64,128");
  CHECK(r.exit_code == 0);
  CHECK(Contains("fitted log-log slope").checkWith(r.out.c_str()));
  const ota::Report report = ota::parse_csv(r.out);
  CHECK(report.rows.size() == 4);
  // Closed forms only: no Monte Carlo columns unless trials are requested.
  for (const ota::ReportRow& row : report.rows) CHECK_FALSE(row.risk_mc.has_value());

  const CliResult without_eps = run_cli(
      "scaling --model gaussian --d 2 --n 4 --P 1 --sigma0-sq 1 --sweep-n 16,32,64,128");
  CHECK(without_eps.exit_code == 1);
  CHECK(Contains("epsilon").checkWith(without_eps.err.c_str()));
}
