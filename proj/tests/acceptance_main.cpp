// Acceptance gate: exercises the library end to end and prints one PASS/FAIL line
// per criterion, with pinned expectations and tolerances spelled out inline.
// Exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ota/channel.hpp"
#include "ota/experiments.hpp"
#include "ota/oracle.hpp"
#include "ota/privacy.hpp"
#include "ota/report.hpp"
#include "ota/risk.hpp"
#include "ota/rng.hpp"
#include "ota/scheme.hpp"

using namespace ota;

namespace {

int g_failed = 0;
int g_total = 0;

void report_line(const std::string& name, bool pass, const std::string& detail) {
  ++g_total;
  if (!pass) ++g_failed;
  std::printf("%s %s%s%s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.empty() ? "" : " -- ",
              detail.c_str());
  std::fflush(stdout);
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f s", s);
  return buf;
}

SystemConfig system_config(int n, int d, double P, double sigma0_sq, std::uint64_t seed) {
  SystemConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.s = d;
  cfg.P = P;
  cfg.sigma0_sq = sigma0_sq;
  cfg.master_seed = seed;
  return cfg;
}

bool close_abs(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// --- 1. Gaussian family: closed-form risk and Monte Carlo agreement -------------------

void criterion_gaussian_risk() {
  Timer timer;
  const SystemConfig cfg = system_config(10, 2, 1.0, 1.0, 101);
  const GaussianLocation model;  // sigma_sq = 1, B = 1

  const double closed = gaussian_minimax_risk(cfg, model);
  const bool closed_ok = close_abs(closed, 0.24, 1e-12);

  const RiskReport run = risk_report(model, cfg, std::nullopt, 100000);
  const bool mc_ok = run.mc_consistent(3.0);
  const double elapsed = timer.seconds();
  const bool time_ok = elapsed < 10.0;

  report_line("gaussian risk: closed form 0.24 and 100000-trial mean within 3 std errors",
              closed_ok && mc_ok && time_ok,
              "closed " + format_double(closed) + ", mc " + format_double(*run.mc_mean) +
                  " +/- " + format_double(*run.mc_std_error) + ", " + secs(elapsed) +
                  (time_ok ? "" : " (over the 10 s budget)"));
}

// --- 2. Symmetric two-level family: both closed-form branches -------------------------

void criterion_two_level_branches() {
  const SystemConfig low_noise = system_config(4, 1, 1.0, 1.0, 202);
  const double closed1 = bernoulli_minimax_risk(low_noise);
  const int branch1 = risk_branch(ProductBernoulli{}, low_noise);
  const RiskReport run1 = risk_report(ProductBernoulli{}, low_noise, std::nullopt, 100000);

  const SystemConfig high_noise = system_config(4, 1, 1.0, 100.0, 212);
  const double closed2 = bernoulli_minimax_risk(high_noise);
  const int branch2 = risk_branch(ProductBernoulli{}, high_noise);
  const RiskReport run2 = risk_report(ProductBernoulli{}, high_noise, std::nullopt, 100000);

  // The pinned values: d*(1 + sigma0^2/(n*P))/(4*(sqrt(n)+1)^2) = 1.25/36 on the
  // boundary branch, and (d/4)*x/(x + n^2) with x = sigma0^2/P = 100 on the interior one.
  const bool pin1 = close_abs(closed1, 1.25 / 36.0, 1e-12) && branch1 == 1;
  const bool pin2 = close_abs(closed2, 25.0 / 116.0, 1e-12) && branch2 == 2;

  const SystemConfig low_noise_d3 = system_config(4, 3, 1.0, 1.0, 222);
  const bool d_linear =
      close_abs(bernoulli_minimax_risk(low_noise_d3), 3.0 * closed1, 1e-12 * 3.0);

  report_line(
      "two-level risk: both branches pinned (1.25/36 and 25/116) with Monte Carlo agreement",
      pin1 && pin2 && d_linear && run1.mc_consistent(3.0) && run2.mc_consistent(3.0),
      "branch " + std::to_string(branch1) + ": " + format_double(closed1) + " (mc " +
          format_double(*run1.mc_mean) + "), branch " + std::to_string(branch2) + ": " +
          format_double(closed2) + " (mc " + format_double(*run2.mc_mean) + ")");
}

// --- 3. Sparse family: asymmetric-level closed form ------------------------------------

void criterion_sparse_risk() {
  const SystemConfig cfg = system_config(4, 4, 1.0, 1.0, 303);
  const SparseBernoulli model{1};
  const double closed = sparse_minimax_risk(cfg, model.m);
  const int branch = risk_branch(model, cfg);
  const RiskReport run = risk_report(model, cfg, std::nullopt, 100000);

  report_line("sparse risk: closed form 5/48 on the boundary branch with Monte Carlo agreement",
              close_abs(closed, 5.0 / 48.0, 1e-12) && branch == 1 && run.mc_consistent(3.0),
              "closed " + format_double(closed) + ", branch " + std::to_string(branch) + ", mc " +
                  format_double(*run.mc_mean) + " +/- " + format_double(*run.mc_std_error));
}

// --- 4. Brute-force verification suite --------------------------------------------------

void criterion_verify_suite() {
  Timer timer;
  const std::vector<OracleVerdict> verdicts = verify_suite(VerifyOptions{});
  int affine = 0;
  int levels = 0;
  int failed = 0;
  std::string first_failure;
  for (const OracleVerdict& v : verdicts) {
    if (v.check.rfind("affine-recovery/", 0) == 0) ++affine;
    if (v.check.rfind("levels/", 0) == 0) ++levels;
    if (!v.pass) {
      ++failed;
      if (first_failure.empty()) first_failure = v.check;
    }
  }
  const double elapsed = timer.seconds();
  const bool ok = failed == 0 && affine >= 12 && levels >= 4 && elapsed < 120.0;
  report_line("verification suite: every verdict passes (>=12 affine, >=4 level recoveries)", ok,
              std::to_string(verdicts.size()) + " verdicts, " + std::to_string(affine) +
                  " affine, " + std::to_string(levels) + " level, " + secs(elapsed) +
                  (failed > 0 ? ", first failure " + first_failure : ""));
}

// --- 5. Randomized schemes: exact risk algebra vs simulation ---------------------------

void criterion_randomized_exact_vs_mc() {
  Timer timer;
  const std::uint64_t master = 5050;
  std::mt19937_64 eng = make_engine(derive_seed(master, 0));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  int failures = 0;
  double worst_z = 0.0;
  const int instances = 20;
  for (int k = 0; k < instances; ++k) {
    const int n = 2 + static_cast<int>(unif(eng) * 9.0);   // 2..10
    const int d = 1 + static_cast<int>(unif(eng) * 4.0);   // 1..4
    const double C = 0.3 + 1.7 * unif(eng);
    const double alpha = unif(eng) / (n * C);
    const double beta = unif(eng);
    const double sigma0_sq = 0.1 + 1.9 * unif(eng);
    const SystemConfig cfg = system_config(n, d, 1.0, sigma0_sq, derive_seed(master, 100 + k));

    Vector theta(d);
    for (int j = 0; j < d; ++j) theta[j] = unif(eng);

    Scheme scheme;
    scheme.family = Family::bernoulli;
    scheme.encoder.map = TwoLevel{-C, C};
    scheme.estimator = AffineEstimator{alpha, beta};
    scheme.config = cfg;
    scheme.m = d;

    const double exact = exact_risk_two_level(C, alpha, beta, theta, cfg);
    const McEstimate mc =
        mc_risk(ProductBernoulli{}, theta, scheme, cfg, 100000, cfg.master_seed);
    const double z = std::abs(mc.mean - exact) / mc.std_error;
    worst_z = std::max(worst_z, z);
    if (z > 3.0) ++failures;
  }

  report_line(
      "randomized two-level schemes: exact risk within 3 std errors of 100000-trial means",
      failures == 0,
      std::to_string(instances) + " instances, worst |z| " + format_double(worst_z) + ", " +
          secs(timer.seconds()));
}

// --- 6. Binary-population leakage: exact value under the 1/n bound ---------------------

// Independent route: full 2^n enumeration of the user bits, bucketed into the joint
// distribution of (first user's bit, superposed count).
double mi_exhaustive(int n, double theta) {
  std::vector<std::vector<double>> joint(2, std::vector<double>(n + 1, 0.0));
  for (int pattern = 0; pattern < (1 << n); ++pattern) {
    double p = 1.0;
    int sum = 0;
    for (int i = 0; i < n; ++i) {
      const bool bit = (pattern >> i) & 1;
      p *= bit ? theta : (1.0 - theta);
      sum += bit ? 1 : 0;
    }
    joint[pattern & 1][sum] += p;
  }
  std::vector<double> p_sum(n + 1, 0.0);
  double p_u[2] = {0.0, 0.0};
  for (int u = 0; u < 2; ++u)
    for (int s = 0; s <= n; ++s) {
      p_sum[s] += joint[u][s];
      p_u[u] += joint[u][s];
    }
  double mi = 0.0;
  for (int u = 0; u < 2; ++u)
    for (int s = 0; s <= n; ++s)
      if (joint[u][s] > 0.0) mi += joint[u][s] * std::log(joint[u][s] / (p_u[u] * p_sum[s]));
  return mi;
}

void criterion_bernoulli_leakage() {
  bool bound_ok = true;
  double worst_excess = -1.0;
  for (int n = 1; n <= 20; ++n) {
    for (int k = 0; k <= 100; ++k) {
      const double theta = k / 100.0;
      const double mi = bernoulli_mi_exact(n, theta);
      const double excess = mi - 1.0 / n;
      worst_excess = std::max(worst_excess, excess);
      bound_ok = bound_ok && excess <= 1e-12;
    }
  }
  const double spot = bernoulli_mi_exact(2, 0.5);
  const bool spot_ok =
      close_abs(spot, 0.34657359, 1e-6) && close_abs(spot, mi_exhaustive(2, 0.5), 1e-9) &&
      close_abs(bernoulli_mi_exact(5, 0.3), mi_exhaustive(5, 0.3), 1e-9);

  report_line(
      "binary leakage: exact per-coordinate value <= 1/n on the full (n, theta) grid",
      bound_ok && spot_ok,
      "worst excess " + format_double(worst_excess) + ", spot I(n=2, theta=0.5) = " +
          format_double(spot));
}

// --- 7. Gaussian leakage: exact value under its bound ----------------------------------

void criterion_gaussian_leakage() {
  const GaussianLocation model;  // sigma_sq = 1, B = 1
  int combos = 0;
  bool ordered = true;
  for (int n = 1; n <= 25; ++n) {
    for (const double sigma0_sq : {0.0, 1.0, 4.0, 9.0}) {
      const SystemConfig cfg = system_config(n, 2, 2.0, sigma0_sq, 0);
      const auto bound = gaussian_mi_bound(cfg, model);
      const auto exact = gaussian_mi_exact(cfg, model);
      ++combos;
      if (bound.has_value() != exact.has_value()) ordered = false;
      if (bound && exact) ordered = ordered && *exact <= *bound + 1e-12;
    }
  }
  const SystemConfig pinned = system_config(5, 2, 2.0, 1.0, 0);
  const auto bound = gaussian_mi_bound(pinned, GaussianLocation{});
  const auto exact = gaussian_mi_exact(pinned, GaussianLocation{});
  const bool spot_ok = bound && exact && close_abs(*bound, 0.2, 1e-12) &&
                       close_abs(*exact, std::log(1.2), 1e-12);

  report_line("gaussian leakage: exact <= bound on a 100-point grid, pinned 0.2 / ln(1.2)",
              ordered && spot_ok,
              std::to_string(combos) + " grid points; spot bound " + format_double(*bound) +
                  ", exact " + format_double(*exact));
}

// --- 8. Privacy-noise calibration meets its target -------------------------------------

void criterion_calibration() {
  const SystemConfig cfg = system_config(10, 2, 1.0, 1.0, 0);
  bool ok = true;
  for (const double eps : {0.01, 0.1, 0.5, 1.0}) {
    const double sigma_pri_sq = calibrate_sigma_pri(cfg, eps);
    const double cmi = robust_cmi_bound(cfg, sigma_pri_sq);
    ok = ok && cmi <= eps + 1e-12;
    if (sigma_pri_sq > 0.0) {
      const double ratio = (cfg.P - sigma_pri_sq) / (cfg.n * sigma_pri_sq + cfg.sigma0_sq);
      const double target = 2.0 * eps / cfg.s;
      ok = ok && close_abs(ratio, target, 1e-12);
      ok = ok && close_abs(cmi, 0.5 * cfg.s * std::log1p(target), 1e-12);
    }
  }
  const double pinned_noise = calibrate_sigma_pri(cfg, 0.1);
  const double pinned_cmi = robust_cmi_bound(cfg, pinned_noise);
  ok = ok && close_abs(pinned_noise, 0.45, 1e-12) && close_abs(pinned_cmi, std::log(1.1), 1e-12);

  report_line(
      "calibration: bound (s/2)ln(1 + 2 eps/s) <= eps and the signal-ratio identity at 1e-12",
      ok,
      "eps 0.1 gives noise " + format_double(pinned_noise) + ", bound " +
          format_double(pinned_cmi));
}

// --- 9. Robust-risk scaling in the user count -------------------------------------------

void criterion_scaling_slope() {
  ExperimentConfig config;
  config.model = GaussianLocation{};  // sigma_sq = 1, B = 1
  config.system = system_config(64, 64, 1.0, 1.0, 0);
  config.epsilon = 0.01;
  // Default sweep {64, 128, 256, 512, 1024}; closed forms only (no trials requested).
  const RunOutcome outcome = run_scaling(config);
  const bool has_slope = outcome.fitted_slope.has_value();
  const double slope = has_slope ? *outcome.fitted_slope : 0.0;
  const bool ok = outcome.exit_code == kExitOk && has_slope && slope >= -2.05 && slope <= -1.90;
  report_line("scaling: fitted log-log slope of the robust risk in n lands in [-2.05, -1.90]", ok,
              "d = 64, eps = 0.01, slope " + (has_slope ? format_double(slope) : "missing"));
}

// --- 10. Oracle robustness sweeps and the negative control ------------------------------

void criterion_oracle_robustness() {
  std::vector<std::string> failures;

  {  // (a) moment/range inequality on random admissible parameters
    std::mt19937_64 eng = make_engine(derive_seed(7777, 1));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    bool holds = true;
    bool saw_lower = false;
    bool saw_upper = false;
    for (int k = 0; k < 10000; ++k) {
      const int d = 1 + static_cast<int>(unif(eng) * 16.0);
      Vector theta(d);
      for (int j = 0; j < d; ++j) theta[j] = unif(eng);
      if (k % 100 == 0) theta.setConstant(unif(eng));
      if (k % 100 == 50)
        for (int j = 0; j < d; ++j) theta[j] = theta[j] < 0.5 ? 0.0 : 1.0;
      const KeyInequality check = key_inequality_check(theta);
      holds = holds && check.holds;
      saw_lower = saw_lower || check.lower_tight;
      saw_upper = saw_upper || check.upper_tight;
    }
    if (!(holds && saw_lower && saw_upper)) failures.push_back("range-inequality sweep");
  }

  {  // (b) E[V ln V] moment bound on random discrete distributions
    std::mt19937_64 eng = make_engine(derive_seed(7777, 2));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    bool holds = true;
    for (int k = 0; k < 10000; ++k) {
      const int size = 1 + static_cast<int>(unif(eng) * 8.0);
      Vector values(size);
      Vector probs(size);
      double total = 0.0;
      for (int j = 0; j < size; ++j) {
        values[j] = 5.0 * unif(eng);
        if (k % 7 == 0 && j == 0) values[j] = 0.0;
        probs[j] = expo(eng) + 1e-12;
        total += probs[j];
      }
      probs /= total;
      holds = holds && vlnv_bound_check(values, probs).holds;
    }
    if (!holds) failures.push_back("moment-bound sweep");
  }

  {  // (c) centered/uncentered risk equivalence at 1e-10 on random level pairs
    std::mt19937_64 eng = make_engine(derive_seed(7777, 3));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    bool holds = true;
    for (int k = 0; k < 1000; ++k) {
      const double lo = -2.0 + 3.0 * unif(eng);
      const double hi = lo + 0.05 + 3.95 * unif(eng);
      const double alpha = 0.5 * unif(eng);
      const double beta = -1.0 + 2.0 * unif(eng);
      const int n = 2 + static_cast<int>(unif(eng) * 11.0);
      const int d = 1 + static_cast<int>(unif(eng) * 6.0);
      const double sigma0_sq = 4.0 * unif(eng);
      const double t_max = 1.0 + unif(eng) * (d - 1.0);
      const ShiftCheck check =
          verify_shift_equivalence(lo, hi, alpha, beta, n, d, sigma0_sq, t_max, 1e-10);
      holds = holds && check.pass;
    }
    if (!holds) failures.push_back("shift-equivalence sweep");
  }

  {  // (d) branch continuity: candidates agree at the crossover, quadratic term vanishes
    bool holds = true;
    std::string first;
    for (int n = 2; n <= 16; ++n)
      for (const double C : {0.5, 1.0, 2.0})
        for (const double sigma0_sq : {0.1, 1.0, 10.0})
          for (const auto& [m, d] : {std::pair<int, int>{1, 4}, {1, 2}, {4, 4}})
            for (const OracleVerdict& v : verify_branch_consistency(n, d, m, C, sigma0_sq))
              if (!v.pass) {
                holds = false;
                if (first.empty()) first = v.check;
              }
    if (!holds) failures.push_back("branch continuity (" + first + ")");
  }

  {  // (e) negative control: a 10% alpha perturbation must be caught
    VerifyOptions options;
    options.alpha_perturbation = 1.1;
    int caught = 0;
    for (const OracleVerdict& v : verify_suite(options))
      if (!v.pass && v.check.rfind("affine-recovery/", 0) == 0) ++caught;
    if (caught == 0) failures.push_back("negative control went undetected");
  }

  std::string detail;
  for (const std::string& f : failures) detail += (detail.empty() ? "" : "; ") + f;
  report_line(
      "oracle robustness: inequality sweeps, shift equivalence, branch continuity, "
      "negative control",
      failures.empty(), detail);
}

}  // namespace

int main() {
  criterion_gaussian_risk();
  criterion_two_level_branches();
  criterion_sparse_risk();
  criterion_verify_suite();
  criterion_randomized_exact_vs_mc();
  criterion_bernoulli_leakage();
  criterion_gaussian_leakage();
  criterion_calibration();
  criterion_scaling_slope();
  criterion_oracle_robustness();

  std::printf("acceptance: %d/%d criteria passed\n", g_total - g_failed, g_total);
  return g_failed == 0 ? 0 : 1;
}
