#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ota/config.hpp"
#include "ota/types.hpp"

namespace ota {

// One output row; mirrors the fixed v1 column set
//   model,n,d,m,P,sigma0_sq,epsilon,sigma_pri_sq,branch,risk_closed,risk_mc,
//   risk_mc_stderr,mi_bound,mi_exact,cmi_bound,trials,seed
// Absent optionals serialize as empty cells (omitted keys in JSON). An infinite
// mi_exact serializes as the token "unbounded".
struct ReportRow {
  std::string model;
  int n = 0;
  int d = 0;
  std::optional<int> m;
  double P = 0.0;
  double sigma0_sq = 0.0;
  std::optional<double> epsilon;
  std::optional<double> sigma_pri_sq;
  std::optional<int> branch;
  std::optional<double> risk_closed;
  std::optional<double> risk_mc;
  std::optional<double> risk_mc_stderr;
  std::optional<double> mi_bound;
  std::optional<double> mi_exact;
  std::optional<double> cmi_bound;
  std::optional<long long> trials;
  std::optional<std::uint64_t> seed;
};

struct Report {
  std::vector<ReportRow> rows;
  std::vector<std::string> footers;  // emitted as trailing "# ..." lines / JSON array
};

// Model column value carrying the family parameters so each row is self-describing,
// e.g. "gaussian[sigma_sq=1;B=2]", "bernoulli", "sparse_bernoulli".
std::string model_label(const ModelSpec& model);
ModelSpec parse_model_label(const std::string& label, std::optional<int> m);

// Shortest round-trip decimal rendering (deterministic across runs).
std::string format_double(double v);

std::string to_csv(const Report& report);
std::string to_json_text(const Report& report);

// path "-" writes to stdout; otherwise creates/overwrites the file. Throws IoError.
void write_report(const Report& report, const std::string& path, OutputFormat format);

// Writes pre-rendered text with the same path conventions as write_report.
void write_text(const std::string& text, const std::string& path);

// Parses a v1 CSV produced by to_csv (footer lines preserved); used by round-trip tests.
Report parse_csv(const std::string& text);

}  // namespace ota
