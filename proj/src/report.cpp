#include "ota/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

namespace ota {

namespace {

constexpr const char* kVersionLine = "# ota-report v1";
constexpr const char* kHeader =
    "model,n,d,m,P,sigma0_sq,epsilon,sigma_pri_sq,branch,risk_closed,risk_mc,"
    "risk_mc_stderr,mi_bound,mi_exact,cmi_bound,trials,seed";
constexpr int kColumns = 17;
constexpr const char* kUnboundedToken = "unbounded";

std::string cell(double v) { return format_double(v); }

std::string cell(const std::optional<double>& v) {
  if (!v.has_value()) return {};
  if (std::isinf(*v) && *v > 0.0) return kUnboundedToken;
  return format_double(*v);
}

std::string cell(const std::optional<int>& v) {
  return v.has_value() ? std::to_string(*v) : std::string{};
}

std::string cell(const std::optional<long long>& v) {
  return v.has_value() ? std::to_string(*v) : std::string{};
}

std::string cell(const std::optional<std::uint64_t>& v) {
  return v.has_value() ? std::to_string(*v) : std::string{};
}

double parse_double_cell(const std::string& text, const std::string& context) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw IoError("report parse: bad numeric cell \"" + text + "\" in " + context);
  return value;
}

std::optional<double> parse_opt_double(const std::string& text, const std::string& context) {
  if (text.empty()) return std::nullopt;
  if (text == kUnboundedToken) return std::numeric_limits<double>::infinity();
  return parse_double_cell(text, context);
}

template <typename Int>
std::optional<Int> parse_opt_int(const std::string& text, const std::string& context) {
  if (text.empty()) return std::nullopt;
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw IoError("report parse: bad integer cell \"" + text + "\" in " + context);
  return value;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

void append_json_number(nlohmann::ordered_json& obj, const char* key,
                        const std::optional<double>& v) {
  if (!v.has_value()) return;
  if (std::isinf(*v) && *v > 0.0)
    obj[key] = kUnboundedToken;
  else
    obj[key] = *v;
}

}  // namespace

std::string model_label(const ModelSpec& model) {
  switch (family_of(model)) {
    case Family::gaussian: {
      const auto& g = std::get<GaussianLocation>(model);
      return "gaussian[sigma_sq=" + format_double(g.sigma_sq) + ";B=" + format_double(g.B) + "]";
    }
    case Family::bernoulli:
      return "bernoulli";
    case Family::sparse_bernoulli:
      return "sparse_bernoulli";
  }
  throw std::logic_error("model_label: unhandled family");
}

ModelSpec parse_model_label(const std::string& label, std::optional<int> m) {
  if (label == "bernoulli") return ProductBernoulli{};
  if (label == "sparse_bernoulli") {
    SparseBernoulli model;
    model.m = m.value_or(1);
    return model;
  }
  const std::string prefix = "gaussian[sigma_sq=";
  if (label.rfind(prefix, 0) == 0 && label.back() == ']') {
    const auto semi = label.find(";B=", prefix.size());
    if (semi != std::string::npos) {
      GaussianLocation model;
      model.sigma_sq =
          parse_double_cell(label.substr(prefix.size(), semi - prefix.size()), "model label");
      model.B = parse_double_cell(
          label.substr(semi + 3, label.size() - 1 - (semi + 3)), "model label");
      return model;
    }
  }
  throw IoError("report parse: unrecognized model label \"" + label + "\"");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::logic_error("format_double: buffer too small");
  return std::string(buf.data(), ptr);
}

std::string to_csv(const Report& report) {
  std::string out = kVersionLine;
  out += '\n';
  out += kHeader;
  out += '\n';
  for (const ReportRow& row : report.rows) {
    out += row.model;
    out += ',';
    out += std::to_string(row.n);
    out += ',';
    out += std::to_string(row.d);
    out += ',';
    out += cell(row.m);
    out += ',';
    out += cell(row.P);
    out += ',';
    out += cell(row.sigma0_sq);
    out += ',';
    out += cell(row.epsilon);
    out += ',';
    out += cell(row.sigma_pri_sq);
    out += ',';
    out += cell(row.branch);
    out += ',';
    out += cell(row.risk_closed);
    out += ',';
    out += cell(row.risk_mc);
    out += ',';
    out += cell(row.risk_mc_stderr);
    out += ',';
    out += cell(row.mi_bound);
    out += ',';
    out += cell(row.mi_exact);
    out += ',';
    out += cell(row.cmi_bound);
    out += ',';
    out += cell(row.trials);
    out += ',';
    out += cell(row.seed);
    out += '\n';
  }
  for (const std::string& footer : report.footers) {
    out += "# ";
    out += footer;
    out += '\n';
  }
  return out;
}

std::string to_json_text(const Report& report) {
  nlohmann::ordered_json root;
  root["schema"] = "v1";
  root["rows"] = nlohmann::ordered_json::array();
  for (const ReportRow& row : report.rows) {
    nlohmann::ordered_json obj;
    obj["model"] = row.model;
    obj["n"] = row.n;
    obj["d"] = row.d;
    if (row.m.has_value()) obj["m"] = *row.m;
    obj["P"] = row.P;
    obj["sigma0_sq"] = row.sigma0_sq;
    append_json_number(obj, "epsilon", row.epsilon);
    append_json_number(obj, "sigma_pri_sq", row.sigma_pri_sq);
    if (row.branch.has_value()) obj["branch"] = *row.branch;
    append_json_number(obj, "risk_closed", row.risk_closed);
    append_json_number(obj, "risk_mc", row.risk_mc);
    append_json_number(obj, "risk_mc_stderr", row.risk_mc_stderr);
    append_json_number(obj, "mi_bound", row.mi_bound);
    append_json_number(obj, "mi_exact", row.mi_exact);
    append_json_number(obj, "cmi_bound", row.cmi_bound);
    if (row.trials.has_value()) obj["trials"] = *row.trials;
    if (row.seed.has_value()) obj["seed"] = *row.seed;
    root["rows"].push_back(std::move(obj));
  }
  root["footers"] = report.footers;
  return root.dump(2) + "\n";
}

void write_text(const std::string& text, const std::string& path) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout.good()) throw IoError("failed writing report to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open report file for writing: " + path);
  out << text;
  out.flush();
  if (!out.good()) throw IoError("failed writing report file: " + path);
}

void write_report(const Report& report, const std::string& path, OutputFormat format) {
  write_text(format == OutputFormat::csv ? to_csv(report) : to_json_text(report), path);
}

Report parse_csv(const std::string& text) {
  Report report;
  std::vector<std::string> lines;
  std::string::size_type start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }

  std::size_t i = 0;
  while (i < lines.size() && lines[i].empty()) ++i;
  if (i >= lines.size() || lines[i] != kVersionLine)
    throw IoError("report parse: missing version line \"" + std::string(kVersionLine) + "\"");
  ++i;
  if (i >= lines.size() || lines[i] != kHeader)
    throw IoError("report parse: missing or mismatched v1 header row");
  ++i;

  for (; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      report.footers.push_back(line.substr(2));
      continue;
    }
    if (line[0] == '#') {
      report.footers.push_back(line.substr(1));
      continue;
    }
    const std::vector<std::string> fields = split_line(line);
    if (static_cast<int>(fields.size()) != kColumns)
      throw IoError("report parse: expected " + std::to_string(kColumns) + " cells, got " +
                    std::to_string(fields.size()) + " in line " + std::to_string(i + 1));
    const std::string context = "line " + std::to_string(i + 1);
    if (fields[1].empty() || fields[2].empty())
      throw IoError("report parse: n and d are required in " + context);
    ReportRow row;
    row.model = fields[0];
    row.n = static_cast<int>(parse_opt_int<long long>(fields[1], context).value());
    row.d = static_cast<int>(parse_opt_int<long long>(fields[2], context).value());
    row.m = parse_opt_int<int>(fields[3], context);
    row.P = parse_double_cell(fields[4], context);
    row.sigma0_sq = parse_double_cell(fields[5], context);
    row.epsilon = parse_opt_double(fields[6], context);
    row.sigma_pri_sq = parse_opt_double(fields[7], context);
    row.branch = parse_opt_int<int>(fields[8], context);
    row.risk_closed = parse_opt_double(fields[9], context);
    row.risk_mc = parse_opt_double(fields[10], context);
    row.risk_mc_stderr = parse_opt_double(fields[11], context);
    row.mi_bound = parse_opt_double(fields[12], context);
    row.mi_exact = parse_opt_double(fields[13], context);
    row.cmi_bound = parse_opt_double(fields[14], context);
    row.trials = parse_opt_int<long long>(fields[15], context);
    row.seed = parse_opt_int<std::uint64_t>(fields[16], context);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace ota
