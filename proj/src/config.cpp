#include "ota/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ota {

namespace {

using nlohmann::json;

[[noreturn]] void fail_field(const std::string& origin, const std::string& field,
                             const std::string& what) {
  throw ConfigError(origin + ": field \"" + field + "\": " + what);
}

const json* find_member(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require_object(const json& parent, const char* key, const std::string& origin) {
  const json* member = find_member(parent, key);
  if (member == nullptr) fail_field(origin, key, "required section is missing");
  if (!member->is_object()) fail_field(origin, key, "must be an object");
  return *member;
}

void reject_unknown(const json& obj, const std::string& section,
                    std::initializer_list<const char*> allowed, const std::string& origin) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) fail_field(origin, section + "." + item.key(), "unknown field");
  }
}

double get_double(const json& obj, const std::string& section, const char* key,
                  const std::string& origin) {
  const json* member = find_member(obj, key);
  const std::string path = section + "." + key;
  if (member == nullptr) fail_field(origin, path, "required field is missing");
  if (!member->is_number()) fail_field(origin, path, "must be a number");
  return member->get<double>();
}

double get_double_or(const json& obj, const std::string& section, const char* key,
                     double fallback, const std::string& origin) {
  if (find_member(obj, key) == nullptr) return fallback;
  return get_double(obj, section, key, origin);
}

long long get_integer(const json& obj, const std::string& section, const char* key,
                      const std::string& origin) {
  const json* member = find_member(obj, key);
  const std::string path = section + "." + key;
  if (member == nullptr) fail_field(origin, path, "required field is missing");
  if (!member->is_number_integer()) fail_field(origin, path, "must be an integer");
  return member->get<long long>();
}

long long get_integer_or(const json& obj, const std::string& section, const char* key,
                         long long fallback, const std::string& origin) {
  if (find_member(obj, key) == nullptr) return fallback;
  return get_integer(obj, section, key, origin);
}

std::string get_string(const json& obj, const std::string& section, const char* key,
                       const std::string& origin) {
  const json* member = find_member(obj, key);
  const std::string path = section + "." + key;
  if (member == nullptr) fail_field(origin, path, "required field is missing");
  if (!member->is_string()) fail_field(origin, path, "must be a string");
  return member->get<std::string>();
}

ModelSpec parse_model_section(const json& section, const std::string& origin) {
  reject_unknown(section, "model", {"family", "sigma_sq", "B", "m"}, origin);
  const std::string family = get_string(section, "model", "family", origin);
  if (family == "gaussian") {
    if (find_member(section, "m") != nullptr)
      fail_field(origin, "model.m", "not a gaussian-family parameter");
    GaussianLocation model;
    model.sigma_sq = get_double_or(section, "model", "sigma_sq", model.sigma_sq, origin);
    model.B = get_double_or(section, "model", "B", model.B, origin);
    return model;
  }
  for (const char* key : {"sigma_sq", "B"})
    if (find_member(section, key) != nullptr)
      fail_field(origin, std::string("model.") + key, "only valid for the gaussian family");
  if (family == "bernoulli") {
    if (find_member(section, "m") != nullptr)
      fail_field(origin, "model.m", "only valid for the sparse_bernoulli family");
    return ProductBernoulli{};
  }
  if (family == "sparse_bernoulli") {
    SparseBernoulli model;
    const long long m = get_integer_or(section, "model", "m", model.m, origin);
    if (m < 1 || m > 1'000'000'000) fail_field(origin, "model.m", "must be a positive integer");
    model.m = static_cast<int>(m);
    return model;
  }
  fail_field(origin, "model.family",
             "unknown family \"" + family + "\" (expected gaussian, bernoulli, or sparse_bernoulli)");
}

const char* family_token(Family family) {
  switch (family) {
    case Family::gaussian: return "gaussian";
    case Family::bernoulli: return "bernoulli";
    case Family::sparse_bernoulli: return "sparse_bernoulli";
  }
  return "?";
}

}  // namespace

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError("field \"output.format\": unknown format \"" + name +
                    "\" (expected csv or json)");
}

std::vector<double> ExperimentConfig::epsilon_list(bool fill_default) const {
  if (!epsilons.empty()) return epsilons;
  if (epsilon.has_value()) return {*epsilon};
  if (fill_default) return kDefaultEpsilons;
  return {};
}

std::vector<int> ExperimentConfig::n_list(bool fill_default_sweep) const {
  if (!sweep_n.empty()) return sweep_n;
  if (fill_default_sweep) return kDefaultSweepN;
  return {system.n};
}

void ExperimentConfig::validate() const {
  system.validate();
  validate_model(model, system);
  if (epsilon.has_value() && !(*epsilon > 0.0 && std::isfinite(*epsilon)))
    throw ConfigError("field \"scheme.epsilon\": must be a positive finite number");
  for (const double eps : epsilons)
    if (!(eps > 0.0 && std::isfinite(eps)))
      throw ConfigError("field \"run.epsilons\": entries must be positive finite numbers");
  for (const int n : sweep_n)
    if (n < 1) throw ConfigError("field \"run.sweep_n\": entries must be at least 1");
  if (trials != 0 && trials < 2)
    throw ConfigError("field \"run.trials\": must be 0 (skip sampling) or at least 2");
  if (out_path.empty()) throw ConfigError("field \"output.path\": must not be empty");
}

ExperimentConfig parse_config(const std::string& json_text, const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw ConfigError(origin + ": " + err.what());  // includes the byte offset
  }
  if (!root.is_object()) throw ConfigError(origin + ": top-level value must be an object");
  reject_unknown(root, "(top level)", {"model", "system", "scheme", "run", "output"}, origin);

  ExperimentConfig out;
  out.model = parse_model_section(require_object(root, "model", origin), origin);

  {
    const json& section = require_object(root, "system", origin);
    reject_unknown(section, "system", {"n", "d", "s", "P", "sigma0_sq"}, origin);
    const long long n = get_integer(section, "system", "n", origin);
    const long long d = get_integer(section, "system", "d", origin);
    const long long s = get_integer_or(section, "system", "s", d, origin);
    if (n < 1 || n > 1'000'000'000) fail_field(origin, "system.n", "must be a positive integer");
    if (d < 1 || d > 1'000'000'000) fail_field(origin, "system.d", "must be a positive integer");
    if (s < 1 || s > 1'000'000'000) fail_field(origin, "system.s", "must be a positive integer");
    out.system.n = static_cast<int>(n);
    out.system.d = static_cast<int>(d);
    out.system.s = static_cast<int>(s);
    out.system.P = get_double(section, "system", "P", origin);
    out.system.sigma0_sq = get_double(section, "system", "sigma0_sq", origin);
  }

  if (const json* section = find_member(root, "scheme")) {
    if (!section->is_object()) fail_field(origin, "scheme", "must be an object");
    reject_unknown(*section, "scheme", {"family", "epsilon"}, origin);
    if (find_member(*section, "family") != nullptr) {
      const std::string family = get_string(*section, "scheme", "family", origin);
      if (family != family_token(family_of(out.model)))
        fail_field(origin, "scheme.family",
                   "\"" + family + "\" does not match model family \"" +
                       family_token(family_of(out.model)) + "\"");
    }
    if (find_member(*section, "epsilon") != nullptr)
      out.epsilon = get_double(*section, "scheme", "epsilon", origin);
  }

  if (const json* section = find_member(root, "run")) {
    if (!section->is_object()) fail_field(origin, "run", "must be an object");
    reject_unknown(*section, "run", {"trials", "seed", "sweep_n", "epsilons"}, origin);
    if (find_member(*section, "trials") != nullptr) {
      out.trials = get_integer(*section, "run", "trials", origin);
      out.trials_set = true;
    }
    if (const json* seed = find_member(*section, "seed")) {
      if (!seed->is_number_integer() || (seed->is_number_integer() && !seed->is_number_unsigned() &&
                                         seed->get<long long>() < 0))
        fail_field(origin, "run.seed", "must be a non-negative integer");
      out.system.master_seed = seed->get<std::uint64_t>();
    }
    if (const json* sweep = find_member(*section, "sweep_n")) {
      if (!sweep->is_array()) fail_field(origin, "run.sweep_n", "must be an array of integers");
      for (const json& entry : *sweep) {
        if (!entry.is_number_integer())
          fail_field(origin, "run.sweep_n", "must be an array of integers");
        out.sweep_n.push_back(static_cast<int>(entry.get<long long>()));
      }
    }
    if (const json* eps = find_member(*section, "epsilons")) {
      if (!eps->is_array()) fail_field(origin, "run.epsilons", "must be an array of numbers");
      for (const json& entry : *eps) {
        if (!entry.is_number()) fail_field(origin, "run.epsilons", "must be an array of numbers");
        out.epsilons.push_back(entry.get<double>());
      }
    }
  }

  if (const json* section = find_member(root, "output")) {
    if (!section->is_object()) fail_field(origin, "output", "must be an object");
    reject_unknown(*section, "output", {"path", "format"}, origin);
    if (find_member(*section, "path") != nullptr)
      out.out_path = get_string(*section, "output", "path", origin);
    if (find_member(*section, "format") != nullptr) {
      try {
        out.format = parse_format(get_string(*section, "output", "format", origin));
      } catch (const ConfigError& err) {
        throw ConfigError(origin + ": " + err.what());
      }
    }
  }

  out.validate();
  return out;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading config file: " + path);
  return parse_config(buffer.str(), path);
}

}  // namespace ota
