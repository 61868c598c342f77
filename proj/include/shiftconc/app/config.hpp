#pragma once

// Experiment configuration: a sectioned key/value file ([function],
// [population], [method]) read either from INI text or from the
// "parameters" object of a previously written JSON report.
//
// Every key a command reads is recorded with its resolved value (defaults
// included), and that record is what reports embed.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "shiftconc/additive.hpp"
#include "shiftconc/error.hpp"

namespace shiftconc::app {

using nlohmann::json;

[[noreturn]] inline void config_error(const std::string& what) { fail(ErrorKind::config_parse, what); }

inline const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"function", {"kind", "rule", "modulus", "residue", "entries", "t"}},
      {"population", {"type", "x", "a", "N", "ladder"}},
      {"method",
       {"h", "h_min", "h_max", "h_points", "probes", "functional", "w", "z", "y", "delta", "A", "nodes",
        "grid_half_points", "refine_candidates", "exclude_q", "D", "r", "max_modulus", "w_exponent", "cutoff",
        "flag_factor", "pair_budget", "scan_budget", "keep_samples", "write_tables", "seed"}},
  };
  return keys;
}

class ExperimentConfig {
 public:
  using Section = std::map<std::string, std::string>;

  ExperimentConfig() = default;

  static ExperimentConfig from_ini_text(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
      boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      config_error(std::string("malformed config: ") + e.message() + " at line " + std::to_string(e.line()));
    }
    ExperimentConfig cfg;
    for (const auto& [section, body] : tree) {
      if (body.empty()) config_error("key '" + section + "' appears outside any section");
      for (const auto& [key, value] : body) cfg.set(section, key, value.get_value<std::string>());
    }
    return cfg;
  }

  // Accepts the "parameters" object of a report, or a bare object of sections.
  static ExperimentConfig from_json(const json& doc) {
    const json& params = doc.contains("parameters") ? doc.at("parameters") : doc;
    if (!params.is_object()) config_error("JSON config must be an object of sections");
    ExperimentConfig cfg;
    for (const auto& [section, body] : params.items()) {
      if (!body.is_object()) config_error("JSON section '" + section + "' must be an object");
      for (const auto& [key, value] : body.items()) {
        cfg.set(section, key, value.is_string() ? value.get<std::string>() : value.dump());
      }
    }
    return cfg;
  }

  static ExperimentConfig from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    if (path.extension() == ".json") {
      try {
        return from_json(json::parse(buf.str()));
      } catch (const json::exception& e) {
        config_error(std::string("malformed JSON config: ") + e.what());
      }
    }
    return from_ini_text(buf.str());
  }

  void set(const std::string& section, const std::string& key, const std::string& value) {
    const auto& allowed = allowed_keys();
    auto sec = allowed.find(section);
    if (sec == allowed.end()) config_error("unknown section [" + section + "]");
    if (!sec->second.count(key)) config_error("unknown key '" + key + "' in [" + section + "]");
    raw_[section][key] = value;
  }

  bool has(const std::string& section, const std::string& key) const {
    auto it = raw_.find(section);
    return it != raw_.end() && it->second.count(key) != 0;
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    auto it = raw_.find(section);
    if (it == raw_.end()) return std::nullopt;
    auto kt = it->second.find(key);
    if (kt == it->second.end()) return std::nullopt;
    return kt->second;
  }

  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::optional<std::uint64_t> fallback = std::nullopt) {
    const auto text = raw(section, key);
    std::uint64_t v = 0;
    if (!text) {
      if (!fallback) config_error("missing required key '" + key + "' in [" + section + "]");
      v = *fallback;
    } else {
      v = parse_u64(*text, section, key);
    }
    resolved_[section][key] = v;
    return v;
  }

  std::int64_t get_i64(const std::string& section, const std::string& key,
                       std::optional<std::int64_t> fallback = std::nullopt) {
    const auto text = raw(section, key);
    std::int64_t v = 0;
    if (!text) {
      if (!fallback) config_error("missing required key '" + key + "' in [" + section + "]");
      v = *fallback;
    } else {
      const auto t = trim(*text);
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc() || ptr != t.data() + t.size()) bad_value(section, key, *text, "an integer");
    }
    resolved_[section][key] = v;
    return v;
  }

  double get_double(const std::string& section, const std::string& key, std::optional<double> fallback = std::nullopt) {
    const auto text = raw(section, key);
    double v = 0.0;
    if (!text) {
      if (!fallback) config_error("missing required key '" + key + "' in [" + section + "]");
      v = *fallback;
    } else {
      v = parse_double(*text, section, key);
    }
    resolved_[section][key] = v;
    return v;
  }

  std::optional<std::uint64_t> get_optional_u64(const std::string& section, const std::string& key) {
    if (!has(section, key)) return std::nullopt;
    return get_u64(section, key);
  }

  std::optional<double> get_optional_double(const std::string& section, const std::string& key) {
    if (!has(section, key)) return std::nullopt;
    return get_double(section, key);
  }

  std::string get_string(const std::string& section, const std::string& key,
                         std::optional<std::string> fallback = std::nullopt) {
    const auto text = raw(section, key);
    std::string v;
    if (!text) {
      if (!fallback) config_error("missing required key '" + key + "' in [" + section + "]");
      v = *fallback;
    } else {
      v = trim(*text);
    }
    resolved_[section][key] = v;
    return v;
  }

  bool get_bool(const std::string& section, const std::string& key, bool fallback) {
    const auto text = get_string(section, key, fallback ? "true" : "false");
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    bad_value(section, key, text, "a boolean");
  }

  std::vector<std::uint64_t> get_u64_list(const std::string& section, const std::string& key) {
    const auto text = get_string(section, key);
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_u64(item, section, key));
    if (out.empty()) bad_value(section, key, text, "a comma-separated integer list");
    return out;
  }

  // The additive function described by [function].
  AdditiveFunctionSpec function_spec() {
    const auto kind_text = get_string("function", "kind", "strongly-additive");
    AdditiveKind kind;
    if (kind_text == "strongly-additive") {
      kind = AdditiveKind::strongly_additive;
    } else if (kind_text == "completely-additive") {
      kind = AdditiveKind::completely_additive;
    } else if (kind_text == "prime-power-table") {
      kind = AdditiveKind::prime_power_table;
    } else {
      bad_value("function", "kind", kind_text, "strongly-additive, completely-additive or prime-power-table");
    }
    const auto rule_text = get_string("function", "rule", kind == AdditiveKind::prime_power_table ? "custom" : "zero");
    PrimeRule rule;
    if (rule_text == "zero") {
      rule.kind = PrimeRuleKind::zero;
    } else if (rule_text == "constant-one" || rule_text == "omega") {
      rule.kind = PrimeRuleKind::constant_one;
    } else if (rule_text == "log-prime") {
      rule.kind = PrimeRuleKind::log_prime;
    } else if (rule_text == "residue-indicator") {
      rule.kind = PrimeRuleKind::residue_indicator;
      rule.modulus = get_u64("function", "modulus");
      rule.residue = get_u64("function", "residue");
      if (rule.modulus == 0 || rule.residue >= rule.modulus) {
        config_error("residue-indicator needs modulus >= 1 and 0 <= residue < modulus");
      }
    } else if (rule_text == "reciprocal") {
      rule.kind = PrimeRuleKind::reciprocal;
    } else if (rule_text == "custom") {
      rule.kind = PrimeRuleKind::custom;
    } else {
      bad_value("function", "rule", rule_text,
                "zero, constant-one, log-prime, residue-indicator, reciprocal or custom");
    }
    std::map<AdditiveFunctionSpec::Key, double> entries;
    if (has("function", "entries")) {
      const auto text = get_string("function", "entries");
      std::stringstream ss(text);
      std::string triple;
      while (std::getline(ss, triple, ';')) {
        if (trim(triple).empty()) continue;
        std::stringstream ts(triple);
        std::string p, k, v;
        if (!std::getline(ts, p, ':') || !std::getline(ts, k, ':') || !std::getline(ts, v)) {
          bad_value("function", "entries", triple, "p:k:value triples separated by ';'");
        }
        const auto pk = std::make_pair(parse_u64(p, "function", "entries"),
                                       static_cast<unsigned>(parse_u64(k, "function", "entries")));
        if (pk.first < 2 || pk.second < 1) bad_value("function", "entries", triple, "p >= 2 and k >= 1");
        if (!entries.emplace(pk, parse_double(v, "function", "entries")).second) {
          bad_value("function", "entries", triple, "each (p, k) at most once");
        }
      }
    }
    try {
      return AdditiveFunctionSpec(kind, rule, std::move(entries));
    } catch (const Error& e) {
      config_error(e.what());
    }
  }

  const json& resolved() const { return resolved_; }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  [[noreturn]] static void bad_value(const std::string& section, const std::string& key, const std::string& text,
                                     const std::string& expected) {
    config_error("[" + section + "] " + key + " = '" + text + "': expected " + expected);
  }

  static std::uint64_t parse_u64(const std::string& text, const std::string& section, const std::string& key) {
    const auto t = trim(text);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
      bad_value(section, key, text, "a nonnegative integer");
    }
    return v;
  }

  static double parse_double(const std::string& text, const std::string& section, const std::string& key) {
    const auto t = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
      bad_value(section, key, text, "a finite real number");
    }
    return v;
  }

  std::map<std::string, Section> raw_;
  json resolved_ = json::object();
};

}  // namespace shiftconc::app
