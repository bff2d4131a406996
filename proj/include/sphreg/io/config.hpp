#pragma once

// Flat key = value configuration with [section] prefixes and # comments.
// Section "[mcmc]" followed by "n_draws = 100" defines the key "mcmc.n_draws".
// Every key read is recorded with its resolved value; keys never read are
// rejected, and the resolved set hashes to a stable spec hash.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphreg/io/csv.hpp"
#include "sphreg/model.hpp"
#include "sphreg/sph_model.hpp"
#include "sphreg/synthetic.hpp"

namespace sphreg::io {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>") {
    Config c;
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string t = trim(line);
      if (t.empty()) continue;
      const std::string where = source + ":" + std::to_string(lineno);
      if (t.front() == '[') {
        if (t.back() != ']' || t.size() < 3) throw ConfigError(where + ": malformed section header");
        section = trim(std::string_view(t).substr(1, t.size() - 2));
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
      const std::string key = trim(std::string_view(t).substr(0, eq));
      if (key.empty()) throw ConfigError(where + ": empty key");
      const std::string full = section.empty() ? key : section + "." + key;
      if (c.values_.count(full)) throw ConfigError(where + ": duplicate key " + full);
      c.values_[full] = trim(std::string_view(t).substr(eq + 1));
    }
    return c;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    return parse(in, path);
  }

  static Config parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  /// Later values override earlier ones (command-line flags over the file).
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& def) {
    const auto it = values_.find(key);
    const std::string v = it == values_.end() ? def : it->second;
    used_.insert(key);
    resolved_[key] = v;
    return v;
  }

  std::string require_string(const std::string& key) {
    if (!has(key)) throw ConfigError("missing required key " + key);
    return get_string(key, "");
  }

  double get_double(const std::string& key, double def) {
    const std::string v = get_string(key, format_double(def));
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": not a number: '" + v + "'");
    resolved_[key] = format_double(out);
    return out;
  }

  std::int64_t get_int(const std::string& key, std::int64_t def) {
    const std::string v = get_string(key, std::to_string(def));
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": not an integer: '" + v + "'");
    return out;
  }

  bool get_bool(const std::string& key, bool def) {
    const std::string v = get_string(key, def ? "true" : "false");
    if (v == "true" || v == "1" || v == "yes") {
      resolved_[key] = "true";
      return true;
    }
    if (v == "false" || v == "0" || v == "no") {
      resolved_[key] = "false";
      return false;
    }
    throw ConfigError(key + ": not a boolean: '" + v + "'");
  }

  /// Distinct next path components under prefix, e.g. ids of "setting.<id>.n".
  std::vector<std::string> children(const std::string& prefix) const {
    std::set<std::string> ids;
    for (const auto& [k, v] : values_) {
      if (k.size() > prefix.size() && k.compare(0, prefix.size(), prefix) == 0) {
        const std::string rest = k.substr(prefix.size());
        ids.insert(rest.substr(0, rest.find('.')));
      }
    }
    return {ids.begin(), ids.end()};
  }

  /// Rejects unread keys that are typos: keys outside every known section, and
  /// keys in a section this command read from. Sections owned by other
  /// subcommands (e.g. [bench] during fit) are ignored, so one file can serve all.
  void reject_unknown() const {
    static const std::set<std::string> known = {"model", "mcmc",    "bench",    "setting", "design",
                                                "data",  "output",  "diagnose", "forecast"};
    std::set<std::string> owned;
    for (const auto& k : used_) owned.insert(k.substr(0, k.rfind('.')));
    std::string bad;
    for (const auto& [k, v] : values_) {
      if (used_.count(k)) continue;
      const auto dot = k.rfind('.');
      const bool typo = dot == std::string::npos || !known.count(k.substr(0, k.find('.'))) ||
                        owned.count(k.substr(0, dot));
      if (typo) bad += (bad.empty() ? "" : ", ") + k;
    }
    if (!bad.empty()) throw ConfigError("unknown config keys: " + bad);
  }

  /// Sorted "key = value" lines of every resolved key.
  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : resolved_) out += k + " = " + v + "\n";
    return out;
  }

  std::string spec_hash() const { return hex64(fnv1a(canonical())); }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
  std::map<std::string, std::string> resolved_;
};

inline PriorKind parse_prior_kind(const std::string& s) {
  if (s == "ridge") return PriorKind::Ridge;
  if (s == "spike_slab") return PriorKind::SpikeSlab;
  throw ConfigError("unknown prior '" + s + "' (expected ridge or spike_slab)");
}

/// Reads keys under prefix (e.g. "model.") into a ModelSpec.
inline ModelSpec read_model_spec(Config& c, const std::string& prefix = "model.") {
  ModelSpec m;
  m.prior = parse_prior_kind(c.get_string(prefix + "prior", "ridge"));
  ErrorModelSpec common;
  try {
    common.loss = parse_loss_kind(c.get_string(prefix + "loss", "sph"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  common.include_intercept = c.get_bool(prefix + "include_intercept", common.include_intercept);
  common.tau_mu2 = c.get_double(prefix + "tau_mu2", common.tau_mu2);
  common.include_sigma = c.get_bool(prefix + "include_sigma", common.include_sigma);
  common.a_sigma = c.get_double(prefix + "a_sigma", common.a_sigma);
  common.b_sigma = c.get_double(prefix + "b_sigma", common.b_sigma);
  common.alpha_prior = c.get_bool(prefix + "alpha_prior", common.alpha_prior);
  common.a_alpha = c.get_double(prefix + "a_alpha", common.a_alpha);
  common.b_alpha = c.get_double(prefix + "b_alpha", common.b_alpha);
  static_cast<ErrorModelSpec&>(m.ridge) = common;
  static_cast<ErrorModelSpec&>(m.spike_slab) = common;
  m.ridge.prior_precision = c.get_double(prefix + "prior_precision", m.ridge.prior_precision);
  m.spike_slab.tau2 = c.get_double(prefix + "tau2", m.spike_slab.tau2);
  m.spike_slab.a_q = c.get_double(prefix + "a_q", m.spike_slab.a_q);
  m.spike_slab.b_q = c.get_double(prefix + "b_q", m.spike_slab.b_q);
  const std::string order = c.get_string(prefix + "update_order", "fixed");
  if (order == "fixed") m.spike_slab.update_order = UpdateOrder::Fixed;
  else if (order == "shuffled") m.spike_slab.update_order = UpdateOrder::Shuffled;
  else throw ConfigError("unknown update_order '" + order + "' (expected fixed or shuffled)");
  try {
    m.common().validate_common();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return m;
}

inline McmcConfig read_mcmc(Config& c, const std::string& prefix = "mcmc.") {
  McmcConfig m;
  m.n_burnin = c.get_int(prefix + "n_burnin", m.n_burnin);
  m.n_draws = c.get_int(prefix + "n_draws", m.n_draws);
  m.slice_width = c.get_double(prefix + "slice_width", m.slice_width);
  m.slice_max_steps = static_cast<int>(c.get_int(prefix + "slice_max_steps", m.slice_max_steps));
  m.jitter_start = c.get_double(prefix + "jitter_start", m.jitter_start);
  m.jitter_max = c.get_double(prefix + "jitter_max", m.jitter_max);
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return m;
}

inline ErrorKind parse_error_kind(const std::string& s) {
  if (s == "normal") return ErrorKind::Normal;
  if (s == "t") return ErrorKind::StudentT;
  if (s == "mix_cauchy") return ErrorKind::MixNormalCauchy;
  if (s == "mix_wide_normal") return ErrorKind::MixNormalWideNormal;
  if (s == "mix_uniform") return ErrorKind::MixNormalUniform;
  throw ConfigError("unknown error distribution '" + s +
                    "' (expected normal, t, mix_cauchy, mix_wide_normal or mix_uniform)");
}

/// A simulation setting with the prior the bench fits under it.
struct BenchSetting {
  SimSetting sim;
  PriorKind prior = PriorKind::Ridge;
};

/// Reads "setting.<id>.*" keys.
inline BenchSetting read_setting(Config& c, const std::string& id) {
  const std::string p = "setting." + id + ".";
  BenchSetting b;
  SimSetting& s = b.sim;
  s.id = id;
  s.n = c.get_int(p + "n", s.n);
  s.p = c.get_int(p + "p", s.p);
  s.rho_eps = c.get_double(p + "rho_eps", s.rho_eps);
  s.rho_x = c.get_double(p + "rho_x", s.rho_x);
  s.rho_x_cross = c.get_double(p + "rho_x_cross", s.rho_x_cross);
  s.error.kind = parse_error_kind(c.get_string(p + "error", "normal"));
  s.error.df = c.get_double(p + "df", s.error.df);
  s.error.weight = c.get_double(p + "weight", s.error.weight);
  s.error.scale = c.get_double(p + "scale", s.error.scale);
  const std::string beta = c.get_string(p + "beta", "dense");
  if (beta == "dense") s.beta_pattern = BetaPattern::Dense;
  else if (beta == "sparse") s.beta_pattern = BetaPattern::Sparse;
  else throw ConfigError(p + "beta: expected dense or sparse");
  b.prior = parse_prior_kind(c.get_string(p + "prior", "ridge"));
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return b;
}

inline std::vector<BenchSetting> read_settings(Config& c) {
  std::vector<BenchSetting> out;
  for (const auto& id : c.children("setting.")) out.push_back(read_setting(c, id));
  if (out.empty()) throw ConfigError("no [setting.<id>] sections found");
  return out;
}

}  // namespace sphreg::io
