#include "vbjs/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vbjs/csv.hpp"
#include "vbjs/rng.hpp"

namespace vbjs {

namespace {

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

Config Config::parse(std::istream& is, const std::string& source) {
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = csv::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = csv::trim(line.substr(0, eq));
    const std::string value = csv::trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (cfg.entries_.count(key))
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                        "' (first set on line " + std::to_string(cfg.origin_[key].line) + ")");
    cfg.entries_[key] = value;
    cfg.origin_[key] = {source, lineno};
  }
  return cfg;
}

Config Config::parse_string(const std::string& text, const std::string& source) {
  std::istringstream is(text);
  return parse(is, source);
}

Config Config::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  return parse(is, path);
}

void Config::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
  origin_[key] = {"<command line>", 0};
}

std::string Config::where(const std::string& key) const {
  auto it = origin_.find(key);
  if (it == origin_.end()) return "key '" + key + "'";
  if (it->second.line == 0) return it->second.source + ": key '" + key + "'";
  return it->second.source + ":" + std::to_string(it->second.line) + ": key '" + key + "'";
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

std::string Config::str(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

double Config::num(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  double v;
  if (!parse_double(it->second, v))
    throw ConfigError(where(key) + ": expected a number, got '" + it->second + "'");
  return v;
}

int Config::integer(const std::string& key, int fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  double v;
  if (!parse_double(it->second, v) || v != std::floor(v) || std::abs(v) > 2e9)
    throw ConfigError(where(key) + ": expected an integer, got '" + it->second + "'");
  return static_cast<int>(v);
}

bool Config::flag(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const auto& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(where(key) + ": expected true/false, got '" + v + "'");
}

std::vector<double> Config::nums(const std::string& key,
                                 const std::vector<double>& fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    return parse_range(it->second);
  } catch (const ConfigError& e) {
    throw ConfigError(where(key) + ": " + e.what());
  }
}

std::vector<int> Config::ints(const std::string& key, const std::vector<int>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  for (double v : nums(key, {})) {
    if (v != std::floor(v))
      throw ConfigError(where(key) + ": expected integers, got '" + str(key, "") + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void Config::check_keys(const std::vector<std::string>& known) const {
  for (const auto& [k, v] : entries_) {
    bool ok = false;
    for (const auto& n : known) ok = ok || n == k;
    if (!ok) throw ConfigError(where(k) + ": unknown key");
  }
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t Config::hash() const { return fnv1a(canonical()); }

std::string Config::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> out;
  const std::string t = csv::trim(text);
  if (t.empty()) return out;
  if (t.find(':') != std::string::npos) {
    std::vector<double> p;
    for (const auto& s : csv::split(t, ':')) {
      double v;
      if (!parse_double(csv::trim(s), v)) throw ConfigError("bad range '" + text + "'");
      p.push_back(v);
    }
    if (p.size() != 2 && p.size() != 3) throw ConfigError("bad range '" + text + "'");
    const double lo = p[0], hi = p.back(), step = p.size() == 3 ? p[1] : 1.0;
    if (step <= 0.0) throw ConfigError("range step must be positive in '" + text + "'");
    // index-based so that 0.05:0.05:0.95 hits the end point
    const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(lo + i * step);
    return out;
  }
  for (const auto& s : csv::split(t, ',')) {
    double v;
    if (!parse_double(csv::trim(s), v)) throw ConfigError("bad number '" + csv::trim(s) + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace vbjs
