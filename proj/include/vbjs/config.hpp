#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vbjs/types.hpp"

namespace vbjs {

/// Flat "key = value" configuration. '#' starts a comment; blank lines are
/// ignored. Lists are comma separated. Errors carry "source:line:".
class Config {
 public:
  static Config parse(std::istream& is, const std::string& source = "<config>");
  static Config parse_string(const std::string& text, const std::string& source = "<config>");
  static Config load(const std::string& path);

  /// Command-line overrides; replaces any value read from a file.
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::string str(const std::string& key, const std::string& fallback) const;
  std::string str(const std::string& key) const;
  double num(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> nums(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> ints(const std::string& key, const std::vector<int>& fallback) const;

  /// Keys not in `known` are reported as a ConfigError naming the first one.
  void check_keys(const std::vector<std::string>& known) const;

  /// FNV-1a of canonical(); stable across platforms.
  std::uint64_t hash() const;
  std::string hash_hex() const;
  const std::map<std::string, std::string>& entries() const { return entries_; }
  /// Canonical text, one sorted "key = value" per line.
  std::string canonical() const;

 private:
  struct Where {
    std::string source;
    int line = 0;
  };
  std::string where(const std::string& key) const;

  std::map<std::string, std::string> entries_;
  std::map<std::string, Where> origin_;
};

/// "1:4" -> {1,2,3,4}; "1:2:9" -> {1,3,5,7,9}; otherwise a comma list.
std::vector<double> parse_range(const std::string& text);

}  // namespace vbjs
