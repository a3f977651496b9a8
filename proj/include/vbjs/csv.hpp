#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace vbjs::csv {

/// Shortest round-trip representation of a double ("%.17g").
std::string fmt(double v);

/// Parsed CSV with a header row. Lines starting with '#' are skipped.
class Table {
 public:
  static Table parse(std::istream& is);

  std::size_t rows() const { return cells_.size(); }
  bool has(const std::string& col) const { return index_.count(col) != 0; }
  /// Throws ConfigError naming the column if it is absent.
  void require(const std::vector<std::string>& cols) const;
  double num(std::size_t row, const std::string& col) const;
  const std::string& str(std::size_t row, const std::string& col) const;

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> cells_;
  std::vector<int> line_no_;
};

std::vector<std::string> split(const std::string& line, char sep = ',');
std::string trim(const std::string& s);

}  // namespace vbjs::csv
