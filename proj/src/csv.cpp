#include "vbjs/csv.hpp"

#include <cstdio>
#include <istream>

#include "vbjs/types.hpp"

namespace vbjs::csv {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  return out;
}

Table Table::parse(std::istream& is) {
  Table t;
  std::string line;
  int n = 0;
  bool have_header = false;
  std::size_t width = 0;
  while (std::getline(is, line)) {
    ++n;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto fields = split(s);
    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) t.index_[fields[i]] = i;
      width = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != width) {
      throw ConfigError("line " + std::to_string(n) + ": expected " + std::to_string(width) +
                        " fields, got " + std::to_string(fields.size()));
    }
    t.cells_.push_back(std::move(fields));
    t.line_no_.push_back(n);
  }
  if (!have_header) throw ConfigError("empty CSV: no header row");
  return t;
}

void Table::require(const std::vector<std::string>& cols) const {
  for (const auto& c : cols) {
    if (!has(c)) throw ConfigError("missing column '" + c + "'");
  }
}

const std::string& Table::str(std::size_t row, const std::string& col) const {
  auto it = index_.find(col);
  if (it == index_.end()) throw ConfigError("missing column '" + col + "'");
  return cells_.at(row)[it->second];
}

double Table::num(std::size_t row, const std::string& col) const {
  const std::string& s = str(row, col);
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line_no_[row]) + ": column '" + col +
                      "' is not a number: '" + s + "'");
  }
}

}  // namespace vbjs::csv
