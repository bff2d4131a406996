#pragma once

// Minimal CSV reading and writing for numeric tables with a header row.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sphreg/model.hpp"

namespace sphreg::io {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A required column is missing; reported as a usage error by the CLI.
class MissingColumnError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::ptrdiff_t column(std::string_view name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) return static_cast<std::ptrdiff_t>(j);
    }
    return -1;
  }
};

inline std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return std::string(s.substr(a, b - a));
}

/// Splits one line on commas; double quotes group a field and "" is a literal quote.
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw CsvError("unterminated quote");
  out.push_back(trim(cur));
  return out;
}

inline CsvTable read_csv(std::istream& in, const std::string& source = "<stream>") {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    std::vector<std::string> fields;
    try {
      fields = split_csv_line(line);
    } catch (const CsvError& e) {
      throw CsvError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw CsvError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                     " fields, found " + std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw CsvError(source + ": empty file, no header row");
  return t;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path);
  return read_csv(in, path);
}

inline double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw CsvError(where + ": not a number: '" + s + "'");
  return v;
}

struct LoadedData {
  Dataset data;
  std::string response;
  std::vector<std::string> index;  // values of the index column, empty if none
};

/// Response column by name; every other column except the index is a predictor.
inline LoadedData table_to_dataset(const CsvTable& t, const std::string& response, const std::string& index_col,
                                   const std::string& source) {
  const std::ptrdiff_t ry = t.column(response);
  if (ry < 0) throw MissingColumnError("response column '" + response + "' not found in " + source);
  std::ptrdiff_t ri = -1;
  if (!index_col.empty()) {
    ri = t.column(index_col);
    if (ri < 0) throw MissingColumnError("index column '" + index_col + "' not found in " + source);
  }
  std::vector<std::size_t> pred;
  LoadedData out;
  out.response = response;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (static_cast<std::ptrdiff_t>(j) == ry || static_cast<std::ptrdiff_t>(j) == ri) continue;
    pred.push_back(j);
    out.data.names.push_back(t.header[j]);
  }
  const Eigen::Index n = static_cast<Eigen::Index>(t.rows.size());
  out.data.y.resize(n);
  out.data.X.resize(n, static_cast<Eigen::Index>(pred.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    const std::string where = source + " row " + std::to_string(i + 1);
    out.data.y(i) = parse_double(row[static_cast<std::size_t>(ry)], where);
    for (std::size_t k = 0; k < pred.size(); ++k) {
      out.data.X(i, static_cast<Eigen::Index>(k)) = parse_double(row[pred[k]], where);
    }
    if (ri >= 0) out.index.push_back(row[static_cast<std::size_t>(ri)]);
  }
  return out;
}

inline LoadedData load_dataset(const std::string& path, const std::string& response, const std::string& index_col = "") {
  return table_to_dataset(read_csv_file(path), response, index_col, path);
}

/// Shortest text that parses back to the same double (17 significant digits).
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Quotes a field that contains a comma, quote or newline.
inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Writes y then the predictors.
inline void write_dataset_csv(std::ostream& out, const Dataset& d, const std::string& response = "y") {
  out << response;
  for (Eigen::Index j = 0; j < d.p(); ++j) {
    out << ',' << (d.names.empty() ? "x" + std::to_string(j + 1) : d.names[static_cast<std::size_t>(j)]);
  }
  out << '\n';
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    out << format_double(d.y(i));
    for (Eigen::Index j = 0; j < d.p(); ++j) out << ',' << format_double(d.X(i, j));
    out << '\n';
  }
}

}  // namespace sphreg::io
