#pragma once

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace lcross {

// Shortest decimal form that round-trips to the same double. Output files are
// compared byte for byte across re-runs, so formatting must be locale-free
// and deterministic.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  // Trim ASCII whitespace on both ends.
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  double v = 0.0;
  const auto res = std::from_chars(s.data() + b, s.data() + e, v);
  if (res.ec != std::errc() || res.ptr != s.data() + e)
    throw std::runtime_error("parse_double: bad numeric field '" + std::string(s) + "'");
  return v;
}

// In-memory numeric table with named columns; backs every CSV we emit or read.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t col_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw std::runtime_error("Table: no column named '" + name + "'");
  }

  std::vector<double> col(const std::string& name) const {
    const std::size_t j = col_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(j));
    return out;
  }

  void add_row(const std::vector<double>& r) {
    if (r.size() != columns.size())
      throw std::runtime_error("Table: row width does not match header");
    rows.push_back(r);
  }

  void write_csv(const std::filesystem::path& path) const {
    std::filesystem::create_directories(path.parent_path().empty()
                                            ? std::filesystem::path(".")
                                            : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) out << ',';
      out << columns[j];
    }
    out << '\n';
    for (const auto& r : rows) {
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (j) out << ',';
        out << format_double(r[j]);
      }
      out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
  }
};

inline Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path.string());
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
        field.pop_back();
      t.columns.push_back(field);
    }
  }
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    row.reserve(t.columns.size());
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t comma = line.find(',', start);
      const std::size_t end = comma == std::string::npos ? line.size() : comma;
      row.push_back(parse_double(std::string_view(line).substr(start, end - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    t.add_row(row);
  }
  return t;
}

// Root directory for generated outputs; overridable so tests and batch runs
// can redirect without touching configs.
inline std::filesystem::path output_root() {
  if (const char* env = std::getenv("LCROSS_OUTPUT_ROOT"); env && *env)
    return std::filesystem::path(env);
  return std::filesystem::path(".");
}

}  // namespace lcross
