#pragma once
// Diagnostics CSV: fixed header, one row per record, %.17g values.

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fracchemo/diagnostics.hpp"
#include "fracchemo/errors.hpp"

namespace fracchemo {

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"t",    "mass",    "l2",  "lq",      "linf",              "hs",
                                             "m_beta", "w_gamma", "m2", "min_rho", "reaction_integral", "dt_used"};
  return cols;
}

inline std::string csv_header() {
  std::string h;
  for (const auto& c : csv_columns()) h += (h.empty() ? "" : ",") + c;
  return h;
}

inline std::vector<double> record_values(const DiagnosticsRecord& r) {
  return {r.t, r.mass, r.l2, r.lq, r.linf, r.hs, r.m_beta, r.w_gamma, r.m2, r.min_rho, r.reaction_integral, r.dt_used};
}

inline DiagnosticsRecord record_from_values(const std::vector<double>& v) {
  DiagnosticsRecord r;
  r.t = v[0];
  r.mass = v[1];
  r.l2 = v[2];
  r.lq = v[3];
  r.linf = v[4];
  r.hs = v[5];
  r.m_beta = v[6];
  r.w_gamma = v[7];
  r.m2 = v[8];
  r.min_rho = v[9];
  r.reaction_integral = v[10];
  r.dt_used = v[11];
  return r;
}

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string to_csv(const std::vector<DiagnosticsRecord>& records) {
  std::string out = csv_header() + "\n";
  for (const auto& r : records) {
    std::string line;
    for (double v : record_values(r)) line += (line.empty() ? "" : ",") + format_double(v);
    out += line + "\n";
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
  if (!out) throw FormatError("write failed for " + path);
}

/// Generic numeric table: header names plus rows.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw FormatError("unknown column '" + name + "'");
  }
  std::vector<double> values(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r[c]);
    return v;
  }
};

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

/// Parses a numeric table. Non-strict parsing maps non-numeric cells to NaN.
inline Table parse_table(const std::string& text, const std::string& origin = "csv", bool strict = true) {
  std::istringstream in(text);
  std::string line;
  Table t;
  std::size_t lineno = 0;
  do {
    if (!std::getline(in, line)) throw FormatError(origin + ": empty file");
    ++lineno;
  } while (!line.empty() && line[0] == '#');
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.columns = split(line, ',');
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.columns.size())
      throw FormatError(origin + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) + " fields");
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      const bool ok = !c.empty() && *end == '\0';
      if (!ok && strict) throw FormatError(origin + ":" + std::to_string(lineno) + ": bad number '" + c + "'");
      row.push_back(ok ? v : std::numeric_limits<double>::quiet_NaN());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table load_table(const std::string& path, bool strict = true) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_table(ss.str(), path, strict);
}

/// Reads a diagnostics CSV; the header must match csv_header() exactly.
inline std::vector<DiagnosticsRecord> parse_csv(const std::string& text, const std::string& origin = "csv") {
  const Table t = parse_table(text, origin);
  if (t.columns != csv_columns()) throw FormatError(origin + ": header does not match the diagnostics schema");
  std::vector<DiagnosticsRecord> out;
  for (const auto& r : t.rows) out.push_back(record_from_values(r));
  return out;
}

}  // namespace fracchemo
