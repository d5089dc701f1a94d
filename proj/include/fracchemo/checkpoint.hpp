#pragma once
// Checkpoint files: a magic line, one line of JSON metadata, then one hexfloat
// value per grid point. Hexfloats make the round trip bit-exact.

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "fracchemo/errors.hpp"
#include "fracchemo/grid.hpp"
#include "fracchemo/params.hpp"

namespace fracchemo {

inline constexpr const char* kCheckpointMagic = "FRACCHEMO-CKPT-1";

struct Checkpoint {
  Field state{Grid(1, 16, 1.0)};
  double t = 0.0;
};

inline std::string checkpoint_text(const Field& rho, double t) {
  const Grid& g = rho.grid();
  nlohmann::ordered_json meta{{"d", g.dim()}, {"n", g.n()}, {"half_width", g.half_width()}, {"t", t}, {"count", rho.size()}};
  std::string out = std::string(kCheckpointMagic) + "\n" + meta.dump() + "\n";
  char buf[40];
  for (double v : rho.values()) {
    std::snprintf(buf, sizeof buf, "%a\n", v);
    out += buf;
  }
  return out;
}

inline void save_checkpoint(const std::string& path, const Field& rho, double t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << checkpoint_text(rho, t);
  if (!out) throw FormatError("write failed for " + path);
}

inline Checkpoint parse_checkpoint(const std::string& text, const std::string& origin = "checkpoint") {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointMagic) throw FormatError(origin + ": not a checkpoint file");
  if (!std::getline(in, line)) throw FormatError(origin + ": missing metadata");
  nlohmann::json meta;
  int d = 0, n = 0;
  double L = 0.0, t = 0.0;
  std::size_t count = 0;
  try {
    meta = nlohmann::json::parse(line);
    d = meta.at("d").get<int>();
    n = meta.at("n").get<int>();
    L = meta.at("half_width").get<double>();
    t = meta.at("t").get<double>();
    count = meta.at("count").get<std::size_t>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(origin + ":2: malformed metadata");
  }
  Grid g = [&] {
    try {
      return Grid(d, n, L);
    } catch (const ParameterError& e) {
      throw FormatError(origin + ": invalid grid in metadata: " + e.what());
    }
  }();
  if (count != g.size()) throw FormatError(origin + ": count does not match the grid");
  std::vector<double> values;
  values.reserve(count);
  std::size_t lineno = 2;
  while (values.size() < count && std::getline(in, line)) {
    ++lineno;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (line.empty() || *end != '\0') throw FormatError(origin + ":" + std::to_string(lineno) + ": bad value");
    values.push_back(v);
  }
  if (values.size() != count) throw FormatError(origin + ": truncated data");
  return {Field(g, std::move(values)), t};
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str(), path);
}

}  // namespace fracchemo
