#pragma once
// Run and sweep configurations: JSON (schemas "fracchemo-run-1" and
// "fracchemo-sweep-1"), validation and initial-condition construction.

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fracchemo/audits.hpp"
#include "fracchemo/errors.hpp"
#include "fracchemo/grid.hpp"
#include "fracchemo/integrator.hpp"
#include "fracchemo/params.hpp"

namespace fracchemo {

using Json = nlohmann::ordered_json;

inline constexpr const char* kRunSchema = "fracchemo-run-1";
inline constexpr const char* kSweepSchema = "fracchemo-sweep-1";

struct GridSpec {
  int d = 2;
  int n = 256;
  double half_width = 16.0 * std::numbers::pi;

  bool operator==(const GridSpec&) const = default;
};

struct Bump {
  double mass = 1.0;
  double width = 1.0;
  Point center{0.0, 0.0};

  bool operator==(const Bump&) const = default;
};

/// Initial condition. Gaussian bumps are normalized so each carries `mass`;
/// a ring is a Gaussian annulus of the given radius and width.
struct ICSpec {
  enum class Kind { gaussian, multi_bump, ring, checkpoint };
  Kind kind = Kind::gaussian;
  std::vector<Bump> bumps{Bump{}};  ///< gaussian uses bumps[0]
  double radius = 1.0;              ///< ring only
  std::string path;                 ///< checkpoint only
  double jitter = 0.0;              ///< seeded uniform displacement of bump centres

  bool operator==(const ICSpec&) const = default;
};

inline std::string to_string(ICSpec::Kind k) {
  switch (k) {
    case ICSpec::Kind::gaussian: return "gaussian";
    case ICSpec::Kind::multi_bump: return "multi_bump";
    case ICSpec::Kind::ring: return "ring";
    case ICSpec::Kind::checkpoint: return "checkpoint";
  }
  return "gaussian";
}

struct SvgOutput {
  std::string kind;
  std::string path;

  bool operator==(const SvgOutput&) const = default;
};

struct OutputSpec {
  std::string csv;
  std::string report;
  std::string summary;
  std::string checkpoint;
  double checkpoint_every = 0.0;  ///< 0 writes only the final checkpoint
  std::vector<SvgOutput> svg;

  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  std::string name = "run";
  GridSpec grid;
  ModelParams params;
  StepperConfig stepper;
  ICSpec initial_condition;
  OutputSpec outputs;
  ReportSettings report;
  std::uint64_t seed = 0;

  bool operator==(const RunConfig& o) const {
    return name == o.name && grid == o.grid && params == o.params && stepper == o.stepper &&
           initial_condition == o.initial_condition && outputs == o.outputs && report.c0_constant == o.report.c0_constant &&
           report.c1 == o.report.c1 && report.c2 == o.report.c2 && report.assumption_constant == o.report.assumption_constant &&
           report.tau == o.report.tau && seed == o.seed;
  }
};

struct SweepConfig {
  std::string name = "sweep";
  RunConfig base;
  std::string axis = "chi";  ///< chi, eps, alpha or m0
  std::vector<double> values;
  std::vector<std::string> audits;
  int parallelism = 0;       ///< 0: FRACCHEMO_THREADS or the hardware count
  double tau = 0.0;          ///< time of m(tau); 0 means t_end
  std::string summary_csv;
  std::string fits;          ///< JSON file with fitted exponents
  std::string svg;

  bool operator==(const SweepConfig&) const = default;
};

inline const std::set<std::string>& known_audits() {
  static const std::set<std::string> s{"mass_balance", "mass_monotone", "nonnegativity", "n0_ceiling",
                                       "c0_floor",     "ratio_l2",      "ratio_lq",      "ratio_linf",
                                       "decay_l2",     "decay_linf",    "w_inequality",  "virial_classical",
                                       "lower_bound_assumption", "psi_ceiling", "cordoba_gap"};
  return s;
}

// ------------------------------------------------------------- reading

namespace detail {

/// Reads fields from a JSON object, rejecting unknown keys and wrong types with
/// the dotted field path in the message.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw FormatError(where() + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw FormatError("field " + field(key) + " has the wrong type");
    }
  }

  const Json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw FormatError("unknown field " + field(k.c_str()));
  }

 private:
  std::string where() const { return path_.empty() ? "document" : "field " + path_; }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline Point read_point(const Json& j, const std::string& field) {
  if (!j.is_array() || j.size() < 1 || j.size() > 2) throw FormatError("field " + field + " must be an array of 1 or 2 numbers");
  Point p{0.0, 0.0};
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw FormatError("field " + field + " must contain numbers");
    p[i] = j[i].get<double>();
  }
  return p;
}

inline Bump read_bump(const Json& j, const std::string& path) {
  Bump b;
  Reader r(j, path);
  r.get("mass", b.mass);
  r.get("width", b.width);
  if (const Json* c = r.child("center")) b.center = read_point(*c, r.field("center"));
  r.finish();
  return b;
}

template <class E>
E parse_enum(const std::string& v, const std::vector<std::pair<std::string, E>>& table, const std::string& field) {
  for (const auto& [name, e] : table)
    if (name == v) return e;
  std::string opts;
  for (const auto& [name, e] : table) opts += (opts.empty() ? "" : ", ") + name;
  throw FormatError("field " + field + " has unknown value '" + v + "' (expected one of " + opts + ")");
}

inline FlowSpec read_flow(const Json& j, const std::string& path) {
  FlowSpec f;
  Reader r(j, path);
  std::string kind = "none";
  r.get("kind", kind);
  f.kind = parse_enum<FlowSpec::Kind>(kind,
                                      {{"none", FlowSpec::Kind::none},
                                       {"cellular", FlowSpec::Kind::cellular},
                                       {"shear", FlowSpec::Kind::shear},
                                       {"custom", FlowSpec::Kind::custom}},
                                      r.field("kind"));
  r.get("amplitude", f.amplitude);
  r.get("wavenumber", f.wavenumber);
  if (const Json* modes = r.child("modes")) {
    if (!modes->is_array()) throw FormatError("field " + r.field("modes") + " must be an array");
    for (std::size_t i = 0; i < modes->size(); ++i) {
      StreamMode m;
      Reader mr((*modes)[i], r.field("modes") + "[" + std::to_string(i) + "]");
      mr.get("jx", m.jx);
      mr.get("jy", m.jy);
      mr.get("cos_amp", m.cos_amp);
      mr.get("sin_amp", m.sin_amp);
      mr.finish();
      f.modes.push_back(m);
    }
  }
  r.finish();
  return f;
}

inline ModelParams read_params(const Json& j, const std::string& path) {
  ModelParams p;
  Reader r(j, path);
  r.get("alpha", p.alpha);
  r.get("chi", p.chi);
  r.get("eps", p.eps);
  r.get("q", p.q);
  r.get("gamma", p.gamma);
  r.get("beta", p.beta);
  r.get("mu", p.mu);
  if (const Json* f = r.child("flow")) p.flow = read_flow(*f, r.field("flow"));
  r.finish();
  return p;
}

inline StepperConfig read_stepper(const Json& j, const std::string& path) {
  StepperConfig c;
  Reader r(j, path);
  std::string scheme = to_string(c.scheme), policy = to_string(c.dt_policy);
  r.get("scheme", scheme);
  r.get("dt_policy", policy);
  c.scheme = parse_enum<Scheme>(scheme, {{"etdrk2", Scheme::etdrk2}, {"imex_bdf2", Scheme::imex_bdf2}}, r.field("scheme"));
  c.dt_policy = parse_enum<DtPolicy>(policy, {{"fixed", DtPolicy::fixed}, {"adaptive", DtPolicy::adaptive}}, r.field("dt_policy"));
  r.get("dt", c.dt);
  r.get("cfl_target", c.cfl_target);
  r.get("dt_min", c.dt_min);
  r.get("dt_max", c.dt_max);
  r.get("t_end", c.t_end);
  r.get("record_every", c.record_every);
  r.get("negativity_tolerance", c.negativity_tolerance);
  r.get("blowup_ceiling", c.blowup_ceiling);
  r.get("hs_order", c.hs_order);
  r.finish();
  return c;
}

inline ICSpec read_ic(const Json& j, const std::string& path) {
  ICSpec ic;
  Reader r(j, path);
  std::string kind = "gaussian";
  r.get("kind", kind);
  ic.kind = parse_enum<ICSpec::Kind>(kind,
                                     {{"gaussian", ICSpec::Kind::gaussian},
                                      {"multi_bump", ICSpec::Kind::multi_bump},
                                      {"ring", ICSpec::Kind::ring},
                                      {"checkpoint", ICSpec::Kind::checkpoint}},
                                     r.field("kind"));
  r.get("jitter", ic.jitter);
  if (ic.kind == ICSpec::Kind::multi_bump) {
    const Json* bumps = r.child("bumps");
    if (!bumps || !bumps->is_array() || bumps->empty())
      throw FormatError("field " + r.field("bumps") + " must be a non-empty array for multi_bump");
    ic.bumps.clear();
    for (std::size_t i = 0; i < bumps->size(); ++i)
      ic.bumps.push_back(read_bump((*bumps)[i], r.field("bumps") + "[" + std::to_string(i) + "]"));
  } else {
    Bump& b = ic.bumps.front();
    r.get("mass", b.mass);
    r.get("width", b.width);
    if (const Json* c = r.child("center")) b.center = read_point(*c, r.field("center"));
  }
  r.get("radius", ic.radius);
  r.get("path", ic.path);
  r.finish();
  return ic;
}

inline OutputSpec read_outputs(const Json& j, const std::string& path) {
  OutputSpec o;
  Reader r(j, path);
  r.get("csv", o.csv);
  r.get("report", o.report);
  r.get("summary", o.summary);
  r.get("checkpoint", o.checkpoint);
  r.get("checkpoint_every", o.checkpoint_every);
  if (const Json* svg = r.child("svg")) {
    if (!svg->is_array()) throw FormatError("field " + r.field("svg") + " must be an array");
    for (std::size_t i = 0; i < svg->size(); ++i) {
      SvgOutput s;
      Reader sr((*svg)[i], r.field("svg") + "[" + std::to_string(i) + "]");
      sr.get("kind", s.kind);
      sr.get("path", s.path);
      sr.finish();
      o.svg.push_back(s);
    }
  }
  r.finish();
  return o;
}

inline ReportSettings read_report(const Json& j, const std::string& path) {
  ReportSettings s;
  Reader r(j, path);
  r.get("c0_constant", s.c0_constant);
  r.get("c1", s.c1);
  r.get("c2", s.c2);
  r.get("assumption_constant", s.assumption_constant);
  r.get("tau", s.tau);
  r.finish();
  return s;
}

inline void check_schema(Reader& r, const char* expected) {
  std::string schema;
  r.get("schema", schema);
  if (schema != expected) throw FormatError("field schema must be \"" + std::string(expected) + "\", got \"" + schema + "\"");
}

inline RunConfig read_run_body(const Json& j, const std::string& path, bool with_schema) {
  RunConfig c;
  Reader r(j, path);
  if (with_schema) check_schema(r, kRunSchema);
  r.get("name", c.name);
  if (const Json* g = r.child("grid")) {
    Reader gr(*g, r.field("grid"));
    gr.get("d", c.grid.d);
    gr.get("n", c.grid.n);
    gr.get("half_width", c.grid.half_width);
    gr.finish();
  }
  if (const Json* p = r.child("params")) c.params = read_params(*p, r.field("params"));
  if (const Json* s = r.child("stepper")) c.stepper = read_stepper(*s, r.field("stepper"));
  if (const Json* ic = r.child("initial_condition")) c.initial_condition = read_ic(*ic, r.field("initial_condition"));
  if (const Json* o = r.child("outputs")) c.outputs = read_outputs(*o, r.field("outputs"));
  if (const Json* rep = r.child("report")) c.report = read_report(*rep, r.field("report"));
  r.get("seed", c.seed);
  r.finish();
  return c;
}

/// Parses text, turning syntax errors into FormatError with line and column.
inline Json parse_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw FormatError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid JSON");
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Validates every parameter combination; throws ParameterError quoting the invariant.
inline void validate(const RunConfig& c) {
  require(c.grid.d == 1 || c.grid.d == 2, "grid.d must be 1 or 2");
  require(c.grid.half_width > 0.0, "grid.half_width must be > 0");
  const Grid g(c.grid.d, c.grid.n, c.grid.half_width);
  validate(c.params);
  require(c.params.chi == 0.0 || c.grid.d == 2, "chemotaxis (chi > 0) requires a two-dimensional grid");
  validate_flow_on_grid(c.params.flow, g);
  validate(c.stepper);
  const auto& ic = c.initial_condition;
  if (ic.kind != ICSpec::Kind::checkpoint)
    for (const auto& b : ic.bumps) {
      require(b.mass > 0.0, "initial_condition mass must be > 0");
      require(b.width > 0.0, "initial_condition width must be > 0");
    }
  if (ic.kind == ICSpec::Kind::ring) require(ic.radius > 0.0 && c.grid.d == 2, "ring requires d = 2 and radius > 0");
  if (ic.kind == ICSpec::Kind::checkpoint) require(!ic.path.empty(), "checkpoint initial condition requires a path");
  require(ic.jitter >= 0.0, "initial_condition jitter must be >= 0");
  require(c.outputs.checkpoint_every >= 0.0, "outputs.checkpoint_every must be >= 0");
  require(c.report.c0_constant > 0.0 && c.report.assumption_constant > 0.0, "report constants must be > 0");
  require(c.report.c1 >= 0.0 && c.report.c2 >= 0.0, "report.c1 and report.c2 must be >= 0 (0 leaves them unset)");
  require(c.report.tau >= 0.0, "report.tau must be >= 0");
}

inline RunConfig parse_run_config(const std::string& text, const std::string& origin = "config") {
  return detail::read_run_body(detail::parse_text(text, origin), "", true);
}

inline RunConfig load_run_config(const std::string& path) { return parse_run_config(detail::read_file(path), path); }

// ------------------------------------------------------------- writing

inline Json to_json(const FlowSpec& f) {
  Json j;
  j["kind"] = to_string(f.kind);
  j["amplitude"] = f.amplitude;
  j["wavenumber"] = f.wavenumber;
  j["modes"] = Json::array();
  for (const auto& m : f.modes) j["modes"].push_back({{"jx", m.jx}, {"jy", m.jy}, {"cos_amp", m.cos_amp}, {"sin_amp", m.sin_amp}});
  return j;
}

inline Json to_json(const ModelParams& p) {
  return Json{{"alpha", p.alpha}, {"chi", p.chi}, {"eps", p.eps}, {"q", p.q}, {"gamma", p.gamma},
              {"beta", p.beta},   {"mu", p.mu},   {"flow", to_json(p.flow)}};
}

inline Json to_json(const StepperConfig& c) {
  return Json{{"scheme", to_string(c.scheme)},
              {"dt_policy", to_string(c.dt_policy)},
              {"dt", c.dt},
              {"cfl_target", c.cfl_target},
              {"dt_min", c.dt_min},
              {"dt_max", c.dt_max},
              {"t_end", c.t_end},
              {"record_every", c.record_every},
              {"negativity_tolerance", c.negativity_tolerance},
              {"blowup_ceiling", c.blowup_ceiling},
              {"hs_order", c.hs_order}};
}

inline Json to_json(const Bump& b) { return Json{{"mass", b.mass}, {"width", b.width}, {"center", {b.center[0], b.center[1]}}}; }

inline Json to_json(const ICSpec& ic) {
  Json j;
  j["kind"] = to_string(ic.kind);
  if (ic.kind == ICSpec::Kind::multi_bump) {
    j["bumps"] = Json::array();
    for (const auto& b : ic.bumps) j["bumps"].push_back(to_json(b));
  } else {
    const Json b = to_json(ic.bumps.front());
    j["mass"] = b["mass"];
    j["width"] = b["width"];
    j["center"] = b["center"];
  }
  j["radius"] = ic.radius;
  j["path"] = ic.path;
  j["jitter"] = ic.jitter;
  return j;
}

inline Json to_json(const OutputSpec& o) {
  Json j{{"csv", o.csv}, {"report", o.report}, {"summary", o.summary}, {"checkpoint", o.checkpoint},
         {"checkpoint_every", o.checkpoint_every}};
  j["svg"] = Json::array();
  for (const auto& s : o.svg) j["svg"].push_back({{"kind", s.kind}, {"path", s.path}});
  return j;
}

inline Json to_json(const ReportSettings& s) {
  return Json{{"c0_constant", s.c0_constant}, {"c1", s.c1}, {"c2", s.c2}, {"assumption_constant", s.assumption_constant},
              {"tau", s.tau}};
}

inline Json to_json(const RunConfig& c, bool with_schema = true) {
  Json j;
  if (with_schema) j["schema"] = kRunSchema;
  j["name"] = c.name;
  j["grid"] = {{"d", c.grid.d}, {"n", c.grid.n}, {"half_width", c.grid.half_width}};
  j["params"] = to_json(c.params);
  j["stepper"] = to_json(c.stepper);
  j["initial_condition"] = to_json(c.initial_condition);
  j["outputs"] = to_json(c.outputs);
  j["report"] = to_json(c.report);
  j["seed"] = c.seed;
  return j;
}

/// Pretty JSON text; doubles are written with round-trip precision.
inline std::string serialize(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

// --------------------------------------------------------------- sweeps

inline void validate(const SweepConfig& s) {
  validate(s.base);
  require(s.axis == "chi" || s.axis == "eps" || s.axis == "alpha" || s.axis == "m0", "sweep axis must be chi, eps, alpha or m0");
  require(s.values.size() >= 2, "sweep needs at least two values");
  const bool up = s.values[1] > s.values[0];
  for (std::size_t i = 1; i < s.values.size(); ++i)
    require(up ? s.values[i] > s.values[i - 1] : s.values[i] < s.values[i - 1], "sweep values must be strictly monotone");
  for (const auto& a : s.audits) require(known_audits().count(a) > 0, "unknown audit '" + a + "'");
  require(s.parallelism >= 0, "parallelism must be >= 0");
  require(s.tau >= 0.0, "tau must be >= 0");
}

inline SweepConfig parse_sweep_config(const std::string& text, const std::string& origin = "sweep") {
  const Json j = detail::parse_text(text, origin);
  SweepConfig s;
  detail::Reader r(j, "");
  detail::check_schema(r, kSweepSchema);
  r.get("name", s.name);
  const Json* base = r.child("base");
  if (!base) throw FormatError("field base is required");
  s.base = detail::read_run_body(*base, "base", false);
  r.get("axis", s.axis);
  r.get("values", s.values);
  r.get("audits", s.audits);
  r.get("parallelism", s.parallelism);
  r.get("tau", s.tau);
  r.get("summary_csv", s.summary_csv);
  r.get("fits", s.fits);
  r.get("svg", s.svg);
  r.finish();
  return s;
}

inline SweepConfig load_sweep_config(const std::string& path) { return parse_sweep_config(detail::read_file(path), path); }

inline Json to_json(const SweepConfig& s) {
  Json j;
  j["schema"] = kSweepSchema;
  j["name"] = s.name;
  j["base"] = to_json(s.base, false);
  j["axis"] = s.axis;
  j["values"] = s.values;
  j["audits"] = s.audits;
  j["parallelism"] = s.parallelism;
  j["tau"] = s.tau;
  j["summary_csv"] = s.summary_csv;
  j["fits"] = s.fits;
  j["svg"] = s.svg;
  return j;
}

inline std::string serialize(const SweepConfig& s) { return to_json(s).dump(2) + "\n"; }

/// Copy of the base config with the sweep axis set to `value`; m0 rescales every bump mass.
inline RunConfig sweep_cell(const SweepConfig& s, double value) {
  RunConfig c = s.base;
  if (s.axis == "chi") c.params.chi = value;
  else if (s.axis == "eps") c.params.eps = value;
  else if (s.axis == "alpha") c.params.alpha = value;
  else if (s.axis == "m0") {
    double total = 0.0;
    for (const auto& b : c.initial_condition.bumps) total += b.mass;
    for (auto& b : c.initial_condition.bumps) b.mass *= value / total;
  }
  return c;
}

}  // namespace fracchemo
