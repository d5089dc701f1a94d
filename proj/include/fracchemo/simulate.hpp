#pragma once
// Single-run pipeline: initial condition, integration, and output files.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include "fracchemo/audits.hpp"
#include "fracchemo/checkpoint.hpp"
#include "fracchemo/config.hpp"
#include "fracchemo/csv.hpp"
#include "fracchemo/report.hpp"
#include "fracchemo/svg.hpp"

namespace fracchemo {

/// Process exit codes; each run status maps to exactly one code.
enum class ExitCode : int {
  ok = 0,
  internal = 1,
  usage = 2,
  validation = 3,
  negativity_violation = 10,
  blowup_detected = 11,
  nan = 12,
  contraction_failure = 13,
};

inline ExitCode exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return ExitCode::ok;
    case RunStatus::negativity_violation: return ExitCode::negativity_violation;
    case RunStatus::blowup_detected: return ExitCode::blowup_detected;
    case RunStatus::nan: return ExitCode::nan;
  }
  return ExitCode::internal;
}

/// Severity order used to pick the worst cell of a sweep.
inline int severity(ExitCode c) {
  switch (c) {
    case ExitCode::ok: return 0;
    case ExitCode::negativity_violation: return 1;
    case ExitCode::blowup_detected: return 2;
    case ExitCode::nan: return 3;
    case ExitCode::contraction_failure: return 4;
    case ExitCode::validation: return 5;
    case ExitCode::usage: return 6;
    case ExitCode::internal: return 7;
  }
  return 7;
}

/// Uniform [0, 1) from the top 53 bits; platform independent, unlike std distributions.
inline double unit_uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

/// Samples the configured initial condition, rescaled so each bump carries its mass exactly
/// on the grid. Jitter displaces each bump centre uniformly in [-jitter, jitter]^d.
inline Field initial_state(const RunConfig& c) {
  const Grid g(c.grid.d, c.grid.n, c.grid.half_width);
  const auto& ic = c.initial_condition;
  if (ic.kind == ICSpec::Kind::checkpoint) {
    Checkpoint ck = load_checkpoint(ic.path);
    require(ck.state.grid() == g, "checkpoint grid does not match the configured grid");
    return ck.state;
  }
  std::mt19937_64 rng(c.seed);
  Field total(g);
  for (Bump b : ic.bumps) {
    if (ic.jitter > 0.0)
      for (int a = 0; a < g.dim(); ++a) b.center[std::size_t(a)] += ic.jitter * (2.0 * unit_uniform(rng) - 1.0);
    const double s2 = b.width * b.width;
    Field f = Field::sample(g, [&](Point x) {
      const Point dxy = periodic_offset(g, x, b.center);
      const double r = std::sqrt(dxy[0] * dxy[0] + dxy[1] * dxy[1]);
      const double z = ic.kind == ICSpec::Kind::ring ? r - ic.radius : r;
      return std::exp(-0.5 * z * z / s2);
    });
    const double m = integrate(f);
    require(m > 0.0 && std::isfinite(m), "initial bump is not resolved on the grid");
    total += (b.mass / m) * f;
  }
  return total;
}

struct SimulationResult {
  Trajectory trajectory;
  BoundReport report;
  ExitCode code = ExitCode::ok;
  std::string timestamp;
};

/// Runs a validated config and writes every configured output.
inline SimulationResult simulate(const RunConfig& c) {
  validate(c);
  for (const auto& s : c.outputs.svg) {
    const PlotSpec spec = parse_plot_kind(s.kind);
    if (spec.style == PlotSpec::Style::sweep) throw FormatError("sweep plots need a sweep summary, not a run CSV");
    Table{csv_columns(), {}}.column(spec.column);
  }
  const Field rho0 = initial_state(c);
  RecordObserver observer;
  double next_ckpt = c.outputs.checkpoint_every;
  if (!c.outputs.checkpoint.empty() && c.outputs.checkpoint_every > 0.0) {
    observer = [&](double t, const Field& rho) {
      if (t + 1e-12 >= next_ckpt) {
        save_checkpoint(c.outputs.checkpoint, rho, t);
        while (next_ckpt <= t + 1e-12) next_ckpt += c.outputs.checkpoint_every;
      }
    };
  }
  SimulationResult res;
  res.trajectory = run(rho0, c.params, c.stepper, observer);
  const Trajectory& tr = res.trajectory;
  res.report = bound_report(tr, c.report);
  res.code = exit_code(tr.status);
  res.timestamp = utc_timestamp();

  const std::string csv = to_csv(tr.records);
  if (!c.outputs.csv.empty()) write_text(c.outputs.csv, csv);
  if (!c.outputs.checkpoint.empty()) save_checkpoint(c.outputs.checkpoint, tr.final_state, tr.records.back().t);
  if (!c.outputs.report.empty()) write_text(c.outputs.report, report_text(c.name, tr, res.report, res.timestamp));
  if (!c.outputs.summary.empty()) write_text(c.outputs.summary, summary_json(c.name, tr, res.report, res.timestamp).dump(2) + "\n");
  if (!c.outputs.svg.empty()) {
    const Table table = parse_table(csv);
    for (const auto& s : c.outputs.svg) write_text(s.path, render_plot(table, s.kind).svg);
  }
  return res;
}

}  // namespace fracchemo
