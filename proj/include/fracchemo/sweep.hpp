#pragma once
// Parameter sweeps on a bounded worker pool with deterministic aggregation.

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "fracchemo/audits.hpp"
#include "fracchemo/config.hpp"
#include "fracchemo/csv.hpp"
#include "fracchemo/simulate.hpp"
#include "fracchemo/svg.hpp"

namespace fracchemo {

struct SweepCell {
  double value = 0.0;
  ExitCode code = ExitCode::ok;
  std::string status;  ///< run status, or the error message of a failed cell
  double m0 = 0.0;
  double m_tau = 0.0;
  double max_linf = 0.0;
  double floor = 0.0;
  double final_mass = 0.0;
  double reacted = 0.0;
  double slope_l2 = 0.0;    ///< NaN when the decay fit does not apply
  double slope_linf = 0.0;
  std::vector<NamedVerdict> verdicts;
};

struct SweepResult {
  std::string axis;
  double tau = 0.0;
  std::vector<SweepCell> cells;
  LinearFit m_tau_fit;    ///< log m(tau) against log value
  LinearFit reacted_fit;  ///< log(m0 - m_final) against log value
  Verdict m_tau_decreasing;
  ExitCode code = ExitCode::ok;
};

/// Worker count: the requested parallelism (hardware count if 0), capped by FRACCHEMO_THREADS.
inline int sweep_workers(int requested, std::size_t cells) {
  int n = requested > 0 ? requested : int(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("FRACCHEMO_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, std::min(n, int(cells)));
}

inline SweepCell run_cell(const SweepConfig& s, double value, double tau) {
  SweepCell cell;
  cell.value = value;
  try {
    RunConfig c = sweep_cell(s, value);
    c.outputs = {};
    validate(c);
    const Trajectory tr = run(initial_state(c), c.params, c.stepper);
    cell.code = exit_code(tr.status);
    cell.status = to_string(tr.status);
    cell.m0 = tr.records.front().mass;
    cell.m_tau = mass_at(tr, tau);
    cell.floor = std::numeric_limits<double>::infinity();
    for (const auto& r : tr.records) {
      cell.max_linf = std::max(cell.max_linf, r.linf);
      cell.floor = std::min(cell.floor, r.mass);
    }
    cell.final_mass = tr.records.back().mass;
    cell.reacted = cell.m0 - cell.final_mass;
    const DecayFit l2 = decay_rate_fit(tr, DecayNorm::l2), li = decay_rate_fit(tr, DecayNorm::linf);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    cell.slope_l2 = l2.verdict.state == Verdict::State::not_applicable ? nan : l2.slope;
    cell.slope_linf = li.verdict.state == Verdict::State::not_applicable ? nan : li.slope;
    ReportSettings rs = c.report;
    rs.tau = tau;
    const BoundReport b = bound_report(tr, rs);
    for (const auto& name : s.audits)
      for (const auto& nv : b.verdicts)
        if (nv.name == name) cell.verdicts.push_back(nv);
  } catch (const ParameterError& e) {
    cell.code = ExitCode::validation;
    cell.status = e.what();
  } catch (const NumericError& e) {
    cell.code = ExitCode::nan;
    cell.status = e.what();
  } catch (const std::exception& e) {
    cell.code = ExitCode::internal;
    cell.status = e.what();
  }
  return cell;
}

/// Log-log fit over completed cells whose field exceeds floor * m0; slope is NaN
/// with fewer than two such cells.
inline LinearFit loglog_fit(const std::vector<SweepCell>& cells, double SweepCell::*field, double floor = 0.0) {
  std::vector<double> x, y;
  for (const auto& c : cells)
    if (c.code == ExitCode::ok && c.value > 0.0 && c.*field > floor * c.m0) {
      x.push_back(std::log(c.value));
      y.push_back(std::log(c.*field));
    }
  LinearFit f = fit_line(x, y);
  if (f.points < 2) f.slope = f.intercept = std::numeric_limits<double>::quiet_NaN();
  return f;
}

/// Depletion below this fraction of m0 is roundoff, not reaction.
inline constexpr double depletion_floor = 1e-10;

/// Runs every cell and aggregates in axis order once all workers have joined.
inline SweepResult run_sweep(const SweepConfig& s) {
  validate(s);
  SweepResult res;
  res.axis = s.axis;
  res.tau = s.tau > 0.0 ? s.tau : s.base.stepper.t_end;
  res.cells.resize(s.values.size());
  std::atomic<std::size_t> next{0};
  const int workers = sweep_workers(s.parallelism, s.values.size());
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < s.values.size(); i = next++) res.cells[i] = run_cell(s, s.values[i], res.tau);
      });
  }
  for (const auto& c : res.cells)
    if (severity(c.code) > severity(res.code)) res.code = c.code;
  res.m_tau_fit = loglog_fit(res.cells, &SweepCell::m_tau);
  res.reacted_fit = loglog_fit(res.cells, &SweepCell::reacted, depletion_floor);

  auto& v = res.m_tau_decreasing;
  v.regime = "m(tau) against increasing " + s.axis;
  v.state = Verdict::State::holds;
  std::vector<const SweepCell*> sorted;
  for (const auto& c : res.cells) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a->value < b->value; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->code != ExitCode::ok || sorted[i - 1]->code != ExitCode::ok) {
      v.state = Verdict::State::inconclusive;
      v.detail = "a cell did not complete";
      break;
    }
    if (!(sorted[i]->m_tau < sorted[i - 1]->m_tau)) {
      v.state = Verdict::State::violated;
      v.value = sorted[i]->value;
      v.detail = "m(tau) does not decrease at " + s.axis + " = " + format_double(sorted[i]->value);
      break;
    }
  }
  if (v.state == Verdict::State::holds) v.detail = "strictly decreasing";
  const bool depleted =
      std::any_of(res.cells.begin(), res.cells.end(), [](const SweepCell& c) { return c.reacted > depletion_floor * c.m0; });
  if (!depleted) v = not_applicable("no cell removes mass beyond roundoff");
  return res;
}

inline std::string sweep_csv(const SweepResult& r) {
  std::string out = "value,exit_code,m0,m_tau,max_linf,floor,final_mass,reacted,slope_l2,slope_linf";
  if (!r.cells.empty())
    for (const auto& nv : r.cells.front().verdicts) out += "," + nv.name;
  out += ",status\n";
  for (const auto& c : r.cells) {
    std::string line = format_double(c.value) + "," + std::to_string(int(c.code));
    for (double v : {c.m0, c.m_tau, c.max_linf, c.floor, c.final_mass, c.reacted, c.slope_l2, c.slope_linf})
      line += "," + format_double(v);
    for (const auto& nv : c.verdicts) line += "," + to_string(nv.verdict.state);
    std::string status = c.status;
    std::replace(status.begin(), status.end(), ',', ';');
    out += line + "," + status + "\n";
  }
  return out;
}

inline nlohmann::ordered_json sweep_fits_json(const SweepResult& r) {
  return {{"axis", r.axis},
          {"tau", r.tau},
          {"slope_log_m_tau", r.m_tau_fit.slope},
          {"slope_log_m_tau_points", r.m_tau_fit.points},
          {"slope_log_reacted", r.reacted_fit.slope},
          {"slope_log_reacted_points", r.reacted_fit.points},
          {"m_tau_decreasing", verdict_json(r.m_tau_decreasing)},
          {"exit_code", int(r.code)}};
}

/// Runs the sweep and writes its configured outputs.
inline SweepResult sweep(const SweepConfig& s) {
  SweepResult r = run_sweep(s);
  const std::string csv = sweep_csv(r);
  if (!s.summary_csv.empty()) write_text(s.summary_csv, csv);
  if (!s.fits.empty()) write_text(s.fits, sweep_fits_json(r).dump(2) + "\n");
  if (!s.svg.empty()) write_text(s.svg, render_plot(parse_table(csv, "sweep", false), "sweep:m_tau").svg);
  return r;
}

}  // namespace fracchemo
