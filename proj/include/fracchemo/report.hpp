#pragma once
// Human-readable bound report and machine-readable JSON summary of a run.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <string>

#include "fracchemo/audits.hpp"
#include "fracchemo/csv.hpp"

namespace fracchemo {

/// UTC timestamp, ISO 8601. Appears only in reports and summaries, never in CSV.
inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

inline nlohmann::ordered_json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

inline std::string bound_line(const std::string& name, const BoundValue& b) {
  if (!b.applicable) return name + ": not applicable (" + b.regime + ")\n";
  return name + " = " + format_double(b.value) + " [" + b.regime + "]\n";
}

}  // namespace detail

inline std::string report_text(const std::string& name, const Trajectory& tr, const BoundReport& b,
                               const std::string& timestamp) {
  std::string s;
  s += "fracchemo run report: " + name + "\n";
  s += "generated: " + timestamp + "\n";
  s += "status: " + to_string(b.status);
  if (b.status != RunStatus::completed) s += " at t = " + format_double(b.status_time);
  s += "\n";
  if (!tr.message.empty()) s += "message: " + tr.message + "\n";
  s += "steps: " + std::to_string(tr.steps) + ", records: " + std::to_string(tr.records.size()) + "\n\n";
  s += "bounds\n";
  s += detail::bound_line("  N0 (L^inf ceiling)", b.n0);
  s += detail::bound_line("  C0 (mass floor, configured constant)", b.c0_lower);
  if (b.psi.applicable)
    s += "  upper mass bound at tau = " + format_double(b.psi_tau) + ": psi = " + format_double(b.psi.psi) +
         ", bound = " + format_double(b.psi.bound) + " [" + b.psi.regime + "]\n";
  else
    s += "  upper mass bound: not applicable (" + b.psi.regime + ")\n";
  s += "  virial slope 4 m0 (1 - chi m0 / 8 pi) = " + format_double(b.virial_slope) + "\n\n";
  s += "observed\n";
  s += "  max L^inf = " + format_double(b.max_linf) + "\n";
  s += "  min mass = " + format_double(b.min_mass) + "\n";
  s += "  final mass = " + format_double(b.final_mass) + "\n";
  s += "  m(tau) = " + format_double(b.mass_at_tau) + "\n";
  s += "  min rho = " + format_double(b.min_rho) + "\n";
  s += "  lim m = " + format_double(b.lim_m.value) + " at t = " + format_double(b.lim_m.time) +
       (b.lim_m.converged ? " (|dm/dt| < 1e-6 m0)" : " (t_end reached before |dm/dt| < 1e-6 m0)") + "\n\n";
  s += "audits\n";
  for (const auto& nv : b.verdicts) {
    s += "  " + nv.name + ": " + to_string(nv.verdict.state);
    if (nv.verdict.state == Verdict::State::violated) s += " at t = " + format_double(nv.verdict.time);
    if (!nv.verdict.detail.empty()) s += " (" + nv.verdict.detail + ")";
    s += "\n";
  }
  return s;
}

inline nlohmann::ordered_json verdict_json(const Verdict& v) {
  return {{"state", to_string(v.state)},
          {"time", detail::finite_or_null(v.time)},
          {"value", detail::finite_or_null(v.value)},
          {"regime", v.regime},
          {"detail", v.detail}};
}

inline nlohmann::ordered_json summary_json(const std::string& name, const Trajectory& tr, const BoundReport& b,
                                           const std::string& timestamp) {
  using detail::finite_or_null;
  nlohmann::ordered_json j;
  j["name"] = name;
  j["generated"] = timestamp;
  j["status"] = to_string(b.status);
  j["status_time"] = b.status_time;
  j["steps"] = tr.steps;
  j["bounds"] = {{"n0", b.n0.applicable ? finite_or_null(b.n0.value) : nullptr},
                 {"c0", b.c0_lower.applicable ? finite_or_null(b.c0_lower.value) : nullptr},
                 {"psi", b.psi.applicable ? finite_or_null(b.psi.psi) : nullptr},
                 {"mass_ceiling", b.psi.applicable ? finite_or_null(b.psi.bound) : nullptr},
                 {"tau", b.psi_tau},
                 {"virial_slope", b.virial_slope}};
  j["observed"] = {{"max_linf", finite_or_null(b.max_linf)},
                   {"min_mass", finite_or_null(b.min_mass)},
                   {"final_mass", finite_or_null(b.final_mass)},
                   {"mass_at_tau", finite_or_null(b.mass_at_tau)},
                   {"min_rho", finite_or_null(b.min_rho)},
                   {"lim_m", finite_or_null(b.lim_m.value)},
                   {"lim_m_time", b.lim_m.time},
                   {"lim_m_converged", b.lim_m.converged}};
  nlohmann::ordered_json v = nlohmann::ordered_json::object();
  for (const auto& nv : b.verdicts) v[nv.name] = verdict_json(nv.verdict);
  j["audits"] = v;
  return j;
}

}  // namespace fracchemo
