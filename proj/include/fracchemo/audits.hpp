#pragma once
// Audits over recorded trajectories. Every audit is a pure function of the
// Trajectory, so re-running it on stored data is bit-identical.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "fracchemo/diagnostics.hpp"
#include "fracchemo/integrator.hpp"

namespace fracchemo {

/// Compact %.6g rendering for verdict details.
inline std::string num_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Verdict {
  enum class State { holds, violated, not_applicable, inconclusive };
  State state = State::not_applicable;
  double time = 0.0;   ///< first violating record time, when violated
  double value = 0.0;  ///< audit-specific headline number
  std::string regime;  ///< hypotheses under which the check applies
  std::string detail;

  bool holds() const { return state == State::holds; }
};

inline std::string to_string(Verdict::State s) {
  switch (s) {
    case Verdict::State::holds: return "holds";
    case Verdict::State::violated: return "violated";
    case Verdict::State::not_applicable: return "not_applicable";
    case Verdict::State::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

inline Verdict not_applicable(std::string why) {
  if (why.rfind("not applicable: ", 0) == 0) why.erase(0, 16);
  Verdict v;
  v.state = Verdict::State::not_applicable;
  v.detail = std::move(why);
  return v;
}

/// Least-squares slope and intercept of y against x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit f;
  f.points = x.size();
  if (x.size() < 2) return f;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(x.size());
  my /= double(x.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  return f;
}

/// Time derivative of a recorded series: centred differences inside, one-sided
/// second-order three-point formulas at the ends (non-uniform spacing allowed).
inline std::vector<double> record_derivative(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (t[1] - t[0]);
    return d;
  }
  // three-point Lagrange derivative at node j of (a, b, c)
  auto three = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t j) {
    const double ta = t[a], tb = t[b], tc = t[c], x = t[j];
    const double la = ((x - tb) + (x - tc)) / ((ta - tb) * (ta - tc));
    const double lb = ((x - ta) + (x - tc)) / ((tb - ta) * (tb - tc));
    const double lc = ((x - ta) + (x - tb)) / ((tc - ta) * (tc - tb));
    return la * y[a] + lb * y[b] + lc * y[c];
  };
  d[0] = three(0, 1, 2, 0);
  for (std::size_t j = 1; j + 1 < n; ++j) d[j] = three(j - 1, j, j + 1, j);
  d[n - 1] = three(n - 3, n - 2, n - 1, n - 1);
  return d;
}

// ------------------------------------------------------------ mass audits

struct MassBalance {
  Verdict verdict;
  std::vector<double> residuals;  ///< |dm + eps int int rho^q| / max(eps int int rho^q, 1e-12 m0) per interval
  double max_residual = 0.0;
};

/// Per record interval, dm = -eps int int rho^q with the time integral accumulated
/// per step by the integrator (Trajectory::reacted); without it, the trapezoid of
/// the recorded reaction integrals.
inline MassBalance mass_balance_audit(const Trajectory& tr, double tolerance = 1e-3) {
  MassBalance mb;
  mb.verdict.regime = "any run";
  const auto& r = tr.records;
  const double eps = tr.params.eps;
  const double m0 = r.empty() ? 0.0 : r.front().mass;
  mb.verdict.state = Verdict::State::holds;
  if (eps == 0.0) {
    // No sink: conservation to roundoff, |dm| <= 1e-12 m0.
    mb.verdict.regime = "eps = 0, conservation";
    for (std::size_t k = 1; k < r.size(); ++k) {
      const double res = std::abs(r[k].mass - r[k - 1].mass) / m0;
      mb.residuals.push_back(res);
      mb.max_residual = std::max(mb.max_residual, res);
      if (res > 1e-12 && mb.verdict.state == Verdict::State::holds) {
        mb.verdict.state = Verdict::State::violated;
        mb.verdict.time = r[k].t;
      }
    }
    mb.verdict.value = mb.max_residual;
    mb.verdict.detail = "max |dm| / m0 = " + num_text(mb.max_residual);
    return mb;
  }
  for (std::size_t k = 1; k < r.size(); ++k) {
    const double dt = r[k].t - r[k - 1].t;
    const double reacted = tr.reacted.size() == r.size()
                               ? eps * (tr.reacted[k] - tr.reacted[k - 1])
                               : eps * 0.5 * dt * (r[k].reaction_integral + r[k - 1].reaction_integral);
    const double dm = r[k].mass - r[k - 1].mass;
    const double res = std::abs(dm + reacted) / std::max(reacted, 1e-12 * m0);
    mb.residuals.push_back(res);
    mb.max_residual = std::max(mb.max_residual, res);
    if (res > tolerance && mb.verdict.state == Verdict::State::holds) {
      mb.verdict.state = Verdict::State::violated;
      mb.verdict.time = r[k].t;
    }
  }
  mb.verdict.value = mb.max_residual;
  mb.verdict.detail = "max relative residual " + num_text(mb.max_residual);
  return mb;
}

/// m(t) nonincreasing within slack * m0 and positive at the end.
inline Verdict mass_monotone_audit(const Trajectory& tr, double slack = 1e-8) {
  Verdict v;
  v.regime = "any run";
  v.state = Verdict::State::holds;
  const auto& r = tr.records;
  const double m0 = r.front().mass;
  for (std::size_t k = 1; k < r.size(); ++k)
    if (r[k].mass > r[k - 1].mass + slack * m0) {
      v.state = Verdict::State::violated;
      v.time = r[k].t;
      break;
    }
  v.value = r.back().mass;
  if (v.state == Verdict::State::holds && !(r.back().mass > 0.0)) {
    v.state = Verdict::State::violated;
    v.time = r.back().t;
  }
  v.detail = "final mass " + num_text(r.back().mass);
  return v;
}

/// Operational lim m: mass at the first record where |dm/dt| < threshold * m0 per
/// unit time, else the final mass; `converged` tells which.
struct LimitMass {
  double value = 0.0;
  double time = 0.0;
  bool converged = false;
};

inline LimitMass limit_mass(const Trajectory& tr, double threshold = 1e-6) {
  const auto& r = tr.records;
  std::vector<double> t, m;
  for (const auto& rec : r) {
    t.push_back(rec.t);
    m.push_back(rec.mass);
  }
  const auto dm = record_derivative(t, m);
  const double m0 = r.front().mass;
  for (std::size_t k = 1; k < r.size(); ++k)
    if (std::abs(dm[k]) < threshold * m0) return {m[k], t[k], true};
  return {m.back(), t.back(), false};
}

// -------------------------------------------------------- theorem audits

/// max_t ||rho||_inf <= N0 (1 + 1e-6).
inline Verdict n0_audit(const Trajectory& tr, double rel = 1e-6) {
  const auto n0 = n0_ceiling(tr.params, tr.records.front().linf);
  if (!n0.applicable) return not_applicable(n0.regime);
  Verdict v;
  v.regime = n0.regime;
  v.state = Verdict::State::holds;
  double mx = 0.0;
  for (const auto& rec : tr.records) {
    mx = std::max(mx, rec.linf);
    if (rec.linf > n0.value * (1.0 + rel) && v.state == Verdict::State::holds) {
      v.state = Verdict::State::violated;
      v.time = rec.t;
    }
  }
  v.value = mx / n0.value;
  v.detail = "max L^inf / N0 = " + num_text(v.value);
  return v;
}

/// inf_t m(t) > 0 under the no-extinction hypotheses; reports the observed floor
/// next to the configured C0.
inline Verdict c0_audit(const Trajectory& tr, double constant = 1.0) {
  const int d = tr.grid.dim();
  const auto c0 = c0_floor(tr.params, d, tr.records.front().mass, tr.records.front().linf, constant);
  if (!c0.applicable) return not_applicable(c0.regime);
  Verdict v;
  v.regime = c0.regime;
  double floor = std::numeric_limits<double>::infinity();
  for (const auto& rec : tr.records) floor = std::min(floor, rec.mass);
  v.value = floor;
  v.state = floor > 0.0 ? Verdict::State::holds : Verdict::State::violated;
  v.detail = "observed floor " + num_text(floor) + ", C0 with configured C = " + num_text(c0.value);
  return v;
}

/// ||rho||_p / ||rho||_1 <= initial ratio (1 + rel) for p in {1, 2, q, inf}
/// (pexp = +inf selects L^inf).
inline Verdict ratio_monotonicity_audit(const Trajectory& tr, double pexp, double rel = 1e-6) {
  if (tr.params.chi != 0.0) return not_applicable("requires chi = 0");
  auto norm = [&](const DiagnosticsRecord& r) {
    if (pexp == 1.0) return r.mass;
    if (pexp == 2.0) return r.l2;
    if (std::isinf(pexp)) return r.linf;
    if (pexp == double(tr.params.q)) return r.lq;
    throw ParameterError("ratio audit supports p in {1, 2, q, inf}");
  };
  Verdict v;
  v.regime = "chi = 0";
  v.state = Verdict::State::holds;
  const double r0 = norm(tr.records.front()) / tr.records.front().mass;
  double worst = 0.0;
  for (const auto& rec : tr.records) {
    const double ratio = norm(rec) / rec.mass / r0;
    worst = std::max(worst, ratio);
    if (ratio > 1.0 + rel && v.state == Verdict::State::holds) {
      v.state = Verdict::State::violated;
      v.time = rec.t;
    }
  }
  v.value = worst;
  v.detail = "max ratio / initial ratio = " + num_text(worst);
  return v;
}

enum class DecayNorm { l2, linf };

struct DecayFit {
  Verdict verdict;
  double slope = 0.0;
  double predicted = 0.0;
  double t_first = 0.0;
  double t_last = 0.0;
  std::size_t points = 0;
};

/// Log-log slope of the mean-free norm over the last decade before saturation.
/// Records with ||rho||_inf < 10 m0 / V are excluded; on the torus the constant
/// mode m0/V never decays, so the fit uses ||rho - m0/V||_2 = sqrt(l2^2 - m0^2/V)
/// and linf - m0/V.
inline DecayFit decay_rate_fit(const Trajectory& tr, DecayNorm which, double rel = 0.05) {
  DecayFit f;
  const int d = tr.grid.dim();
  const double a = tr.params.alpha;
  f.predicted = which == DecayNorm::linf ? -d / a : -d / (2.0 * a);
  if (tr.params.chi != 0.0 || tr.params.eps != 0.0) {
    f.verdict = not_applicable("requires chi = eps = 0");
    return f;
  }
  f.verdict.regime = "chi = eps = 0";
  const double V = tr.grid.box_volume();
  const double m0 = tr.records.front().mass;
  const double level = m0 / V;
  double t_sat = 0.0;
  for (const auto& r : tr.records)
    if (r.t > 0.0 && r.linf >= 10.0 * level) t_sat = r.t;
  const double t_start = t_sat / 10.0;
  const bool has_decade = t_sat > 0.0 && tr.records.size() > 1 && tr.records[1].t <= t_start;
  std::vector<double> x, y;
  for (const auto& r : tr.records) {
    if (r.t < t_start || r.t > t_sat || r.t <= 0.0) continue;
    const double v = which == DecayNorm::linf ? r.linf - level : std::sqrt(std::max(r.l2 * r.l2 - m0 * m0 / V, 0.0));
    if (!(v > 0.0)) continue;
    x.push_back(std::log(r.t));
    y.push_back(std::log(v));
  }
  const LinearFit lf = fit_line(x, y);
  f.slope = lf.slope;
  f.points = lf.points;
  f.t_first = t_start;
  f.t_last = t_sat;
  f.verdict.value = f.slope;
  if (!has_decade || lf.points < 5) {
    f.verdict.state = Verdict::State::inconclusive;
    f.verdict.detail = "less than one decade of records before box saturation";
    return f;
  }
  const double limit = f.predicted + rel * std::abs(f.predicted);
  f.verdict.state = f.slope <= limit ? Verdict::State::holds : Verdict::State::violated;
  f.verdict.detail = "slope " + num_text(f.slope) + " vs predicted " + num_text(f.predicted) + " over [" +
                     num_text(t_start) + ", " + num_text(t_sat) + "]";
  return f;
}

struct WOdeAudit {
  Verdict verdict;
  std::vector<double> time;
  std::vector<double> residual;  ///< dw/dt - (2 delta chi^{-mu} w + f_u(m, w))
};

/// Pseudo-moment differential inequality with configured C1, C2.
inline WOdeAudit w_ode_audit(const Trajectory& tr, double c1, double c2, double tolerance = 0.0) {
  WOdeAudit a;
  if (tr.grid.dim() != 2) {
    a.verdict = not_applicable("requires d = 2");
    return a;
  }
  a.verdict.regime = "d = 2, configured C1 = " + num_text(c1) + ", C2 = " + num_text(c2);
  std::vector<double> t, w;
  for (const auto& r : tr.records) {
    t.push_back(r.t);
    w.push_back(r.w_gamma);
  }
  const auto dw = record_derivative(t, w);
  a.verdict.state = Verdict::State::holds;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto& r = tr.records[k];
    const double res = dw[k] - w_ode_bound(r.mass, r.w_gamma, tr.params, tr.flow_sup, c1, c2);
    a.time.push_back(t[k]);
    a.residual.push_back(res);
    worst = std::max(worst, res);
    if (res > tolerance && a.verdict.state == Verdict::State::holds) {
      a.verdict.state = Verdict::State::violated;
      a.verdict.time = t[k];
    }
  }
  a.verdict.value = worst;
  a.verdict.detail = "max residual " + num_text(worst);
  return a;
}

/// Smallest C1 with dw/dt <= C1 m on a chi = 0, u = 0 reference run.
inline double calibrate_c1(const Trajectory& tr) {
  require(tr.params.chi == 0.0 && tr.flow_sup == 0.0, "C1 calibration needs a chi = 0, u = 0 run");
  std::vector<double> t, w;
  for (const auto& r : tr.records) {
    t.push_back(r.t);
    w.push_back(r.w_gamma);
  }
  const auto dw = record_derivative(t, w);
  double c1 = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) c1 = std::max(c1, dw[k] / tr.records[k].mass);
  return c1;
}

/// Largest C2 for which the u = 0 inequality holds on a chemotactic reference run with C1 frozen.
inline double calibrate_c2(const Trajectory& tr, double c1) {
  require(tr.params.chi > 0.0, "C2 calibration needs a chi > 0 run");
  const double g = tr.params.gamma;
  std::vector<double> t, w;
  for (const auto& r : tr.records) {
    t.push_back(r.t);
    w.push_back(r.w_gamma);
  }
  const auto dw = record_derivative(t, w);
  double c2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double m = tr.records[k].mass, wk = tr.records[k].w_gamma;
    const double unit = tr.params.chi * m * std::pow(m, 2.0 / g) * std::pow(m + 2.0 * wk, -(2.0 - g) / g);
    c2 = std::min(c2, (c1 * m - dw[k]) / unit);
  }
  return std::max(c2, 0.0);
}

struct VirialAudit {
  Verdict verdict;
  double measured = 0.0;
  double predicted = 0.0;
  double torus_term = 0.0;  ///< chi (m0/V) m2(0): the periodic mean-removal contribution
};

/// Early-time dm2/dt against 4 m0 (1 - chi m0 / 8 pi); supercritical runs must end in blowup.
inline VirialAudit virial_classical_audit(const Trajectory& tr, std::size_t fit_records = 6, double rel = 0.05) {
  VirialAudit a;
  const auto& p = tr.params;
  if (p.alpha != 2.0 || p.eps != 0.0 || tr.flow_sup != 0.0 || tr.grid.dim() != 2) {
    a.verdict = not_applicable("requires alpha = 2, eps = 0, u = 0, d = 2");
    return a;
  }
  a.verdict.regime = "alpha = 2, eps = 0, u = 0, d = 2";
  const double m0 = tr.records.front().mass;
  a.predicted = virial_slope(m0, p.chi);
  a.torus_term = p.chi * m0 / tr.grid.box_volume() * tr.records.front().m2;
  std::vector<double> t, m2;
  for (std::size_t k = 0; k < tr.records.size() && k < fit_records; ++k) {
    t.push_back(tr.records[k].t);
    m2.push_back(tr.records[k].m2);
  }
  if (t.size() < 3) {
    a.verdict.state = Verdict::State::inconclusive;
    a.verdict.detail = "fewer than three early records";
    return a;
  }
  a.measured = fit_line(t, m2).slope;
  const bool critical = std::abs(a.predicted) <= rel * 4.0 * m0;
  const double tol = rel * (critical ? 4.0 * m0 : std::abs(a.predicted));
  bool ok = std::abs(a.measured - a.predicted) <= tol;
  std::string why;
  // strictly supercritical; the critical mass itself carries grid roundoff
  if (m0 * p.chi > 8.0 * std::numbers::pi * (1.0 + 1e-9) && tr.status != RunStatus::blowup_detected) {
    ok = false;
    why = "; supercritical run did not end in blowup_detected";
  }
  a.verdict.state = ok ? Verdict::State::holds : Verdict::State::violated;
  a.verdict.value = a.measured;
  a.verdict.detail = "dm2/dt measured " + num_text(a.measured) + " vs predicted " + num_text(a.predicted) + why;
  return a;
}

/// Whether the chemotactic lower-bound hypothesis threshold is crossed at some record.
inline Verdict lower_bound_assumption_audit(const Trajectory& tr, double constant = 1.0) {
  const auto& p = tr.params;
  if (!(p.chi > 0.0 && p.eps > 0.0 && p.q > 2)) return not_applicable("requires chi > 0, eps > 0, q > 2");
  const double n0 = n0_ceiling(p, tr.records.front().linf).value;
  Verdict v;
  v.regime = "chi > 0, eps > 0, configured C(q,alpha) = " + num_text(constant);
  v.state = Verdict::State::inconclusive;
  v.detail = "assumption threshold never crossed; lower bound not asserted";
  for (const auto& r : tr.records)
    if (lower_bound_assumption_met(r.mass, n0, p, constant)) {
      v.state = Verdict::State::holds;
      v.time = r.t;
      v.detail = "assumption threshold crossed; mass stays positive";
      if (!(tr.records.back().mass > 0.0)) v.state = Verdict::State::violated;
      break;
    }
  return v;
}

/// Nonnegativity: min rho >= -tolerance ||rho0||_inf at every record.
inline Verdict nonnegativity_audit(const Trajectory& tr, double tolerance = 1e-10) {
  Verdict v;
  v.regime = "rho0 >= 0";
  v.state = Verdict::State::holds;
  const double floor = -tolerance * tr.records.front().linf;
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& r : tr.records) {
    mn = std::min(mn, r.min_rho);
    if (r.min_rho < floor && v.state == Verdict::State::holds) {
      v.state = Verdict::State::violated;
      v.time = r.t;
    }
  }
  v.value = mn;
  v.detail = "min rho " + num_text(mn);
  return v;
}

/// Positivity-lemma gap on the final state for p = 2 and p = q (when q > 2).
inline Verdict cordoba_audit(const Trajectory& tr, double rel = 1e-8) {
  Verdict v;
  v.regime = "p >= 2, final state";
  v.state = Verdict::State::holds;
  v.time = tr.records.back().t;
  double worst = std::numeric_limits<double>::infinity();
  std::vector<double> ps{2.0};
  if (tr.params.q > 2) ps.push_back(double(tr.params.q));
  for (double pe : ps) {
    const CordobaResult c = cordoba_check(tr.final_state, pe, tr.params.alpha);
    const double scaled = c.gap / std::max(std::abs(c.lhs), 1e-300);
    worst = std::min(worst, scaled);
    if (c.gap < -rel * std::abs(c.lhs)) v.state = Verdict::State::violated;
  }
  v.value = worst;
  v.detail = "min gap / lhs = " + num_text(worst);
  return v;
}

// ----------------------------------------------------------- bound report

struct ReportSettings {
  double c0_constant = 1.0;       ///< C(q,d,alpha) of the no-extinction floor
  double c1 = 0.0;                ///< C1 of the upper mass bound; 0 = not configured
  double c2 = 0.0;                ///< C2 of the upper mass bound; 0 = not configured
  double assumption_constant = 1.0;
  double tau = 0.0;               ///< time of the upper mass bound; 0 means t_end
};

struct NamedVerdict {
  std::string name;
  Verdict verdict;
};

struct BoundReport {
  BoundValue n0;
  BoundValue c0_lower;
  PsiCeiling psi;
  double psi_tau = 0.0;
  double w0 = 0.0;
  double c1 = 0.0, c2 = 0.0;
  double virial_slope = 0.0;
  // observed extremes
  double max_linf = 0.0;
  double min_mass = 0.0;
  double min_rho = 0.0;
  double final_mass = 0.0;
  double mass_at_tau = 0.0;
  LimitMass lim_m;
  RunStatus status = RunStatus::completed;
  double status_time = 0.0;
  std::vector<NamedVerdict> verdicts;
};

/// Mass at the first record with t >= tau (the last record if none).
inline double mass_at(const Trajectory& tr, double tau) {
  for (const auto& r : tr.records)
    if (r.t >= tau - 1e-12 * std::max(1.0, tau)) return r.mass;
  return tr.records.back().mass;
}

inline BoundReport bound_report(const Trajectory& tr, const ReportSettings& s = {}) {
  BoundReport b;
  const auto& first = tr.records.front();
  const auto& p = tr.params;
  b.n0 = n0_ceiling(p, first.linf);
  b.c0_lower = c0_floor(p, tr.grid.dim(), first.mass, first.linf, s.c0_constant);
  b.psi_tau = s.tau > 0.0 ? s.tau : tr.config.t_end;
  b.w0 = first.w_gamma;
  b.c1 = s.c1;
  b.c2 = s.c2;
  const bool constants = s.c1 > 0.0 && s.c2 > 0.0;
  const std::string unset = "C1, C2 not configured";
  if (constants) b.psi = psi_ceiling(p, tr.flow_sup, b.psi_tau, b.w0, s.c1, s.c2);
  else b.psi.regime = unset;
  b.virial_slope = tr.grid.dim() == 2 ? virial_slope(first.mass, p.chi) : 0.0;
  b.min_mass = std::numeric_limits<double>::infinity();
  b.min_rho = std::numeric_limits<double>::infinity();
  for (const auto& r : tr.records) {
    b.max_linf = std::max(b.max_linf, r.linf);
    b.min_mass = std::min(b.min_mass, r.mass);
    b.min_rho = std::min(b.min_rho, r.min_rho);
  }
  b.final_mass = tr.records.back().mass;
  b.mass_at_tau = mass_at(tr, b.psi_tau);
  b.lim_m = limit_mass(tr);
  b.status = tr.status;
  b.status_time = tr.status_time;

  b.verdicts.push_back({"mass_balance", mass_balance_audit(tr).verdict});
  b.verdicts.push_back({"mass_monotone", mass_monotone_audit(tr)});
  b.verdicts.push_back({"nonnegativity", nonnegativity_audit(tr)});
  b.verdicts.push_back({"n0_ceiling", n0_audit(tr)});
  b.verdicts.push_back({"c0_floor", c0_audit(tr, s.c0_constant)});
  for (double pe : {2.0, double(p.q), std::numeric_limits<double>::infinity()}) {
    const std::string name = std::isinf(pe) ? "ratio_linf" : pe == 2.0 ? "ratio_l2" : "ratio_lq";
    if (pe == 2.0 && p.q == 2) continue;
    b.verdicts.push_back({name, ratio_monotonicity_audit(tr, pe)});
  }
  b.verdicts.push_back({"decay_l2", decay_rate_fit(tr, DecayNorm::l2).verdict});
  b.verdicts.push_back({"decay_linf", decay_rate_fit(tr, DecayNorm::linf).verdict});
  b.verdicts.push_back({"w_inequality", constants ? w_ode_audit(tr, s.c1, s.c2).verdict : not_applicable(unset)});
  b.verdicts.push_back({"virial_classical", virial_classical_audit(tr).verdict});
  b.verdicts.push_back({"lower_bound_assumption", lower_bound_assumption_audit(tr, s.assumption_constant)});
  b.verdicts.push_back({"cordoba_gap", cordoba_audit(tr)});
  if (b.psi.applicable) {
    Verdict v;
    v.regime = b.psi.regime;
    v.value = b.mass_at_tau;
    v.state = b.mass_at_tau < b.psi.bound ? Verdict::State::holds : Verdict::State::violated;
    if (v.state == Verdict::State::violated) v.time = b.psi_tau;
    v.detail = "m(tau) = " + num_text(b.mass_at_tau) + " vs configured-constant ceiling " + num_text(b.psi.bound);
    b.verdicts.push_back({"psi_ceiling", v});
  } else {
    b.verdicts.push_back({"psi_ceiling", not_applicable(b.psi.regime)});
  }
  return b;
}

}  // namespace fracchemo
