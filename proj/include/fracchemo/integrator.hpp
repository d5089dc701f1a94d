#pragma once
// Time stepping: ETDRK2 with the exact fractional-diffusion propagator,
// variable-step IMEX-BDF2, the run driver with status detection, and a
// Picard iteration on the Duhamel form.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fracchemo/diagnostics.hpp"
#include "fracchemo/errors.hpp"
#include "fracchemo/grid.hpp"
#include "fracchemo/operators.hpp"
#include "fracchemo/params.hpp"

namespace fracchemo {

enum class Scheme { etdrk2, imex_bdf2 };
enum class DtPolicy { fixed, adaptive };

inline std::string to_string(Scheme s) { return s == Scheme::etdrk2 ? "etdrk2" : "imex_bdf2"; }
inline std::string to_string(DtPolicy p) { return p == DtPolicy::fixed ? "fixed" : "adaptive"; }

struct StepperConfig {
  Scheme scheme = Scheme::etdrk2;
  DtPolicy dt_policy = DtPolicy::adaptive;
  double dt = 1e-2;            ///< fixed step, or the first step under the adaptive policy
  double cfl_target = 0.5;
  double dt_min = 1e-7;
  double dt_max = 5e-2;
  double t_end = 1.0;
  double record_every = 0.1;   ///< record cadence in time units; 0 records every step
  double negativity_tolerance = 1e-10;  ///< failure when min rho < -tolerance * ||rho0||_inf
  double blowup_ceiling = 0.0; ///< L^inf ceiling when N0 does not apply; 0 means 100 ||rho0||_inf
  int hs_order = 3;

  bool operator==(const StepperConfig&) const = default;
};

inline void validate(const StepperConfig& c) {
  require(c.t_end > 0.0 && std::isfinite(c.t_end), "t_end must be > 0");
  require(c.dt > 0.0, "dt must be > 0");
  require(c.record_every >= 0.0, "record_every must be >= 0");
  require(c.negativity_tolerance >= 0.0, "negativity_tolerance must be >= 0");
  require(c.blowup_ceiling >= 0.0, "blowup_ceiling must be >= 0");
  require(c.hs_order >= 0, "hs_order must be >= 0");
  if (c.dt_policy == DtPolicy::adaptive) {
    require(c.cfl_target > 0.0, "cfl_target must be > 0");
    require(c.dt_min > 0.0 && c.dt_min <= c.dt_max, "adaptive policy requires 0 < dt_min <= dt_max");
  }
}

enum class RunStatus { completed, negativity_violation, blowup_detected, nan };

inline std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::negativity_violation: return "negativity_violation";
    case RunStatus::blowup_detected: return "blowup_detected";
    case RunStatus::nan: return "nan";
  }
  return "completed";
}

struct Trajectory {
  ModelParams params;
  StepperConfig config;
  Grid grid{1, 16, 1.0};
  Point centre{0.0, 0.0};  ///< moment centre: initial centre of mass
  std::vector<DiagnosticsRecord> records;
  /// Cumulative int_0^t int rho^q dx ds at each record, accumulated per step with the
  /// quadrature the scheme applies to the zero mode: h/2 (R(u_n) + R(a)) for ETDRK2,
  /// h/2 (R(u_n) + R(u_{n+1})) for BDF2 steps. Zero when eps = 0.
  std::vector<double> reacted;
  Field final_state{Grid(1, 16, 1.0)};
  RunStatus status = RunStatus::completed;
  double status_time = 0.0;  ///< time of the failure, or t_end
  std::string message;
  double blowup_threshold = 0.0;
  double negativity_floor = 0.0;
  double flow_sup = 0.0;     ///< ||u||_inf of the realized flow
  std::size_t steps = 0;
};

namespace detail {

/// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2, series near zero.
inline std::array<double, 3> etd_coefficients(double z) {
  if (std::abs(z) < 0.1) {
    double p1 = 0.0, p2 = 0.0, term = 1.0;
    for (int k = 0; k < 14; ++k) {
      // term = z^k / k!
      p1 += term / (k + 1);
      p2 += term / ((k + 1) * (k + 2));
      term *= z / (k + 1);
    }
    return {std::exp(z), p1, p2};
  }
  const double em1 = std::expm1(z);
  return {std::exp(z), em1 / z, (em1 - z) / (z * z)};
}

inline void check_finite(const Spectrum& s, double t) {
  for (const auto& c : s.modes)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw NumericError("non-finite spectrum after a step", t);
}

}  // namespace detail

/// Advances spectral states for one Model; caches the ETD multipliers per step size.
class Stepper {
 public:
  explicit Stepper(const Model& model) : model_(model) {}

  const Model& model() const { return model_; }

  /// ETDRK2 (Cox-Matthews):
  ///   a       = e^{Lh} u + h phi1(Lh) N(u)
  ///   u_{n+1} = a + h phi2(Lh) (N(a) - N(u)),  L = -|xi|^alpha.
  Spectrum etd(const Spectrum& u, double h, double t = 0.0) {
    prepare(h);
    const Spectrum nu = model_.nonlinear(u, t);
    Spectrum a(u.grid);
    for (std::size_t e = 0; e < a.modes.size(); ++e) a.modes[e] = ex_[e] * u.modes[e] + h * p1_[e] * nu.modes[e];
    const Spectrum na = model_.nonlinear(a, t + h);
    last_stage_ = a;
    for (std::size_t e = 0; e < a.modes.size(); ++e) a.modes[e] += h * p2_[e] * (na.modes[e] - nu.modes[e]);
    detail::check_finite(a, t + h);
    last_nonlinear_ = nu;
    return a;
  }

  /// Variable-step IMEX-BDF2 with extrapolated nonlinearity; omega = h / h_prev:
  ///   (1+2w)/(1+w) u_{n+1} - (1+w) u_n + w^2/(1+w) u_{n-1} = h (L u_{n+1} + (1+w) N_n - w N_{n-1}).
  Spectrum bdf2(const Spectrum& u, const Spectrum& u_prev, const Spectrum& n_prev, double h, double h_prev,
                double t = 0.0) {
    const Spectrum nu = model_.nonlinear(u, t);
    const double w = h / h_prev;
    const double c0 = (1.0 + 2.0 * w) / (1.0 + w), c1 = 1.0 + w, c2 = w * w / (1.0 + w);
    const auto lam = model_.diffusion_symbol();
    Spectrum out(u.grid);
    for (std::size_t e = 0; e < out.modes.size(); ++e) {
      const Complex rhs = c1 * u.modes[e] - c2 * u_prev.modes[e] + h * ((1.0 + w) * nu.modes[e] - w * n_prev.modes[e]);
      out.modes[e] = rhs / (c0 + h * lam[e]);
    }
    detail::check_finite(out, t + h);
    last_nonlinear_ = nu;
    return out;
  }

  /// N(u_n) evaluated by the most recent step.
  const Spectrum& last_nonlinear() const { return *last_nonlinear_; }

  /// Predictor a of the most recent ETDRK2 step.
  const Spectrum& last_stage() const { return *last_stage_; }

 private:
  void prepare(double h) {
    if (h == cached_h_) return;
    const auto lam = model_.diffusion_symbol();
    ex_.resize(lam.size());
    p1_.resize(lam.size());
    p2_.resize(lam.size());
    for (std::size_t e = 0; e < lam.size(); ++e) {
      const auto c = detail::etd_coefficients(-h * lam[e]);
      ex_[e] = c[0];
      p1_[e] = c[1];
      p2_[e] = c[2];
    }
    cached_h_ = h;
  }

  const Model& model_;
  double cached_h_ = -1.0;
  std::vector<double> ex_, p1_, p2_;
  std::optional<Spectrum> last_nonlinear_;
  std::optional<Spectrum> last_stage_;
};

/// One ETDRK2 step of the full model.
inline Field etd_step(const Field& rho, const ModelParams& p, double dt) {
  require(dt > 0.0, "dt must be > 0");
  require(all_finite(rho.values()), "etd_step requires a finite state");
  const Model model(rho.grid(), p);
  Stepper st(model);
  return inverse(st.etd(rho.spectrum(), dt));
}

/// Largest stable step under the CFL-type rule
///   dt <= cfl dx / (|u|_inf + chi |grad (-Delta)^{-1} rho|_inf + eps |rho|_inf^{q-1} dx + tiny).
inline double adaptive_dt(const Model& m, const Spectrum& s, double linf, const StepperConfig& c) {
  const auto& p = m.params();
  const double dx = m.grid().dx();
  const double reaction = p.eps > 0.0 ? p.eps * std::pow(linf, p.q - 1) * dx : 0.0;
  const double speed = m.flow().sup + m.drift_speed(s) + reaction + 1e-300;
  return std::min(c.dt_max, c.cfl_target * dx / speed);
}

/// Observer called with (t, state) at every record.
using RecordObserver = std::function<void(double, const Field&)>;

/// Evolves rho0 to t_end, recording diagnostics at the configured cadence.
inline Trajectory run(const Field& rho0, const ModelParams& p, const StepperConfig& cfg,
                      const RecordObserver& observer = {}) {
  validate(cfg);
  const Grid& g = rho0.grid();
  require(all_finite(rho0.values()), "initial condition must be finite");
  double linf0 = 0.0, min0 = std::numeric_limits<double>::infinity();
  for (double v : rho0.values()) {
    linf0 = std::max(linf0, std::abs(v));
    min0 = std::min(min0, v);
  }
  require(min0 >= 0.0, "initial condition must be nonnegative");
  require(integrate(rho0) > 0.0, "initial condition must have positive mass");

  const Model model(g, p);
  Stepper stepper(model);
  Trajectory tr;
  tr.params = p;
  tr.config = cfg;
  tr.grid = g;
  tr.centre = centre_of_mass(rho0);
  tr.flow_sup = model.flow().sup;
  const Evaluator eval(g, p, tr.centre, cfg.hs_order);

  const BoundValue n0 = n0_ceiling(p, linf0);
  tr.blowup_threshold = n0.applicable ? 10.0 * n0.value : (cfg.blowup_ceiling > 0.0 ? cfg.blowup_ceiling : 100.0 * linf0);
  tr.negativity_floor = -cfg.negativity_tolerance * linf0;

  Spectrum u = rho0.spectrum();
  Field state = rho0;
  tr.records.push_back(eval(rho0, 0.0, 0.0));
  tr.reacted.push_back(0.0);
  if (observer) observer(0.0, rho0);
  const bool reactive = p.eps > 0.0;
  double reacted = 0.0;
  double r_now = reactive ? eval.reaction_integral(u) : 0.0;

  double t = 0.0, linf = linf0, h_prev = 0.0;
  std::optional<Spectrum> u_prev, n_prev;
  int record_index = 1;
  const double tiny = 1e-12 * cfg.t_end;
  auto next_record = [&] {
    return cfg.record_every > 0.0 ? std::min(cfg.t_end, record_index * cfg.record_every) : cfg.t_end;
  };

  auto fail = [&](RunStatus s, double when, std::string msg, const Field* f) {
    tr.status = s;
    tr.status_time = when;
    tr.message = std::move(msg);
    if (f && all_finite(f->values())) {
      tr.records.push_back(eval(*f, when, h_prev));
      tr.reacted.push_back(reacted);
      tr.final_state = *f;
    } else {
      tr.final_state = state;
    }
  };

  while (t < cfg.t_end - tiny) {
    double h = cfg.dt;
    if (cfg.dt_policy == DtPolicy::adaptive) {
      h = adaptive_dt(model, u, linf, cfg);
      if (tr.steps == 0) h = std::min(h, cfg.dt);
      if (h < cfg.dt_min) {
        fail(RunStatus::blowup_detected, t, "adaptive step fell below dt_min", nullptr);
        return tr;
      }
    }
    const double target = next_record();
    bool hit_record = false;
    if (t + h >= target - tiny) {
      h = target - t;
      hit_record = true;
    } else if (t + 2.0 * h > target) {
      h = 0.5 * (target - t);  // split the remainder instead of leaving a sliver
    }

    Spectrum next(g);
    bool used_bdf2 = false;
    try {
      if (cfg.scheme == Scheme::imex_bdf2 && u_prev) {
        next = stepper.bdf2(u, *u_prev, *n_prev, h, h_prev, t);
        used_bdf2 = true;
      } else {
        next = stepper.etd(u, h, t);
      }
    } catch (const NumericError& e) {
      fail(RunStatus::nan, e.time(), e.what(), nullptr);
      return tr;
    }
    if (cfg.scheme == Scheme::imex_bdf2) {
      n_prev = stepper.last_nonlinear();
      u_prev = u;
    }
    if (reactive) {
      const double r_next = eval.reaction_integral(next);
      reacted += 0.5 * h * (r_now + (used_bdf2 ? r_next : eval.reaction_integral(stepper.last_stage())));
      r_now = r_next;
    }
    u = std::move(next);
    t = hit_record ? target : t + h;
    h_prev = h;
    ++tr.steps;

    state = inverse(u);
    state.set_cached_spectrum(u);
    if (!all_finite(state.values())) {
      fail(RunStatus::nan, t, "non-finite state", nullptr);
      return tr;
    }
    linf = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    for (double v : state.values()) {
      linf = std::max(linf, std::abs(v));
      mn = std::min(mn, v);
    }
    if (linf > tr.blowup_threshold) {
      fail(RunStatus::blowup_detected, t, "L^inf exceeded the blowup threshold", &state);
      return tr;
    }
    if (mn < tr.negativity_floor) {
      fail(RunStatus::negativity_violation, t, "min rho fell below the negativity floor", &state);
      return tr;
    }
    if (hit_record || cfg.record_every == 0.0) {
      tr.records.push_back(eval(state, t, h));
      tr.reacted.push_back(reacted);
      if (observer) observer(t, state);
      if (hit_record) ++record_index;
    }
  }
  tr.status = RunStatus::completed;
  tr.status_time = t;
  tr.final_state = state;
  return tr;
}

// ------------------------------------------------------------------ Picard

struct PicardConfig {
  int subintervals = 4;     ///< composite Gauss panels on [0, T]
  int iterations = 40;      ///< iteration cap
  double max_ratio = 0.5;   ///< required contraction factor of successive distances
  double min_horizon = 1e-6;
  double tolerance = 1e-13; ///< stop when the distance drops below tolerance * |iterate|
};

struct PicardResult {
  Field state{Grid(1, 16, 1.0)};
  double horizon = 0.0;               ///< horizon actually used (after shrinking)
  std::vector<double> distances;      ///< successive-iterate distances
  std::vector<double> ratios;         ///< distances[k] / distances[k-1] above the roundoff floor
  int iterations = 0;
  int shrinks = 0;
};

namespace detail {

constexpr std::array<double, 4> gauss4_x{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> gauss4_w{0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
constexpr std::array<double, 8> gauss8_x{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                                         0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> gauss8_w{0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                                         0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

/// One attempt at horizon T; returns nullopt when the contraction test fails.
inline std::optional<PicardResult> picard_attempt(const Model& model, const Field& rho0, double T, int iterations,
                                                  const PicardConfig& cfg) {
  const Grid& g = rho0.grid();
  const auto lam = model.diffusion_symbol();
  const std::size_t nm = lam.size();
  const int S = cfg.subintervals;
  const double h = T / S;

  // target times: the 4 S Gauss nodes followed by T
  std::vector<double> targets;
  for (int i = 0; i < S; ++i)
    for (double x : gauss4_x) targets.push_back(i * h + 0.5 * h * (1.0 + x));
  targets.push_back(T);
  const std::size_t nt = targets.size();

  const Spectrum& s0 = rho0.spectrum();
  auto free_term = [&](double t) {
    Spectrum out(g);
    for (std::size_t e = 0; e < nm; ++e) out.modes[e] = std::exp(-t * lam[e]) * s0.modes[e];
    return out;
  };
  std::vector<Spectrum> iterate;
  for (double t : targets) iterate.push_back(free_term(t));

  // Lagrange basis of subinterval i at local coordinate x in [-1, 1]
  auto lagrange = [](int m, double x) {
    double v = 1.0;
    for (int k = 0; k < 4; ++k)
      if (k != m) v *= (x - gauss4_x[std::size_t(k)]) / (gauss4_x[std::size_t(m)] - gauss4_x[std::size_t(k)]);
    return v;
  };

  // Precomputed quadrature of int_a^c e^{-(t - s) lam} l_m(s) ds, c = min(b, t):
  // weights[target][panel][m][mode]
  struct PanelWeights {
    int panel;
    std::array<std::vector<double>, 4> w;
  };
  std::vector<std::vector<PanelWeights>> weights(nt);
  for (std::size_t j = 0; j < nt; ++j) {
    const double t = targets[j];
    for (int i = 0; i < S; ++i) {
      const double a = i * h, b = std::min((i + 1) * h, t);
      if (b <= a) break;
      PanelWeights pw;
      pw.panel = i;
      for (auto& v : pw.w) v.assign(nm, 0.0);
      for (std::size_t k = 0; k < 8; ++k) {
        const double s = a + 0.5 * (b - a) * (1.0 + gauss8_x[k]);
        const double wq = 0.5 * (b - a) * gauss8_w[k];
        const double xl = 2.0 * (s - a) / h - 1.0;
        std::array<double, 4> l{};
        for (int m = 0; m < 4; ++m) l[std::size_t(m)] = wq * lagrange(m, xl);
        for (std::size_t e = 0; e < nm; ++e) {
          const double decay = std::exp(-(t - s) * lam[e]);
          for (std::size_t m = 0; m < 4; ++m) pw.w[m][e] += l[m] * decay;
        }
      }
      weights[j].push_back(std::move(pw));
    }
  }

  const Evaluator norms(g, model.params(), centre_of_mass(rho0));
  auto distance = [&](const Spectrum& a, const Spectrum& b) {
    Spectrum d(g);
    for (std::size_t e = 0; e < nm; ++e) d.modes[e] = a.modes[e] - b.modes[e];
    return norms.hs_norm(d) + norms.m_beta_norm(inverse(d));
  };
  double scale = 0.0;
  for (const auto& s : iterate) scale = std::max(scale, norms.hs_norm(s));

  PicardResult res;
  res.horizon = T;
  std::vector<Spectrum> nonlin(std::size_t(4 * S), Spectrum(g));
  for (int k = 0; k < iterations; ++k) {
    for (std::size_t j = 0; j < std::size_t(4 * S); ++j) nonlin[j] = model.nonlinear(iterate[j], targets[j]);
    std::vector<Spectrum> next;
    double dist = 0.0;
    for (std::size_t j = 0; j < nt; ++j) {
      Spectrum out = free_term(targets[j]);
      for (const auto& pw : weights[j])
        for (std::size_t m = 0; m < 4; ++m) {
          const auto& nmode = nonlin[std::size_t(4 * pw.panel) + m].modes;
          const auto& w = pw.w[m];
          for (std::size_t e = 0; e < nm; ++e) out.modes[e] += w[e] * nmode[e];
        }
      check_finite(out, targets[j]);
      dist = std::max(dist, distance(out, iterate[j]));
      next.push_back(std::move(out));
    }
    iterate = std::move(next);
    res.iterations = k + 1;
    if (!res.distances.empty() && res.distances.back() > 1e-12 * scale) {
      const double r = dist / res.distances.back();
      res.ratios.push_back(r);
      if (r > cfg.max_ratio) return std::nullopt;
    }
    res.distances.push_back(dist);
    if (dist <= cfg.tolerance * scale) break;
  }
  res.state = inverse(iterate.back());
  return res;
}

}  // namespace detail

/// Picard iteration rho^{k+1}(t) = K_t * rho0 + int_0^t K_{t-r} * N(rho^k(r)) dr on
/// composite 4-node Gauss panels, the nonlinearity interpolated by the cubic
/// through each panel's nodes. Halves T until successive distances (H^s + M_beta)
/// contract by max_ratio; throws ContractionFailure below min_horizon.
inline PicardResult picard_solve(const Field& rho0, const ModelParams& p, double T, const PicardConfig& cfg = {}) {
  require(T > 0.0, "Picard horizon must be > 0");
  require(cfg.subintervals >= 1, "Picard needs at least one subinterval");
  require(cfg.iterations >= 0, "Picard iteration count must be >= 0");
  const Model model(rho0.grid(), p);
  int shrinks = 0;
  for (double horizon = T; horizon >= cfg.min_horizon; horizon *= 0.5, ++shrinks) {
    if (auto r = detail::picard_attempt(model, rho0, horizon, cfg.iterations, cfg)) {
      r->shrinks = shrinks;
      return *r;
    }
  }
  throw ContractionFailure("Picard iterates did not contract for any horizon above " + std::to_string(cfg.min_horizon));
}

/// Final Picard iterate at T after `iterations` steps; iterations = 0 gives K_T * rho0.
inline Field picard_mild_solve(const Field& rho0, const ModelParams& p, double T, int iterations) {
  PicardConfig cfg;
  cfg.iterations = iterations;
  return picard_solve(rho0, p, T, cfg).state;
}

}  // namespace fracchemo
