#pragma once
// Functionals of a state, pointwise lemma inequalities and the explicit
// theorem constants.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fracchemo/errors.hpp"
#include "fracchemo/grid.hpp"
#include "fracchemo/operators.hpp"
#include "fracchemo/params.hpp"

namespace fracchemo {

/// One row of the diagnostics table.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double l2 = 0.0;
  double lq = 0.0;
  double linf = 0.0;
  double hs = 0.0;
  double m_beta = 0.0;
  double w_gamma = 0.0;
  double m2 = 0.0;
  double min_rho = 0.0;
  double reaction_integral = 0.0;
  double dt_used = 0.0;
};

// ---------------------------------------------------------------- weights

inline void check_gamma(double gamma) { require(gamma > 1.0 && gamma <= 2.0, "gamma must lie in (1,2]"); }

inline double norm2(Point x) { return x[0] * x[0] + x[1] * x[1]; }

/// phi(x) = (1 + |x|^2)^{gamma/2} - 1.
inline double phi_weight(Point x, double gamma) {
  check_gamma(gamma);
  const double r2 = norm2(x);
  if (gamma == 2.0) return r2;
  // expm1/log1p keep full relative accuracy near the origin
  return std::expm1(0.5 * gamma * std::log1p(r2));
}

/// grad phi(x) = gamma (1 + |x|^2)^{gamma/2 - 1} x.
inline Point grad_phi(Point x, double gamma) {
  check_gamma(gamma);
  const double f = gamma * std::pow(1.0 + norm2(x), 0.5 * gamma - 1.0);
  return {f * x[0], f * x[1]};
}

struct GradPhiCheck {
  bool holds = false;
  double lhs = 0.0;          ///< |grad phi / gamma|^{gamma/(gamma-1)}
  double rhs = 0.0;          ///< (2/gamma) phi
  double slack = 0.0;        ///< rhs - lhs
  double ratio = 0.0;        ///< lhs / phi, bounded by 2/gamma
  double radial_ratio = 0.0; ///< |grad phi / gamma| |x| / phi, decreasing to 2/gamma at the origin
};

/// |grad phi(x) / gamma|^{gamma/(gamma-1)} <= (2/gamma) phi(x) for gamma in (1,2), x != 0.
inline GradPhiCheck grad_phi_inequality_check(Point x, double gamma) {
  require(gamma > 1.0 && gamma < 2.0, "gradient inequality requires gamma in (1,2)");
  const double r2 = norm2(x);
  require(r2 > 0.0, "gradient inequality requires x != 0");
  const double r = std::sqrt(r2);
  const double phi = phi_weight(x, gamma);
  const double g = std::pow(1.0 + r2, 0.5 * gamma - 1.0) * r;  // |grad phi| / gamma
  GradPhiCheck c;
  c.lhs = std::pow(g, gamma / (gamma - 1.0));
  c.rhs = 2.0 / gamma * phi;
  c.slack = c.rhs - c.lhs;
  c.ratio = c.lhs / phi;
  c.radial_ratio = g * r / phi;
  c.holds = c.slack >= 0.0;
  return c;
}

/// (grad phi(x) - grad phi(y)).(x - y) - K |x - y|^2 / (1 + |x|^{2-gamma} + |y|^{2-gamma}), K = gamma - 1.
inline double convexity_gap(Point x, Point y, double gamma) {
  check_gamma(gamma);
  const Point gx = grad_phi(x, gamma), gy = grad_phi(y, gamma);
  const Point h{x[0] - y[0], x[1] - y[1]};
  const double lhs = (gx[0] - gy[0]) * h[0] + (gx[1] - gy[1]) * h[1];
  const double e = 2.0 - gamma;
  const double denom = 1.0 + std::pow(std::sqrt(norm2(x)), e) + std::pow(std::sqrt(norm2(y)), e);
  return lhs - (gamma - 1.0) * norm2(h) / denom;
}

/// Displacement x - c reduced to the nearest periodic image.
inline Point periodic_offset(const Grid& g, Point x, Point c) {
  const double period = 2.0 * g.half_width();
  Point d{x[0] - c[0], g.dim() == 2 ? x[1] - c[1] : 0.0};
  for (auto& v : d) v -= period * std::round(v / period);
  return d;
}

/// Centre of mass int x rho / int rho, with x in the fundamental box.
inline Point centre_of_mass(const Field& rho) {
  const Grid& g = rho.grid();
  double m = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const Point p = g.point(i);
    m += rho[i];
    mx += p[0] * rho[i];
    my += p[1] * rho[i];
  }
  require(m > 0.0, "centre of mass requires positive total mass");
  return {mx / m, g.dim() == 2 ? my / m : 0.0};
}

/// w = int phi(x - centre) rho(x) dx.
inline double w_moment(const Field& rho, double gamma, Point centre) {
  check_gamma(gamma);
  const Grid& g = rho.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) acc += phi_weight(periodic_offset(g, g.point(i), centre), gamma) * rho[i];
  return acc * g.cell_volume();
}

// ------------------------------------------------------------ evaluator

/// Computes DiagnosticsRecord rows for states on one grid. Holds dealiasing
/// scratch, so each worker owns its own instance.
class Evaluator {
 public:
  Evaluator(const Grid& g, const ModelParams& p, Point centre, int hs_order = 3)
      : grid_(g), params_(p), centre_(centre), hs_order_(hs_order),
        power_(g, padded_size(g.n(), 0.5 * (p.q + 1))) {
    require(hs_order >= 0, "H^s order must be >= 0");
    const auto k2 = g.k2();
    hs_weight_.resize(k2.size());
    for (std::size_t e = 0; e < k2.size(); ++e) hs_weight_[e] = g.mode_weight()[e] * std::pow(1.0 + k2[e], hs_order);
    phi_.resize(g.size());
    r2_.resize(g.size());
    beta_weight_.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point d = periodic_offset(g, g.point(i), centre);
      phi_[i] = phi_weight(d, p.gamma);
      r2_[i] = norm2(d);
      beta_weight_[i] = 1.0 + std::pow(std::sqrt(r2_[i]), p.beta);
    }
  }

  const Point& centre() const { return centre_; }
  int hs_order() const { return hs_order_; }

  /// Discrete H^s norm sqrt(V sum (1 + |xi|^2)^s |rho^|^2).
  double hs_norm(const Spectrum& s) const {
    double acc = 0.0;
    for (std::size_t e = 0; e < s.modes.size(); ++e) acc += hs_weight_[e] * std::norm(s.modes[e]);
    return std::sqrt(acc * grid_.box_volume());
  }

  /// int (|f| + |grad f|)(1 + |x - centre|^beta) dx, gradient taken spectrally.
  double m_beta_norm(const Field& f) const {
    const Spectrum& s = f.spectrum();
    std::array<Field, 2> grad{Field(grid_), Field(grid_)};
    for (int a = 0; a < grid_.dim(); ++a) grad[std::size_t(a)] = inverse(derivative(s, a));
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double gnorm = grid_.dim() == 2 ? std::hypot(grad[0][i], grad[1][i]) : std::abs(grad[0][i]);
      acc += (std::abs(f[i]) + gnorm) * beta_weight_[i];
    }
    return acc * grid_.cell_volume();
  }

  /// int rho^q from the dealiased power spectrum: the quantity the scheme removes from the mass.
  double reaction_integral(const Spectrum& s) const {
    const int q = params_.q;
    power_.to_padded(s, tmp_);
    for (auto& v : tmp_) {
      const double b = v;
      double acc = b;
      for (int k = 1; k < q; ++k) acc *= b;
      v = acc;
    }
    Spectrum out(grid_);
    power_.from_padded(tmp_, out);
    return out.modes[0].real() * grid_.box_volume();
  }

  DiagnosticsRecord operator()(const Field& rho, double t, double dt_used = 0.0) const {
    DiagnosticsRecord r;
    r.t = t;
    r.dt_used = dt_used;
    const double dv = grid_.cell_volume();
    const double q = params_.q;
    double mass = 0.0, l2 = 0.0, lq = 0.0, linf = 0.0, w = 0.0, m2 = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rho.size(); ++i) {
      const double v = rho[i];
      const double a = std::abs(v);
      mass += v;
      l2 += v * v;
      lq += std::pow(a, q);
      linf = std::max(linf, a);
      mn = std::min(mn, v);
      w += phi_[i] * v;
      m2 += r2_[i] * v;
    }
    r.mass = mass * dv;
    r.l2 = std::sqrt(l2 * dv);
    r.lq = std::pow(lq * dv, 1.0 / q);
    r.linf = linf;
    r.min_rho = mn;
    r.w_gamma = w * dv;
    r.m2 = m2 * dv;
    r.hs = hs_norm(rho.spectrum());
    r.m_beta = m_beta_norm(rho);
    r.reaction_integral = reaction_integral(rho.spectrum());
    return r;
  }

 private:
  Grid grid_;
  ModelParams params_;
  Point centre_;
  int hs_order_;
  Dealiaser power_;
  std::vector<double> hs_weight_, phi_, r2_, beta_weight_;
  mutable std::vector<double> tmp_;
};

/// True when every field of the record is finite.
inline bool record_finite(const DiagnosticsRecord& r) {
  for (double v : {r.t, r.mass, r.l2, r.lq, r.linf, r.hs, r.m_beta, r.w_gamma, r.m2, r.min_rho, r.reaction_integral, r.dt_used})
    if (!std::isfinite(v)) return false;
  return true;
}

// ------------------------------------------------------ theorem constants

/// A bound value together with the regime that makes it applicable.
struct BoundValue {
  bool applicable = false;
  double value = 0.0;
  std::string regime;  ///< hypotheses the value relies on, or the reason it does not apply
};

/// N0 = max((chi/eps)^{1/(q-2)}, ||rho0||_inf); requires q > 2 and eps > 0.
inline BoundValue n0_ceiling(const ModelParams& p, double rho0_linf) {
  BoundValue b;
  if (p.q <= 2) {
    b.regime = "not applicable: requires q > 2";
    return b;
  }
  if (!(p.eps > 0.0)) {
    b.regime = "not applicable: requires eps > 0";
    return b;
  }
  b.applicable = true;
  b.value = std::max(std::pow(p.chi / p.eps, 1.0 / (p.q - 2)), rho0_linf);
  b.regime = "q > 2, eps > 0";
  return b;
}

/// C0 = min(||rho0||_1 / 2, (||rho0||_1/||rho0||_inf)^{1 - alpha/(d(q-1))} / (2^{q/(q-1)} (eps C)^{1/(q-1)})),
/// with the unexplicit constant C supplied by the caller. Requires chi = 0, q d > d + alpha, eps > 0.
inline BoundValue c0_floor(const ModelParams& p, int d, double rho0_l1, double rho0_linf, double constant = 1.0) {
  BoundValue b;
  if (p.chi != 0.0) {
    b.regime = "not applicable: requires chi = 0";
    return b;
  }
  if (!(p.q * d > d + p.alpha)) {
    b.regime = "not applicable: requires q d > d + alpha";
    return b;
  }
  if (!(p.eps > 0.0)) {
    b.regime = "not applicable: requires eps > 0";
    return b;
  }
  require(constant > 0.0 && rho0_l1 > 0.0 && rho0_linf > 0.0, "c0_floor requires positive norms and constant");
  const double q = p.q;
  const double second = std::pow(rho0_l1 / rho0_linf, 1.0 - p.alpha / (d * (q - 1.0))) /
                        (std::pow(2.0, q / (q - 1.0)) * std::pow(p.eps * constant, 1.0 / (q - 1.0)));
  b.applicable = true;
  b.value = std::min(0.5 * rho0_l1, second);
  b.regime = "chi = 0, q d > d + alpha, configured C(q,d,alpha)";
  return b;
}

/// Theta(tau) = 1/tau without flow, 2/(1 - e^{-2 tau}) with flow.
inline double theta(double tau, bool has_flow) {
  require(tau > 0.0, "tau must be > 0");
  return has_flow ? 2.0 / -std::expm1(-2.0 * tau) : 1.0 / tau;
}

struct PsiCeiling {
  bool applicable = false;
  std::string regime;
  double theta = 0.0;
  double psi = 0.0;
  double bound = 0.0;  ///< max(psi^{gamma/(2+gamma)} w0^{2/(2+gamma)}, psi)
};

/// psi = ((C1 + |u|^gamma)/(chi C2)) (Theta(tau)/(C1 + |u|^gamma) + 1) and the
/// max-form L^1 ceiling at time tau.
inline PsiCeiling psi_ceiling(const ModelParams& p, double u_linf, double tau, double w0, double c1, double c2) {
  PsiCeiling r;
  if (!(p.chi > 0.0)) {
    r.regime = "not applicable: requires chi > 0";
    return r;
  }
  require(tau > 0.0, "tau must be > 0");
  require(c1 > 0.0 && c2 > 0.0, "C1 and C2 must be > 0");
  const double g = p.gamma;
  const double a = c1 + std::pow(u_linf, g);
  r.applicable = true;
  r.regime = "d = 2, chi > 0, configured C1, C2";
  r.theta = theta(tau, u_linf > 0.0);
  r.psi = a / (p.chi * c2) * (r.theta / a + 1.0);
  r.bound = std::max(std::pow(r.psi, g / (2.0 + g)) * std::pow(w0, 2.0 / (2.0 + g)), r.psi);
  return r;
}

/// f_u(m, w) = m (C1 + chi^{mu(gamma-1)} |u|^gamma - chi C2 m^{2/gamma} (m + 2w)^{-(2-gamma)/gamma}).
inline double w_ode_forcing(double m, double w, const ModelParams& p, double u_linf, double c1, double c2) {
  const double g = p.gamma;
  const double flow = u_linf > 0.0 ? std::pow(p.chi, p.mu * (g - 1.0)) * std::pow(u_linf, g) : 0.0;
  return m * (c1 + flow - p.chi * c2 * std::pow(m, 2.0 / g) * std::pow(m + 2.0 * w, -(2.0 - g) / g));
}

/// Right-hand side bound of dw/dt: 2 delta chi^{-mu} w + f_u(m, w).
inline double w_ode_bound(double m, double w, const ModelParams& p, double u_linf, double c1, double c2) {
  const double linear = u_linf > 0.0 ? 2.0 * std::pow(p.chi, -p.mu) * w : 0.0;
  return linear + w_ode_forcing(m, w, p, u_linf, c1, c2);
}

/// Classical d = 2 virial prediction dm2/dt = 4 m0 (1 - chi m0 / (8 pi)).
inline double virial_slope(double m0, double chi) { return 4.0 * m0 * (1.0 - chi * m0 / (8.0 * std::numbers::pi)); }

/// Threshold test of the chemotactic lower-bound hypothesis
///   C chi m^{(alpha/2)(1 + 2/(2q - 2 + alpha))} < 2 N0^{-(2-alpha)/2}.
inline bool lower_bound_assumption_met(double mass, double n0, const ModelParams& p, double constant = 1.0) {
  const double a = p.alpha;
  const double lhs = constant * p.chi * std::pow(mass, 0.5 * a * (1.0 + 2.0 / (2.0 * p.q - 2.0 + a)));
  return lhs < 2.0 * std::pow(n0, -0.5 * (2.0 - a));
}

// --------------------------------------------------------- Cordoba gap

struct CordobaResult {
  double lhs = 0.0;  ///< int |f|^{p-2} f Lambda^alpha f
  double rhs = 0.0;  ///< (2/p) int (Lambda^{alpha/2} |f|^{p/2})^2
  double gap = 0.0;  ///< lhs - rhs
};

/// Positivity-lemma gap on the grid; both sides by spectral quadrature.
inline CordobaResult cordoba_check(const Field& f, double pexp, double alpha) {
  require(pexp >= 2.0, "Cordoba inequality requires p >= 2");
  require(alpha > 0.0 && alpha <= 2.0, "alpha must lie in (0,2]");
  const Grid& g = f.grid();
  const Field lap = frac_laplacian(f, alpha);
  Field h(g);
  auto hv = h.mutable_values();
  double lhs = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::abs(f[i]);
    lhs += std::pow(a, pexp - 2.0) * f[i] * lap[i];
    hv[i] = std::pow(a, 0.5 * pexp);
  }
  CordobaResult r;
  r.lhs = lhs * g.cell_volume();
  r.rhs = 2.0 / pexp * spectral_energy(apply_symbol(h.spectrum(), fractional_symbol(g, 0.5 * alpha)));
  r.gap = r.lhs - r.rhs;
  return r;
}

}  // namespace fracchemo
