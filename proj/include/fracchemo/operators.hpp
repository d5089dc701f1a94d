#pragma once
// Spatial operators: fractional Laplacian, the chemotactic drift
// grad (-Delta)^{-1}, prescribed advection, and the absorbing reaction, with
// zero-padded (dealiased) products.

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fracchemo/errors.hpp"
#include "fracchemo/grid.hpp"
#include "fracchemo/params.hpp"

namespace fracchemo {

struct VectorField {
  std::vector<Field> components;
  const Field& operator[](std::size_t i) const { return components[i]; }
  std::size_t dim() const { return components.size(); }
};

/// Table of |xi|^alpha in half-complex layout. alpha == 2 returns the |xi|^2
/// table itself so that Lambda^2 and -Delta share one multiplier.
inline std::vector<double> fractional_symbol(const Grid& g, double alpha) {
  const auto k2 = g.k2();
  if (alpha == 2.0) return {k2.begin(), k2.end()};
  std::vector<double> s(k2.size());
  const double half = 0.5 * alpha;
  for (std::size_t e = 0; e < k2.size(); ++e) s[e] = k2[e] > 0.0 ? std::pow(k2[e], half) : 0.0;
  return s;
}

/// Lambda^alpha f through the multiplier |xi|^alpha; the mean is mapped to zero.
inline Field frac_laplacian(const Field& f, double alpha) {
  require(alpha > 0.0 && alpha <= 2.0, "fractional order must lie in (0,2]");
  const auto sym = fractional_symbol(f.grid(), alpha);
  return inverse(apply_symbol(f.spectrum(), sym));
}

/// grad (-Delta)^{-1} rho on the torus: multiplier i xi / |xi|^2, zero mode dropped.
inline std::vector<Spectrum> grad_inv_laplacian_spectra(const Spectrum& rho) {
  const Grid& g = rho.grid;
  require(g.dim() == 2, "grad_inv_laplacian requires a two-dimensional grid");
  const auto k2 = g.k2();
  std::vector<Spectrum> out;
  for (int axis = 0; axis < 2; ++axis) {
    Spectrum s(g);
    const auto k = g.derivative_symbol(axis);
    for (std::size_t e = 0; e < rho.modes.size(); ++e)
      s.modes[e] = k2[e] > 0.0 ? Complex(0.0, k[e] / k2[e]) * rho.modes[e] : Complex(0.0, 0.0);
    out.push_back(std::move(s));
  }
  return out;
}

inline VectorField grad_inv_laplacian(const Field& rho) {
  VectorField v;
  for (auto& s : grad_inv_laplacian_spectra(rho.spectrum())) v.components.push_back(inverse(s));
  return v;
}

/// Spectral divergence of a vector of spectra.
inline Spectrum divergence(const std::vector<Spectrum>& comps) {
  Spectrum out(comps.front().grid);
  for (std::size_t axis = 0; axis < comps.size(); ++axis) {
    const auto k = out.grid.derivative_symbol(int(axis));
    for (std::size_t e = 0; e < out.modes.size(); ++e) out.modes[e] += Complex(0.0, k[e]) * comps[axis].modes[e];
  }
  return out;
}

/// Smallest even padded size >= factor * n.
inline int padded_size(int n, double factor) {
  int m = int(std::ceil(factor * n - 1e-9));
  if (m % 2) ++m;
  return std::max(m, n);
}

/// Zero-padding transfer between an n-point grid and an M-point grid with the
/// same box. Nyquist modes of the coarse grid are dropped on the way up and
/// left empty on the way down.
class Dealiaser {
 public:
  Dealiaser(const Grid& g, int padded_n) : grid_(g), m_(padded_n), plan_(shared_plan(g.dim(), padded_n)) {
    const int n = g.n();
    const int half = n / 2 + 1;
    const int mhalf = m_ / 2 + 1;
    map_.assign(g.spectral_size(), kSkip);
    const int rows = g.dim() == 1 ? 1 : n;
    for (int r = 0; r < rows; ++r) {
      if (g.dim() == 2 && r == n / 2) continue;
      const int jr = g.dim() == 1 ? 0 : mode_of_index(r, n);
      const int rp = jr >= 0 ? jr : m_ + jr;
      for (int h = 0; h < half - 1; ++h)
        map_[std::size_t(r) * half + h] = std::size_t(rp) * mhalf + h;
    }
  }

  int padded_n() const { return m_; }
  std::size_t padded_size() const { return plan_->real_size(); }

  void to_padded(const Spectrum& s, std::vector<double>& values) const {
    buffer_.assign(plan_->complex_size(), Complex(0.0, 0.0));
    for (std::size_t e = 0; e < map_.size(); ++e)
      if (map_[e] != kSkip) buffer_[map_[e]] = s.modes[e];
    values.resize(plan_->real_size());
    plan_->inverse(buffer_.data(), values.data());
  }

  void from_padded(const std::vector<double>& values, Spectrum& s) const {
    buffer_.resize(plan_->complex_size());
    plan_->forward(values.data(), buffer_.data());
    const double inv = 1.0 / double(plan_->real_size());
    for (std::size_t e = 0; e < map_.size(); ++e)
      s.modes[e] = map_[e] != kSkip ? buffer_[map_[e]] * inv : Complex(0.0, 0.0);
  }

 private:
  static constexpr std::size_t kSkip = static_cast<std::size_t>(-1);
  Grid grid_;
  int m_;
  std::shared_ptr<const FftPlan> plan_;
  std::vector<std::size_t> map_;
  mutable std::vector<Complex> buffer_;
};

/// Flow realized on a grid: exact spectral velocity of the stream function,
/// sampled on the 3/2-padded grid used for advective products.
struct RealizedFlow {
  bool active = false;
  std::array<std::vector<double>, 2> padded;  // velocity on the padded grid
  std::array<Field, 2> velocity;              // velocity on the base grid
  double sup = 0.0;

  RealizedFlow(const Grid& g, const FlowSpec& spec, const Dealiaser& quad)
      : velocity{Field(g), Field(g)} {
    validate_flow_on_grid(spec, g);
    if (spec.is_none()) return;
    active = true;
    const double L = g.half_width();
    const Field psi = Field::sample(g, [&](Point p) { return spec.stream(p, L); });
    const Spectrum ux = derivative(psi.spectrum(), 1);
    Spectrum uy = derivative(psi.spectrum(), 0);
    for (auto& c : uy.modes) c = -c;
    velocity[0] = inverse(ux);
    velocity[1] = inverse(uy);
    quad.to_padded(ux, padded[0]);
    quad.to_padded(uy, padded[1]);
    for (std::size_t i = 0; i < g.size(); ++i)
      sup = std::max(sup, std::hypot(velocity[0][i], velocity[1][i]));
  }

  /// Pointwise spectral divergence of the realized velocity, max over the grid.
  double max_divergence() const {
    if (!active) return 0.0;
    const Spectrum d = divergence({velocity[0].spectrum(), velocity[1].spectrum()});
    const Field f = inverse(d);
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
};

/// Right-hand side evaluator bound to one grid and parameter set. Holds
/// per-instance scratch, so each worker owns its own Model.
class Model {
 public:
  Model(Grid grid, ModelParams params)
      : grid_(std::move(grid)),
        params_(checked(std::move(params), grid_)),
        quad_(grid_, padded_size(grid_.n(), 1.5)),
        power_(grid_, padded_size(grid_.n(), 0.5 * (params_.q + 1))),
        flow_(grid_, params_.flow, quad_),
        symbol_(fractional_symbol(grid_, params_.alpha)) {}

  const Grid& grid() const { return grid_; }
  const ModelParams& params() const { return params_; }
  const RealizedFlow& flow() const { return flow_; }
  std::span<const double> diffusion_symbol() const { return symbol_; }

  /// Everything except the fractional diffusion:
  ///   -div(u rho) - chi div(rho grad (-Delta)^{-1} rho) - eps rho^q.
  /// Advection uses divergence form, which equals u.grad rho for div u = 0.
  Spectrum nonlinear(const Spectrum& rho, double t = 0.0) const {
    Spectrum out(grid_);
    const bool chemo = params_.chi > 0.0;
    if (flow_.active || chemo) {
      quad_.to_padded(rho, rho_pad_);
      std::array<std::vector<double>, 2> drift;
      for (int a = 0; a < 2; ++a) drift[std::size_t(a)].assign(quad_.padded_size(), 0.0);
      if (flow_.active)
        for (int a = 0; a < 2; ++a) drift[std::size_t(a)] = flow_.padded[std::size_t(a)];
      if (chemo) {
        const auto grad_c = grad_inv_laplacian_spectra(rho);
        for (int a = 0; a < 2; ++a) {
          quad_.to_padded(grad_c[std::size_t(a)], tmp_);
          if (!all_finite(tmp_)) throw NumericError("non-finite value in the chemotactic drift grad(-Delta)^{-1} rho", t);
          auto& d = drift[std::size_t(a)];
          for (std::size_t i = 0; i < d.size(); ++i) d[i] += params_.chi * tmp_[i];
        }
      }
      std::vector<Spectrum> flux;
      for (int a = 0; a < 2; ++a) {
        auto& d = drift[std::size_t(a)];
        for (std::size_t i = 0; i < d.size(); ++i) d[i] *= rho_pad_[i];
        if (!all_finite(d))
          throw NumericError(chemo ? "non-finite value in the advective/chemotactic flux" : "non-finite value in the advection term", t);
        Spectrum s(grid_);
        quad_.from_padded(d, s);
        flux.push_back(std::move(s));
      }
      const Spectrum div = divergence(flux);
      for (std::size_t e = 0; e < out.modes.size(); ++e) out.modes[e] -= div.modes[e];
    }
    if (params_.eps > 0.0) {
      const Spectrum r = power_spectrum(rho, params_.q);
      for (std::size_t e = 0; e < out.modes.size(); ++e) {
        out.modes[e] -= params_.eps * r.modes[e];
        if (!std::isfinite(out.modes[e].real()) || !std::isfinite(out.modes[e].imag()))
          throw NumericError("non-finite value in the reaction term eps rho^q", t);
      }
    }
    return out;
  }

  /// Dealiased spectrum of rho^q (padding factor (q+1)/2).
  Spectrum power_spectrum(const Spectrum& rho, int q) const {
    if (q == 1) return rho;
    power_.to_padded(rho, tmp_);
    for (auto& v : tmp_) {
      const double b = v;
      double acc = b;
      for (int k = 1; k < q; ++k) acc *= b;
      v = acc;
    }
    Spectrum s(grid_);
    power_.from_padded(tmp_, s);
    return s;
  }

  /// Full right-hand side on the grid.
  Field rhs(const Field& rho, double t = 0.0) const {
    Spectrum total = nonlinear(rho.spectrum(), t);
    const auto& s = rho.spectrum();
    for (std::size_t e = 0; e < total.modes.size(); ++e) total.modes[e] -= symbol_[e] * s.modes[e];
    Field out = inverse(total);
    if (!all_finite(out.values())) throw NumericError("non-finite value in the fractional diffusion term", t);
    return out;
  }

  /// Largest chemotactic drift speed chi |grad (-Delta)^{-1} rho| on the grid.
  double drift_speed(const Spectrum& rho) const {
    if (params_.chi == 0.0) return 0.0;
    const auto gc = grad_inv_laplacian_spectra(rho);
    const Field gx = inverse(gc[0]);
    const Field gy = inverse(gc[1]);
    double m = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) m = std::max(m, std::hypot(gx[i], gy[i]));
    return params_.chi * m;
  }

 private:
  static ModelParams checked(ModelParams p, const Grid& g) {
    validate(p);
    require(p.chi == 0.0 || g.dim() == 2, "chemotaxis (chi > 0) requires a two-dimensional grid");
    return p;
  }

  Grid grid_;
  ModelParams params_;
  Dealiaser quad_;
  Dealiaser power_;
  RealizedFlow flow_;
  std::vector<double> symbol_;
  mutable std::vector<double> rho_pad_;
  mutable std::vector<double> tmp_;
};

/// Evaluates the right-hand side for a single state.
inline Field rhs(const Field& rho, const ModelParams& p, double t = 0.0) {
  return Model(rho.grid(), p).rhs(rho, t);
}

/// Relative residual of the chemotactic integration-by-parts identity on the box,
///   int rho^{q-1} div(rho grad Delta^{-1} rho) = (q-1)/q int rho^q (rho - mean rho),
/// where the mean appears because the periodic inverse Laplacian acts on rho - mean.
/// Both sides below 1e-10 int |rho|^{q+1} count as zero, so a constant state
/// reports 0 instead of a ratio of roundoff.
inline double chemo_identity_residual(const Field& rho, int q) {
  require(q >= 2, "chemotaxis identity requires an integer q >= 2");
  const Grid& g = rho.grid();
  const Dealiaser quad(g, padded_size(g.n(), 1.5));
  const Spectrum& s = rho.spectrum();
  auto gc = grad_inv_laplacian_spectra(s);
  std::vector<double> rp, cp;
  quad.to_padded(s, rp);
  std::vector<Spectrum> flux;
  for (auto& comp : gc) {
    quad.to_padded(comp, cp);
    for (std::size_t i = 0; i < cp.size(); ++i) cp[i] = -rp[i] * cp[i];  // rho grad Delta^{-1} rho
    Spectrum f(g);
    quad.from_padded(cp, f);
    flux.push_back(std::move(f));
  }
  const Field div = inverse(divergence(flux));
  const double mean = integrate(rho) / g.box_volume();
  double lhs = 0.0, rhs_sum = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = rho[i];
    const double rq1 = std::pow(r, q - 1);
    lhs += rq1 * div[i];
    rhs_sum += rq1 * r * (r - mean);
    scale += std::abs(rq1 * r * r);
  }
  lhs *= g.cell_volume();
  const double rhs_val = (q - 1.0) / q * rhs_sum * g.cell_volume();
  const double zero = 1e-10 * scale * g.cell_volume();
  if (std::abs(lhs) <= zero && std::abs(rhs_val) <= zero) return 0.0;
  return std::abs(lhs - rhs_val) / std::max(std::abs(rhs_val), 1e-30);
}

}  // namespace fracchemo
