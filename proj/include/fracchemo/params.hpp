#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fracchemo/errors.hpp"
#include "fracchemo/grid.hpp"

namespace fracchemo {

/// One Fourier mode of a custom stream function, psi += a cos(xi.x) + b sin(xi.x)
/// with xi = (pi / L) (jx, jy).
struct StreamMode {
  int jx = 0;
  int jy = 0;
  double cos_amp = 0.0;
  double sin_amp = 0.0;

  bool operator==(const StreamMode&) const = default;
};

/// Prescribed divergence-free flow u = (d_y psi, -d_x psi).
///   cellular: psi = A sin(k x) sin(k y)
///   shear:    psi = A cos(k y), so u = (-A k sin(k y), 0)
///   custom:   psi = sum of StreamMode terms
struct FlowSpec {
  enum class Kind { none, cellular, shear, custom };
  Kind kind = Kind::none;
  double amplitude = 0.0;
  double wavenumber = 1.0;
  std::vector<StreamMode> modes;

  bool is_none() const { return kind == Kind::none || (kind != Kind::custom && amplitude == 0.0) ||
                                (kind == Kind::custom && modes.empty()); }

  double stream(Point p, double half_width) const {
    const double x = p[0], y = p[1];
    switch (kind) {
      case Kind::none:
        return 0.0;
      case Kind::cellular:
        return amplitude * std::sin(wavenumber * x) * std::sin(wavenumber * y);
      case Kind::shear:
        return amplitude * std::cos(wavenumber * y);
      case Kind::custom: {
        const double unit = std::numbers::pi / half_width;
        double s = 0.0;
        for (const auto& m : modes) {
          const double phase = unit * (m.jx * x + m.jy * y);
          s += m.cos_amp * std::cos(phase) + m.sin_amp * std::sin(phase);
        }
        return s;
      }
    }
    return 0.0;
  }

  bool operator==(const FlowSpec&) const = default;
};

inline std::string to_string(FlowSpec::Kind k) {
  switch (k) {
    case FlowSpec::Kind::none: return "none";
    case FlowSpec::Kind::cellular: return "cellular";
    case FlowSpec::Kind::shear: return "shear";
    case FlowSpec::Kind::custom: return "custom";
  }
  return "none";
}

/// Physical and diagnostic parameters of
///   d_t rho + u.grad rho = -Lambda^alpha rho - chi div(rho grad (-Delta)^{-1} rho) - eps rho^q.
struct ModelParams {
  double alpha = 1.5;
  double chi = 0.0;
  double eps = 0.0;
  int q = 3;
  double gamma = 1.2;  ///< pseudo-moment order
  double beta = 1.4;   ///< weighted-norm exponent
  double mu = 0.0;     ///< free parameter of the w-moment inequality
  FlowSpec flow;

  /// gamma <= beta is the moment-finiteness hypothesis of the upper mass bound;
  /// on the periodic box it is recorded, not enforced.
  bool moment_hypothesis_holds() const { return gamma <= beta; }

  bool operator==(const ModelParams&) const = default;
};

/// Throws ParameterError quoting the first violated invariant.
inline void validate(const ModelParams& p) {
  auto fail = [](const std::string& msg) { throw ParameterError(msg); };
  if (!(p.alpha > 1.0 && p.alpha <= 2.0)) fail("alpha must lie in (1,2]");
  if (!(p.chi >= 0.0) || !std::isfinite(p.chi)) fail("chi must be >= 0");
  if (!(p.eps >= 0.0) || !std::isfinite(p.eps)) fail("eps must be >= 0");
  if (p.q < 1) fail("q must be an integer >= 1");
  if (p.chi > 0.0 && p.q <= 2) fail("q must be > 2 when chi > 0");
  if (!(p.beta >= 0.0 && p.beta < p.alpha)) fail("beta must lie in [0, alpha)");
  if (!(p.gamma > 1.0 && p.gamma < p.alpha)) fail("gamma must lie in (1, alpha)");
  if (!(p.mu >= 0.0)) fail("mu must be >= 0");
  if (p.flow.kind == FlowSpec::Kind::cellular || p.flow.kind == FlowSpec::Kind::shear) {
    if (!std::isfinite(p.flow.amplitude)) fail("flow amplitude must be finite");
    if (!(p.flow.wavenumber > 0.0)) fail("flow wavenumber must be positive");
  }
}

/// Checks that a flow is representable on the grid (periodic, resolved).
inline void validate_flow_on_grid(const FlowSpec& flow, const Grid& g) {
  if (flow.is_none()) return;
  require(g.dim() == 2, "flows require a two-dimensional grid");
  auto check_mode = [&](double j) {
    require(std::abs(j - std::round(j)) < 1e-9,
            "flow wavenumber must be a multiple of pi/L so that the flow is periodic on the box");
    require(std::abs(std::round(j)) < g.n() / 3, "flow wavenumber is not resolved on the grid");
  };
  if (flow.kind == FlowSpec::Kind::custom) {
    for (const auto& m : flow.modes) {
      check_mode(m.jx);
      check_mode(m.jy);
    }
  } else {
    check_mode(flow.wavenumber * g.half_width() / std::numbers::pi);
  }
}

}  // namespace fracchemo
