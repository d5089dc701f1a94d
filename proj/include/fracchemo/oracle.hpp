#pragma once
// Brute-force reference implementations: the singular-integral fractional
// Laplacian on analytic callables, direct Newtonian summation, and c_{d,alpha}.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fracchemo/errors.hpp"
#include "fracchemo/grid.hpp"
#include "fracchemo/kernel.hpp"

namespace fracchemo {

/// c_{d,alpha} = 2^{alpha-1} alpha Gamma((d+alpha)/2) / (pi^{d/2} Gamma(1 - alpha/2)),
/// the constant of the singular-integral form of Lambda^alpha.
inline double c_norm(int d, double alpha) {
  require(d >= 1 && d <= 3, "c_norm dimension must be 1, 2 or 3");
  require(alpha > 0.0 && alpha < 2.0, "c_norm requires alpha in (0,2); the formula has a pole at alpha = 2");
  const double log_c = (alpha - 1.0) * std::log(2.0) + std::log(alpha) + std::lgamma(0.5 * (d + alpha)) -
                       0.5 * d * std::log(std::numbers::pi) - std::lgamma(1.0 - 0.5 * alpha);
  return std::exp(log_c);
}

/// Analytic test function on R^d (d <= 2). `laplacian` feeds the Taylor-compensated
/// inner ball; `spherical_mean(x, r)` (average of f over the sphere of radius r
/// about x), when present, replaces the numerical angular quadrature and allows
/// non-decaying functions.
struct TestFunction {
  std::string name;
  int d = 1;
  std::function<double(Point)> value;
  std::function<double(Point)> laplacian;
  std::function<double(Point, double)> spherical_mean;
  double length_scale = 1.0;          ///< smallest feature size
  std::optional<Point> centre;        ///< centre of the bulk for decaying functions
  double support_radius = 0.0;        ///< f is below roundoff beyond centre + support_radius
  double far_mean = 0.0;              ///< limit of the spherical mean as r -> infinity
};

namespace test_functions {

/// amplitude * exp(-|x - c|^2 / (2 sigma^2))
inline TestFunction gaussian(int d, Point c, double sigma, double amplitude = 1.0) {
  TestFunction f;
  f.name = "gaussian";
  f.d = d;
  const double s2 = sigma * sigma;
  auto r2 = [=](Point p) {
    const double a = p[0] - c[0], b = d == 2 ? p[1] - c[1] : 0.0;
    return a * a + b * b;
  };
  f.value = [=](Point p) { return amplitude * std::exp(-r2(p) / (2 * s2)); };
  f.laplacian = [=](Point p) { return amplitude * std::exp(-r2(p) / (2 * s2)) * (r2(p) / (s2 * s2) - d / s2); };
  f.length_scale = sigma;
  f.centre = c;
  f.support_radius = 9.0 * sigma;
  return f;
}

/// (1 + a1 (x - cx) + a2 (y - cy)^2 + a3 (x - cx)(y - cy)) exp(-|x - c|^2 / (2 sigma^2)); the y terms vanish for d = 1.
inline TestFunction poly_gaussian(int d, Point c, double sigma, std::array<double, 3> a) {
  TestFunction f;
  f.name = "poly-gaussian";
  f.d = d;
  const double s2 = sigma * sigma;
  f.value = [=](Point p) {
    const double u = p[0] - c[0], v = d == 2 ? p[1] - c[1] : 0.0;
    return (1.0 + a[0] * u + a[1] * v * v + a[2] * u * v) * std::exp(-(u * u + v * v) / (2 * s2));
  };
  f.laplacian = [=](Point p) {
    const double u = p[0] - c[0], v = d == 2 ? p[1] - c[1] : 0.0;
    const double g = std::exp(-(u * u + v * v) / (2 * s2));
    const double P = 1.0 + a[0] * u + a[1] * v * v + a[2] * u * v;
    // Delta(P g) = g (Delta P + 2 grad P . grad log g + P (|grad log g|^2 + Delta log g))
    const double Px = a[0] + a[2] * v, Py = 2 * a[1] * v + a[2] * u;
    const double lapP = d == 2 ? 2 * a[1] : 0.0;
    const double gradP_dot = -(Px * u + (d == 2 ? Py * v : 0.0)) / s2;
    const double rr = u * u + v * v;
    return g * (lapP + 2 * gradP_dot + P * (rr / (s2 * s2) - d / s2));
  };
  f.length_scale = sigma;
  f.centre = c;
  f.support_radius = 10.0 * sigma;
  return f;
}

/// amplitude cos(k.x + phase); Lambda^alpha acts as |k|^alpha.
inline TestFunction plane_wave(int d, Point k, double phase = 0.0, double amplitude = 1.0) {
  TestFunction f;
  f.name = "plane-wave";
  f.d = d;
  const double kx = k[0], ky = d == 2 ? k[1] : 0.0;
  const double kk = std::hypot(kx, ky);
  f.value = [=](Point p) { return amplitude * std::cos(kx * p[0] + ky * p[1] + phase); };
  f.laplacian = [=](Point p) { return -kk * kk * amplitude * std::cos(kx * p[0] + ky * p[1] + phase); };
  f.spherical_mean = [=](Point p, double r) {
    const double base = amplitude * std::cos(kx * p[0] + ky * p[1] + phase);
    return base * (d == 1 ? std::cos(kk * r) : boost::math::cyl_bessel_j(0, kk * r));
  };
  f.length_scale = kk > 0.0 ? 1.0 / kk : 1.0;
  return f;
}

inline TestFunction constant(int d, double c) {
  TestFunction f;
  f.name = "constant";
  f.d = d;
  f.value = [=](Point) { return c; };
  f.laplacian = [](Point) { return 0.0; };
  f.spherical_mean = [=](Point, double) { return c; };
  f.far_mean = c;
  return f;
}

}  // namespace test_functions

/// Radii are in units of the test function's length_scale; outer_cut = 0 picks
/// the support radius (decaying functions) or 4000 length scales (spherical means).
struct QuadratureSpec {
  double inner_cut = 1e-3;
  double outer_cut = 0.0;
  long panels = 400000;
};

struct PvResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
};

namespace detail {

/// Average over the unit sphere of (2 f(x) - f(x + r w) - f(x - r w)) / 2.
inline double symmetric_difference_mean(const TestFunction& f, Point x, double r, double fx) {
  if (f.spherical_mean) return fx - f.spherical_mean(x, r);
  if (f.d == 1) return fx - 0.5 * (f.value({x[0] + r, 0.0}) + f.value({x[0] - r, 0.0}));
  // Periodic trapezoid over the half circle (w and -w pair up), doubled until stable.
  auto mean_at = [&](int m) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      const double th = std::numbers::pi * (j + 0.5) / m;
      const double c = std::cos(th) * r, sn = std::sin(th) * r;
      s += f.value({x[0] + c, x[1] + sn}) + f.value({x[0] - c, x[1] - sn});
    }
    return fx - 0.5 * s / m;
  };
  int m = std::max(16, int(4.0 * r / f.length_scale) + 16);
  double prev = mean_at(m);
  for (int it = 0; it < 6; ++it) {
    m *= 2;
    const double cur = mean_at(m);
    if (std::abs(cur - prev) <= 1e-14 * (std::abs(fx) + std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace detail

/// Lambda^alpha f(x) = c_{d,alpha} P.V. int (f(x) - f(y)) / |x - y|^{d+alpha} dy.
/// The symmetrized integrand removes the odd part; the inner ball uses the
/// Taylor term -(Delta f / 2d) |S| r^{2-alpha}/(2-alpha); the far region
/// beyond outer_cut contributes (f(x) - far_mean) |S| R^{-alpha}/alpha. The error estimate
/// combines the quadrature error, the next Taylor order, and the change
/// between truncation at R and R/2.
inline PvResult pv_frac_laplacian(const TestFunction& f, double alpha, Point x, const QuadratureSpec& spec = {}) {
  require(alpha > 0.0 && alpha < 2.0, "pv_frac_laplacian requires alpha in (0,2)");
  require(f.d == 1 || f.d == 2, "pv_frac_laplacian supports d = 1, 2");
  require(spec.inner_cut > 0.0, "inner_cut must be positive");
  const int d = f.d;
  const double S = sphere_area(d);
  const double ell = f.length_scale;
  const double r_in = spec.inner_cut * ell;
  double R = spec.outer_cut * ell;
  if (R <= 0.0) {
    if (f.spherical_mean) {
      R = 4000.0 * ell;
    } else {
      require(f.centre.has_value(), "test function without a spherical mean must be decaying");
      const double dist = std::hypot(x[0] - (*f.centre)[0], d == 2 ? x[1] - (*f.centre)[1] : 0.0);
      R = dist + f.support_radius;
    }
  }
  require(r_in < R, "inner_cut must be below outer_cut");

  const double fx = f.value(x);
  PvResult res;
  const double inner = -0.5 * f.laplacian(x) / d * S * std::pow(r_in, 2.0 - alpha) / (2.0 - alpha);

  auto integrand = [&](double r) {
    const double g = f.d == 1 ? 2.0 * detail::symmetric_difference_mean(f, x, r, fx)
                              : 2.0 * std::numbers::pi * detail::symmetric_difference_mean(f, x, r, fx);
    return g * std::pow(r, -1.0 - alpha);
  };

  // Panels double from r_in up to width ell/2, then stay at ell/2.
  std::vector<double> breaks{r_in};
  while (breaks.back() < R) {
    const double b = breaks.back();
    breaks.push_back(std::min(R, b + std::min(b, 0.5 * ell)));
  }
  if (long(breaks.size()) > spec.panels) {
    res.converged = false;
    breaks.resize(std::size_t(spec.panels));
    R = breaks.back();
  }
  double body = 0.0, quad_err = 0.0, half_mark = 0.0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    double err = 0.0;
    body += boost::math::quadrature::gauss_kronrod<double, 21>::integrate(integrand, breaks[p], breaks[p + 1], 5, 1e-13, &err);
    quad_err += err;
    if (breaks[p + 1] <= 0.5 * R) half_mark = body;
  }
  const double far = (fx - f.far_mean) * S * std::pow(R, -alpha) / alpha;
  const double far_half = (fx - f.far_mean) * S * std::pow(0.5 * R, -alpha) / alpha;
  const double c = c_norm(d, alpha);
  res.value = c * (inner + body + far);
  const double truncation = std::abs((half_mark + far_half) - (body + far));
  const double taylor = std::abs(inner) * std::pow(r_in / ell, 2);
  res.error_estimate = c * (truncation + taylor + quad_err) + 1e-14 * std::abs(res.value);
  return res;
}

/// Free-space grad (-Delta)^{-1} rho at x in 2-D by direct summation,
/// -(1/2 pi) sum_y (x - y)/|x - y|^2 rho(y) dx^2. When x is a grid node its own
/// cell is replaced by the linear-Taylor value grad rho(x) dx^2 / (4 pi)
/// (the cell average of z z^T/|z|^2 is I/2), with grad rho from fourth-order
/// centred differences; off-node points use the plain sum.
inline std::array<double, 2> direct_newtonian_grad(const Field& rho, Point x) {
  const Grid& g = rho.grid();
  require(g.dim() == 2, "direct Newtonian summation is two-dimensional");
  require(g.n() <= 64, "direct Newtonian summation is refused above 64^2 points (O(n^4) cost)");
  const double half_cell = 0.5 * g.dx();
  const double pi = std::numbers::pi;
  std::array<double, 2> out{0.0, 0.0};
  std::optional<std::size_t> self;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point y = g.point(i);
    const double a = x[0] - y[0], b = x[1] - y[1];
    if (std::abs(a) < half_cell && std::abs(b) < half_cell) {
      if (std::hypot(a, b) <= 1e-12 * g.dx()) self = i;
      continue;
    }
    const double r2 = a * a + b * b;
    out[0] += a / r2 * rho[i];
    out[1] += b / r2 * rho[i];
  }
  const double scale = -g.cell_volume() / (2 * pi);
  out = {scale * out[0], scale * out[1]};
  if (self) {
    const std::size_t n = std::size_t(g.n());
    const std::size_t i = *self / n, j = *self % n;
    auto at = [&](std::size_t a, std::size_t b) { return rho[(a % n) * n + b % n]; };
    const double w = g.cell_volume() / (4 * pi) / (12 * g.dx());
    out[0] += w * (-at(i + 2, j) + 8 * at(i + 1, j) - 8 * at(i + n - 1, j) + at(i + n - 2, j));
    out[1] += w * (-at(i, j + 2) + 8 * at(i, j + 1) - 8 * at(i, j + n - 1) + at(i, j + n - 2));
  }
  return out;
}

}  // namespace fracchemo
