#pragma once
// Oracle comparison suites shared by the CLI and the acceptance binary.

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fracchemo/kernel.hpp"
#include "fracchemo/operators.hpp"
#include "fracchemo/oracle.hpp"

namespace fracchemo {

struct SuiteCheck {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline SuiteCheck make_check(std::string name, double measured, double tolerance) {
  return {std::move(name), measured, tolerance, std::isfinite(measured) && measured <= tolerance};
}

inline bool all_pass(const std::vector<SuiteCheck>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

/// Spectral Lambda^alpha against the P.V. quadrature on Gaussian and polynomial-Gaussian
/// bumps, plus the plane-wave eigenfunction identity. Errors are relative to
/// max(|oracle|, |peak|): the box adds periodic images of order (2L)^{-d-alpha}.
inline std::vector<SuiteCheck> laplacian_suite() {
  namespace tf = test_functions;
  const double pi = std::numbers::pi;
  std::vector<SuiteCheck> out;
  const Grid g1 = make_grid(1, 16384, 64 * pi);
  const Grid g2 = make_grid(2, 512, 16 * pi);
  for (double alpha : {1.1, 1.5, 1.9}) {
    const std::string a = std::to_string(alpha).substr(0, 3);
    double worst1 = 0.0;
    for (const auto& f : {tf::gaussian(1, {0.3, 0.0}, 1.0), tf::poly_gaussian(1, {0.0, 0.0}, 1.2, {0.5, 0.3, -0.4})}) {
      const Field lap = frac_laplacian(Field::sample(g1, f.value), alpha);
      const double peak = std::abs(lap[8192]);
      for (int off : {-300, -40, 0, 25, 170}) {
        const std::size_t i = std::size_t(8192 + off);
        const double pv = pv_frac_laplacian(f, alpha, g1.point(i)).value;
        worst1 = std::max(worst1, std::abs(lap[i] - pv) / std::max(std::abs(pv), peak));
      }
    }
    out.push_back(make_check("lap d=1 alpha=" + a + " spectral vs P.V.", worst1, 1e-4));

    const auto f = tf::gaussian(2, {0.3, -0.2}, 1.0);
    const Field lap = frac_laplacian(Field::sample(g2, f.value), alpha);
    const double peak = std::abs(lap[256 * 512 + 256]);
    double worst2 = 0.0;
    for (std::size_t i : {std::size_t(256 * 512 + 256), std::size_t(263 * 512 + 249), std::size_t(248 * 512 + 268)}) {
      const double pv = pv_frac_laplacian(f, alpha, g2.point(i)).value;
      worst2 = std::max(worst2, std::abs(lap[i] - pv) / std::max(std::abs(pv), peak));
    }
    out.push_back(make_check("lap d=2 alpha=" + a + " spectral vs P.V.", worst2, 1e-4));

    for (int d : {1, 2}) {
      const Grid g = make_grid(d, 64, pi);
      const Point k{3.0, d == 2 ? 4.0 : 0.0};
      const double lam = std::pow(std::hypot(k[0], k[1]), alpha);
      const auto w = tf::plane_wave(d, k, 0.3);
      const Field f0 = Field::sample(g, w.value);
      const Field lw = frac_laplacian(f0, alpha);
      double err = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(lw[i] - lam * f0[i]));
      const Point x{0.2, d == 2 ? -0.1 : 0.0};
      const double pv = pv_frac_laplacian(w, alpha, x).value;
      err = std::max(err / lam, std::abs(pv - lam * w.value(x)) / lam);
      out.push_back(make_check("plane wave d=" + std::to_string(d) + " alpha=" + a + " eigenvalue", err, 1e-6));
    }
  }
  return out;
}

/// Kernel mass, self-similarity, closed forms at alpha = 2 and alpha = 1, and tail slopes.
inline std::vector<SuiteCheck> kernel_suite() {
  const double pi = std::numbers::pi;
  std::vector<SuiteCheck> out;
  for (double alpha : {1.0, 1.5, 2.0})
    for (int d : {1, 2})
      out.push_back(make_check("mass alpha=" + std::to_string(alpha).substr(0, 3) + " d=" + std::to_string(d),
                               std::abs(kernel_mass(alpha, d, 1.0) - 1.0), 1e-6));

  std::mt19937_64 rng(7);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * double(rng() >> 11) * 0x1.0p-53; };
  double ss = 0.0;
  for (double alpha : {1.1, 1.5, 1.9})
    for (int d : {1, 2})
      for (int trial = 0; trial < 6; ++trial) {
        const double t = uni(0.05, 5.0), r = uni(0.0, 6.0);
        const double lhs = radial_kernel(alpha, d, t, r);
        const double rhs = std::pow(t, -d / alpha) * radial_kernel(alpha, d, 1.0, r / std::pow(t, 1.0 / alpha));
        ss = std::max(ss, std::abs(lhs - rhs) / std::abs(rhs));
      }
  out.push_back(make_check("self-similarity", ss, 1e-8));

  double gauss = 0.0, cauchy = 0.0;
  for (int d : {1, 2})
    for (double t : {0.3, 1.0, 2.5}) {
      for (double s : {0.0, 0.7, 1.5, 3.0, 6.0}) {
        const double r = s * std::sqrt(t);
        const double exact = std::exp(-r * r / (4 * t)) / std::pow(4 * pi * t, 0.5 * d);
        gauss = std::max(gauss, std::abs(radial_kernel(2.0, d, t, r) - exact) / exact);
      }
      for (double s : {0.0, 0.7, 3.0, 10.0, 40.0}) {
        const double r = s * t;
        const double c = d == 1 ? 1.0 / pi : 1.0 / (2 * pi);
        const double exact = c * t / std::pow(t * t + r * r, 0.5 * (d + 1));
        cauchy = std::max(cauchy, std::abs(radial_kernel(1.0, d, t, r) - exact) / exact);
      }
    }
  out.push_back(make_check("alpha=2 Gaussian closed form", gauss, 1e-6));
  out.push_back(make_check("alpha=1 Poisson closed form", cauchy, 1e-6));

  for (double alpha : {1.0, 1.5})
    for (int d : {1, 2}) {
      const double expected = -(d + alpha);
      out.push_back(make_check("tail slope alpha=" + std::to_string(alpha).substr(0, 3) + " d=" + std::to_string(d),
                               std::abs(tail_exponent(alpha, d) - expected) / std::abs(expected), 0.05));
    }
  return out;
}

/// Spectral grad (-Delta)^{-1} against direct free-space summation; the torus adds
/// (m/V)(x - x_cm)/2, which is subtracted before comparing.
inline std::vector<SuiteCheck> newtonian_suite() {
  const double pi = std::numbers::pi;
  std::vector<SuiteCheck> out;
  const Grid g = make_grid(2, 64, 16 * pi);
  for (double sigma : {3.0, 4.0}) {
    const Field rho = Field::sample(g, [&](Point p) {
      return std::exp(-(p[0] * p[0] + p[1] * p[1]) / (2 * sigma * sigma)) / (2 * pi * sigma * sigma);
    });
    const VectorField per = grad_inv_laplacian(rho);
    const double m = integrate(rho);
    double worst = 0.0;
    for (std::size_t i : {std::size_t(34 * 64 + 32), std::size_t(30 * 64 + 35), std::size_t(36 * 64 + 29)}) {
      const Point x = g.point(i);
      const auto direct = direct_newtonian_grad(rho, x);
      const double hx = m / g.box_volume() * x[0] / 2, hy = m / g.box_volume() * x[1] / 2;
      worst = std::max(worst, std::hypot(per[0][i] - hx - direct[0], per[1][i] - hy - direct[1]) / std::hypot(direct[0], direct[1]));
    }
    out.push_back(make_check("grad inverse Laplacian sigma=" + std::to_string(int(sigma)) + " vs direct sum", worst, 1e-3));
  }
  // Point mass: free-space field -x / (2 pi |x|^2).
  const Grid gp = make_grid(2, 32, 8.0);
  Field point(gp);
  point.mutable_values()[16 * 32 + 16] = 1.0 / gp.cell_volume();
  double worst = 0.0;
  for (std::size_t i : {std::size_t(16 * 32 + 22), std::size_t(10 * 32 + 16), std::size_t(25 * 32 + 27)}) {
    const Point x = gp.point(i);
    const auto v = direct_newtonian_grad(point, x);
    const double r2 = x[0] * x[0] + x[1] * x[1];
    worst = std::max(worst, std::hypot(v[0] + x[0] / (2 * pi * r2), v[1] + x[1] / (2 * pi * r2)) * 2 * pi * std::sqrt(r2));
  }
  out.push_back(make_check("direct sum of a point mass", worst, 1e-2));
  return out;
}

}  // namespace fracchemo
