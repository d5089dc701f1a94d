#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "fracchemo/diagnostics.hpp"

using namespace fracchemo;
using Catch::Approx;
using std::numbers::pi;

namespace {

Point random_point(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  return {u(rng), u(rng)};
}

}  // namespace

TEST_CASE("phi weight values and sandwich", "[diagnostics]") {
  CHECK(phi_weight({0.0, 0.0}, 1.5) == 0.0);
  CHECK(phi_weight({1.0, 0.0}, 2.0) == Approx(1.0).epsilon(1e-15));
  CHECK(phi_weight({0.6, 0.8}, 2.0) == Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(phi_weight({1.0, 0.0}, 1.0), ParameterError);
  CHECK_THROWS_AS(phi_weight({1.0, 0.0}, 2.5), ParameterError);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const Point x = random_point(rng, 20.0);
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
    const double phi = phi_weight(x, 1.5);
    CHECK(phi >= 0.0);
    CHECK(phi <= std::pow(r, 1.5) * (1 + 1e-14));
  }
  // radially increasing
  double prev = 0.0;
  for (int i = 1; i < 100; ++i) {
    const double v = phi_weight({0.1 * i, 0.0}, 1.3);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("gradient of phi matches finite differences", "[diagnostics]") {
  const Point x{0.7, -1.3};
  const double h = 1e-6;
  for (double gamma : {1.2, 1.5, 2.0}) {
    const Point g = grad_phi(x, gamma);
    const double dx = (phi_weight({x[0] + h, x[1]}, gamma) - phi_weight({x[0] - h, x[1]}, gamma)) / (2 * h);
    const double dy = (phi_weight({x[0], x[1] + h}, gamma) - phi_weight({x[0], x[1] - h}, gamma)) / (2 * h);
    CHECK(g[0] == Approx(dx).epsilon(1e-8));
    CHECK(g[1] == Approx(dy).epsilon(1e-8));
  }
}

TEST_CASE("gradient inequality", "[diagnostics]") {
  // the radial ratio decreases to 2/gamma at the origin
  double prev = 0.0;
  for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const auto c = grad_phi_inequality_check({r, 0.0}, 1.5);
    CHECK(c.holds);
    CHECK(c.radial_ratio < 4.0 / 3.0);
    CHECK(c.radial_ratio > prev);
    prev = c.radial_ratio;
  }
  CHECK(prev == Approx(4.0 / 3.0).epsilon(1e-6));

  // |x| = 10, gamma = 1.2 evaluated directly
  const double phi = std::pow(101.0, 0.6) - 1.0;
  const double lhs = std::pow(std::pow(101.0, -0.4) * 10.0, 6.0);
  const auto c = grad_phi_inequality_check({10.0, 0.0}, 1.2);
  CHECK(c.lhs == Approx(lhs).epsilon(1e-12));
  CHECK(c.rhs == Approx(2.0 / 1.2 * phi).epsilon(1e-12));
  CHECK(c.holds);
  CHECK(c.slack > 0.0);

  CHECK_THROWS_AS(grad_phi_inequality_check({1.0, 0.0}, 2.0), ParameterError);
  CHECK_THROWS_AS(grad_phi_inequality_check({0.0, 0.0}, 1.5), ParameterError);
}

TEST_CASE("convexity gap", "[diagnostics]") {
  // gamma = 2: grad phi = 2x, so LHS = 2 |x - y|^2 and the gap is |x - y|^2 (2 - 1/3)
  const Point x{0.3, 0.4};
  const Point y{-0.3, -0.4};
  CHECK(convexity_gap(x, y, 2.0) == Approx(4 * 0.25 * (2.0 - 1.0 / 3.0)).epsilon(1e-14));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    Point a, b;
    do a = {u(rng), u(rng)}; while (norm2(a) > 1.0);
    do b = {u(rng), u(rng)}; while (norm2(b) > 1.0);
    CHECK(convexity_gap(a, b, 1.5) >= -1e-12);
  }

  // small separation: the gap approaches the Hessian quadratic form minus the right side
  const Point p{0.8, -0.5};
  const double gamma = 1.5, h = 1e-4;
  auto hess = [&](int i, int j) {
    Point e1{0, 0}, e2{0, 0};
    e1[std::size_t(i)] = h;
    e2[std::size_t(j)] = h;
    auto f = [&](double s1, double s2) {
      return phi_weight({p[0] + s1 * e1[0] + s2 * e2[0], p[1] + s1 * e1[1] + s2 * e2[1]}, gamma);
    };
    return (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / (4 * h * h);
  };
  const double eps = 1e-5;
  const double quad = hess(0, 0);
  const double r = std::sqrt(norm2(p));
  const double expected = quad - (gamma - 1) / (1 + 2 * std::pow(r, 2 - gamma));
  CHECK(convexity_gap({p[0] + eps, p[1]}, p, gamma) / (eps * eps) == Approx(expected).epsilon(1e-4));
  CHECK(expected > 0.0);
}

TEST_CASE("w moment", "[diagnostics]") {
  const Grid g = make_grid(2, 64, 8.0);  // dx = 0.25, so (+-1, 0) and (0, +-1) are nodes
  Field cell(g);
  cell.mutable_values()[32 * 64 + 32] = 1.0 / g.cell_volume();
  CHECK(w_moment(cell, 1.5, {0.0, 0.0}) == 0.0);

  Field ring(g);
  for (std::size_t i : {std::size_t(36 * 64 + 32), std::size_t(28 * 64 + 32), std::size_t(32 * 64 + 36),
                        std::size_t(32 * 64 + 28)})
    ring.mutable_values()[i] = 0.25 / g.cell_volume();
  CHECK(w_moment(ring, 2.0, {0.0, 0.0}) == Approx(1.0).epsilon(1e-14));

  const Grid fine = make_grid(2, 256, 12.0);
  const double sigma = 1.3;
  const Field gauss = Field::sample(fine, [&](Point p) {
    return std::exp(-(p[0] * p[0] + p[1] * p[1]) / (2 * sigma * sigma)) / (2 * pi * sigma * sigma);
  });
  auto radial = [&](double r) {
    return (std::pow(1 + r * r, 0.75) - 1) * std::exp(-r * r / (2 * sigma * sigma)) / (sigma * sigma) * r;
  };
  const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(radial, 0.0, 15 * sigma, 15, 1e-15);
  CHECK(w_moment(gauss, 1.5, {0.0, 0.0}) == Approx(oracle).epsilon(1e-6));
  CHECK(w_moment(gauss, 1.5, centre_of_mass(gauss)) == Approx(oracle).epsilon(1e-6));
}

TEST_CASE("evaluator records", "[diagnostics]") {
  const Grid g = make_grid(2, 128, 10.0);
  ModelParams p;
  p.q = 3;
  p.gamma = 1.2;
  const double sigma = 1.0;
  const Field rho = Field::sample(g, [&](Point x) {
    return std::exp(-((x[0] - 0.5) * (x[0] - 0.5) + x[1] * x[1]) / (2 * sigma * sigma));
  });
  const Evaluator ev(g, p, centre_of_mass(rho));
  const auto r = ev(rho, 0.25, 0.01);
  CHECK(r.t == 0.25);
  CHECK(r.dt_used == 0.01);
  CHECK(r.mass == Approx(2 * pi).epsilon(1e-12));
  CHECK(r.l2 == Approx(std::sqrt(pi)).epsilon(1e-12));
  CHECK(r.lq == Approx(std::cbrt(2 * pi / 3)).epsilon(1e-12));
  CHECK(r.reaction_integral == Approx(2 * pi / 3).epsilon(1e-12));
  CHECK(r.linf == Approx(1.0).margin(0.01));
  CHECK(r.m2 == Approx(2 * pi * 2).epsilon(1e-10));
  CHECK(r.min_rho >= 0.0);
  CHECK(r.linf >= r.l2 / std::sqrt(g.box_volume()));
  CHECK(record_finite(r));
  // |rho^(k)|^2 = 4 pi^2 e^{-k^2}, so ||rho||_{H^3}^2 = 2 pi int_0^inf (1 + k^2)^3 e^{-k^2} k dk
  auto hs_integrand = [](double k) { return std::pow(1 + k * k, 3) * std::exp(-k * k) * k; };
  const double hs2 = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(hs_integrand, 0.0, 30.0, 10, 1e-15);
  CHECK(r.hs == Approx(std::sqrt(2 * pi * hs2)).epsilon(1e-10));
  // M_beta: int (rho + |grad rho|)(1 + |x - c|^beta); the kink of |x - c|^beta at the
  // centre limits the grid quadrature to algebraic accuracy
  auto mb = [&](double s) {
    const double rho_s = std::exp(-s * s / 2);
    return (rho_s + s * rho_s) * (1 + std::pow(s, p.beta)) * 2 * pi * s;
  };
  const double mb_oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(mb, 0.0, 12.0, 10, 1e-15);
  CHECK(r.m_beta == Approx(mb_oracle).epsilon(1e-4));
}

TEST_CASE("theorem constants", "[diagnostics]") {
  ModelParams p;
  p.chi = 1;
  p.eps = 1;
  p.q = 3;
  CHECK(n0_ceiling(p, 2.0).value == 2.0);
  CHECK(n0_ceiling(p, 2.0).applicable);
  p.chi = 8;
  p.eps = 2;
  p.q = 4;
  CHECK(n0_ceiling(p, 1.0).value == Approx(2.0).epsilon(1e-15));
  p.eps = 0;
  CHECK_FALSE(n0_ceiling(p, 1.0).applicable);

  ModelParams c;
  c.chi = 0;
  c.eps = 1;
  c.q = 3;
  c.alpha = 1.5;
  const auto c0 = c0_floor(c, 2, 1.0, 1.0);
  CHECK(c0.applicable);
  CHECK(c0.value == Approx(std::pow(2.0, -1.5)).epsilon(1e-14));
  c.q = 1;
  c.alpha = 1.9;
  CHECK_FALSE(c0_floor(c, 2, 1.0, 1.0).applicable);
  c.q = 3;
  c.chi = 1;
  CHECK_FALSE(c0_floor(c, 2, 1.0, 1.0).applicable);

  ModelParams s;
  s.chi = 10;
  const auto psi = psi_ceiling(s, 0.0, 1.0, 0.5, 1.0, 1.0);
  CHECK(psi.applicable);
  CHECK(psi.psi == Approx(0.2).epsilon(1e-15));
  CHECK(psi.bound == Approx(std::max(std::pow(0.2, 1.2 / 3.2) * std::pow(0.5, 2 / 3.2), 0.2)).epsilon(1e-14));
  CHECK(psi_ceiling(s, 0.0, 1e12, 0.5, 1.0, 1.0).psi == Approx(1.0 / 10).epsilon(1e-10));
  CHECK(theta(1e3, true) == Approx(2.0).epsilon(1e-15));
  CHECK(theta(0.5, false) == 2.0);
  s.chi = 0;
  CHECK_FALSE(psi_ceiling(s, 0.0, 1.0, 0.5, 1.0, 1.0).applicable);

  CHECK(virial_slope(4 * pi, 1.0) == Approx(8 * pi).epsilon(1e-15));
  CHECK(virial_slope(8 * pi, 1.0) == Approx(0.0).margin(1e-12));
  CHECK(virial_slope(16 * pi, 1.0) == Approx(-64 * pi).epsilon(1e-15));
}

TEST_CASE("w inequality forcing", "[diagnostics]") {
  ModelParams p;
  p.chi = 2;
  p.gamma = 1.5;
  p.mu = 0.5;
  // without flow the linear term is absent
  CHECK(w_ode_bound(1.0, 0.3, p, 0.0, 1.0, 1.0) == Approx(w_ode_forcing(1.0, 0.3, p, 0.0, 1.0, 1.0)));
  const double f = 1.0 * (1.0 - 2.0 * std::pow(1.6, -1.0 / 3.0));
  CHECK(w_ode_forcing(1.0, 0.3, p, 0.0, 1.0, 1.0) == Approx(f).epsilon(1e-14));
  const double flow = std::pow(2.0, 0.25) * std::pow(0.5, 1.5);
  CHECK(w_ode_bound(1.0, 0.3, p, 0.5, 1.0, 1.0) == Approx(2 * std::pow(2.0, -0.5) * 0.3 + f + flow).epsilon(1e-14));
}

TEST_CASE("Cordoba gap", "[diagnostics]") {
  const Grid g = make_grid(2, 64, pi);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<std::array<double, 4>> modes;
  for (int i = 0; i < 6; ++i) modes.push_back({double(int(rng() % 4)), double(int(rng() % 4)), n01(rng), n01(rng)});
  const Field f = Field::sample(g, [&](Point x) {
    double v = 6.0;
    for (auto& m : modes) v += 0.3 * (m[2] * std::cos(m[0] * x[0] + m[1] * x[1]) + m[3] * std::sin(m[0] * x[0] - m[1] * x[1]));
    return v;
  });
  for (double alpha : {1.2, 1.5, 2.0}) {
    const auto p2 = cordoba_check(f, 2.0, alpha);
    CHECK(std::abs(p2.gap) <= 1e-10 * p2.lhs);
    const auto p4 = cordoba_check(f, 4.0, alpha);
    CHECK(p4.gap >= -1e-8 * p4.lhs);
  }
  const Grid fine = make_grid(2, 256, pi);
  const Field mode = Field::sample(fine, [](Point x) { return std::cos(x[0] + 2 * x[1]); });
  const auto m3 = cordoba_check(mode, 3.0, 1.2);
  CHECK(m3.gap >= 0.0);
  // LHS for a single mode: |k|^alpha int |cos|^3 = |k|^alpha (2 pi)^2 * 4/(3 pi)
  CHECK(m3.lhs == Approx(std::pow(5.0, 0.6) * 4 * pi * pi * 4 / (3 * pi)).epsilon(1e-8));
  CHECK_THROWS_AS(cordoba_check(mode, 1.5, 1.2), ParameterError);
}
