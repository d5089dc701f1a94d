#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "fracchemo/operators.hpp"

using namespace fracchemo;
using Catch::Approx;
using std::numbers::pi;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double sup(const Field& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

/// Smooth band-limited field: a few random modes with |j| <= jmax plus an offset.
Field band_limited(const Grid& g, int jmax, unsigned seed, double offset = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  struct Mode { int a, b; double c, s; };
  std::vector<Mode> modes;
  for (int k = 0; k < 6; ++k) {
    std::uniform_int_distribution<int> j(-jmax, jmax);
    modes.push_back({j(rng), g.dim() == 2 ? j(rng) : 0, 0.2 * u(rng), 0.2 * u(rng)});
  }
  const double unit = pi / g.half_width();
  return Field::sample(g, [&](Point p) {
    double v = offset;
    for (const auto& m : modes) {
      const double ph = unit * (m.a * p[0] + m.b * p[1]);
      v += m.c * std::cos(ph) + m.s * std::sin(ph);
    }
    return v;
  });
}

Field gaussian(const Grid& g, Point c, double sigma, double mass) {
  const double norm = g.dim() == 2 ? mass / (2 * pi * sigma * sigma) : mass / (std::sqrt(2 * pi) * sigma);
  return Field::sample(g, [&](Point p) {
    const double dx = p[0] - c[0], dy = g.dim() == 2 ? p[1] - c[1] : 0.0;
    return norm * std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
  });
}

ModelParams base_params() {
  ModelParams p;
  p.alpha = 1.5;
  p.gamma = 1.2;
  p.beta = 1.4;
  return p;
}

}  // namespace

TEST_CASE("fractional Laplacian eigenfunction", "[operators]") {
  const Grid g = make_grid(2, 32, pi);
  const Field f = Field::sample(g, [](Point p) { return std::cos(3 * p[0] + 4 * p[1]); });
  const Field l = frac_laplacian(f, 1.5);
  const double lam = std::pow(5.0, 1.5);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(l[i] == Approx(lam * f[i]).margin(1e-11));
}

TEST_CASE("fractional Laplacian of order 2 against finite differences", "[operators]") {
  const Grid g = make_grid(2, 256, 8.0);
  const double s2 = 2.0;  // sigma^2
  auto f = [&](double x, double y) { return std::exp(-(x * x + y * y) / (2 * s2)); };
  const Field field = Field::sample(g, [&](Point p) { return f(p[0], p[1]); });
  const Field lap = frac_laplacian(field, 2.0);
  // Second-order centered differences of the analytic function with a fine step.
  const double h = g.dx() / 64;
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < g.size(); i += 97) {
    const Point p = g.point(i);
    const double x = p[0], y = p[1];
    const double fd = -(f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4 * f(x, y)) / (h * h);
    err = std::max(err, std::abs(fd - lap[i]));
    scale = std::max(scale, std::abs(fd));
  }
  CHECK(err <= 1e-4 * scale);
}

TEST_CASE("fractional Laplacian invariants", "[operators]") {
  const Grid g = make_grid(2, 64, 5.0);
  const Field f = band_limited(g, 10, 5);
  const Field l = frac_laplacian(f, 1.3);
  CHECK(std::abs(integrate(l)) / g.box_volume() < 1e-12 * sup(f));

  // alpha = 2 shares the -Delta table bit for bit
  const auto s2 = fractional_symbol(g, 2.0);
  const auto k2 = g.k2();
  bool same = true;
  for (std::size_t e = 0; e < k2.size(); ++e) same = same && s2[e] == k2[e];
  CHECK(same);
  const Field a = frac_laplacian(f, 2.0);
  const Field b = inverse(apply_symbol(f.spectrum(), k2));
  CHECK(max_abs_diff(a, b) == 0.0);

  CHECK_THROWS_AS(frac_laplacian(f, 2.5), ParameterError);
  CHECK_THROWS_AS(frac_laplacian(f, 0.0), ParameterError);
}

TEST_CASE("grad (-Delta)^{-1} on single modes and constants", "[operators]") {
  const Grid g = make_grid(2, 32, pi);
  // rho = cos x: (-Delta)^{-1} rho = cos x, so the gradient is (-sin x, 0)
  const Field rho = Field::sample(g, [](Point p) { return std::cos(p[0]); });
  const VectorField v = grad_inv_laplacian(rho);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    CHECK(v[0][i] == Approx(-std::sin(g.point(i)[0])).margin(1e-13));
    CHECK(std::abs(v[1][i]) < 1e-13);
  }
  const Field c = Field::sample(g, [](Point) { return 3.0; });
  const VectorField z = grad_inv_laplacian(c);
  CHECK(sup(z[0]) == 0.0);
  CHECK(sup(z[1]) == 0.0);

  CHECK_THROWS_AS(grad_inv_laplacian(Field(make_grid(1, 32, pi))), ParameterError);
}

TEST_CASE("grad (-Delta)^{-1} is curl free and attractive", "[operators]") {
  const Grid g = make_grid(2, 64, 8.0);
  const Field rho = gaussian(g, {0.5, -0.25}, 1.0, 1.0);
  const auto comps = grad_inv_laplacian_spectra(rho.spectrum());
  const Field curl = inverse(derivative(comps[1], 0)) - inverse(derivative(comps[0], 1));
  CHECK(sup(curl) < 1e-10);

  const VectorField v = grad_inv_laplacian(rho);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point p = g.point(i);
    const double rx = p[0] - 0.5, ry = p[1] + 0.25;
    const double r = std::hypot(rx, ry);
    if (r < 0.5 || r > 4.0) continue;
    CHECK(v[0][i] * rx + v[1][i] * ry < 0.0);  // toward the bump
  }
}

TEST_CASE("rhs on trivial states", "[operators]") {
  const Grid g = make_grid(2, 32, pi);
  ModelParams p = base_params();
  const Field mode = Field::sample(g, [](Point q) { return std::cos(q[0] - 2 * q[1]); });
  const Field r = rhs(mode, p);
  const double lam = std::pow(std::sqrt(5.0), p.alpha);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(r[i] == Approx(-lam * mode[i]).margin(1e-12));

  p.eps = 1.0;
  p.q = 3;
  const Field c = Field::sample(g, [](Point) { return 1.5; });
  const Field rc = rhs(c, p);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(rc[i] == Approx(-std::pow(1.5, 3)).epsilon(1e-13));
}

TEST_CASE("rhs is mass neutral apart from the reaction", "[operators]") {
  const Grid g = make_grid(2, 64, 4 * pi);
  ModelParams p = base_params();
  p.chi = 2.0;
  p.eps = 0.7;
  p.q = 3;
  p.flow.kind = FlowSpec::Kind::cellular;
  p.flow.amplitude = 1.3;
  p.flow.wavenumber = 0.5;
  for (unsigned seed : {1u, 2u, 3u}) {
    const Field rho = band_limited(g, 12, seed, 1.0);
    const Model model(g, p);
    const Field r = model.rhs(rho);
    const Field rq = inverse(model.power_spectrum(rho.spectrum(), p.q));
    const double linf = sup(rho);
    CHECK(std::abs(integrate(r) + p.eps * integrate(rq)) <= 1e-8 * (1 + std::pow(linf, p.q)) * g.box_volume());
    CHECK(std::abs(integrate(r) + p.eps * integrate(rq)) <= 1e-8 * std::abs(p.eps * integrate(rq)));
  }
}

TEST_CASE("dealiased rhs is resolution independent on band-limited data", "[operators]") {
  ModelParams p = base_params();
  p.chi = 1.0;
  p.eps = 0.5;
  p.q = 3;
  p.flow.kind = FlowSpec::Kind::shear;
  p.flow.amplitude = 0.8;
  p.flow.wavenumber = 1.0;
  const Grid coarse = make_grid(2, 32, 2 * pi);
  const Grid fine = make_grid(2, 64, 2 * pi);
  const Field a = band_limited(coarse, 4, 9);
  const Field b = band_limited(fine, 4, 9);
  const Field ra = rhs(a, p);
  const Field rb = rhs(b, p);
  double err = 0.0;
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t j = 0; j < 32; ++j) err = std::max(err, std::abs(ra[i * 32 + j] - rb[(2 * i) * 64 + 2 * j]));
  CHECK(err < 1e-8 * sup(ra));
}

TEST_CASE("advection is skew symmetric and the flow is divergence free", "[operators]") {
  const Grid g = make_grid(2, 64, 2 * pi);
  ModelParams p = base_params();
  p.flow.kind = FlowSpec::Kind::cellular;
  p.flow.amplitude = 2.0;
  p.flow.wavenumber = 1.0;
  const Model model(g, p);
  CHECK(model.flow().max_divergence() < 1e-10);
  CHECK(model.flow().sup == Approx(2.0).epsilon(1e-12));
  const Field rho = band_limited(g, 8, 4);
  const Field adv = inverse(model.nonlinear(rho.spectrum()));
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += rho[i] * adv[i];
  CHECK(std::abs(s * g.cell_volume()) < 1e-8);

  FlowSpec custom;
  custom.kind = FlowSpec::Kind::custom;
  custom.modes = {{1, 2, 0.3, -0.1}, {0, 3, 0.0, 0.5}};
  p.flow = custom;
  CHECK(Model(g, p).flow().max_divergence() < 1e-10);
}

TEST_CASE("flow and chemotaxis validation", "[operators]") {
  ModelParams p = base_params();
  p.flow.kind = FlowSpec::Kind::cellular;
  p.flow.amplitude = 1.0;
  p.flow.wavenumber = 0.3;  // not periodic on [-pi, pi)
  CHECK_THROWS_AS(Model(make_grid(2, 32, pi), p), ParameterError);
  p.flow.kind = FlowSpec::Kind::none;
  p.chi = 1.0;
  CHECK_THROWS_AS(Model(make_grid(1, 32, pi), p), ParameterError);
  p.q = 2;
  CHECK_THROWS_WITH(Model(make_grid(2, 32, pi), p), Catch::Matchers::ContainsSubstring("q must be > 2"));
}

TEST_CASE("chemotaxis identity residual", "[operators]") {
  const Grid g = make_grid(2, 128, 8.0);
  const Field c = Field::sample(g, [](Point) { return 0.7; });
  CHECK(chemo_identity_residual(c, 3) == 0.0);
  const Field bump = gaussian(g, {0.0, 0.0}, 1.0, 1.0);
  CHECK(chemo_identity_residual(bump, 3) <= 1e-6);
  const Field two = gaussian(g, {-1.5, 0.5}, 0.8, 1.0) + gaussian(g, {1.2, -1.0}, 1.0, 2.0);
  CHECK(chemo_identity_residual(two, 4) <= 1e-6);
}
