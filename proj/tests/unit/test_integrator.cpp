#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fracchemo/integrator.hpp"

using namespace fracchemo;
using Catch::Approx;
using std::numbers::pi;

namespace {

Field gaussian(const Grid& g, double mass, double sigma, Point c = {0.0, 0.0}) {
  const double norm = g.dim() == 2 ? mass / (2 * pi * sigma * sigma) : mass / std::sqrt(2 * pi * sigma * sigma);
  return Field::sample(g, [&](Point p) {
    const double dx = p[0] - c[0], dy = g.dim() == 2 ? p[1] - c[1] : 0.0;
    return norm * std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
  });
}

double l2_diff(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s * a.grid().cell_volume());
}

double l2(const Field& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return std::sqrt(s * a.grid().cell_volume());
}

Field march(const Field& rho0, const ModelParams& p, double T, double dt, Scheme scheme = Scheme::etdrk2) {
  StepperConfig c;
  c.scheme = scheme;
  c.dt_policy = DtPolicy::fixed;
  c.dt = dt;
  c.t_end = T;
  c.record_every = 0.0;
  c.negativity_tolerance = 1.0;
  const auto tr = run(rho0, p, c);
  REQUIRE(tr.status == RunStatus::completed);
  return tr.final_state;
}

ModelParams full_params() {
  ModelParams p;
  p.alpha = 1.5;
  p.chi = 0.5;
  p.eps = 0.5;
  p.q = 3;
  p.flow.kind = FlowSpec::Kind::cellular;
  p.flow.amplitude = 0.5;
  p.flow.wavenumber = 1.0;
  return p;
}

}  // namespace

TEST_CASE("ETD coefficients", "[integrator]") {
  // long-double oracle: expm1l for phi1, the full Taylor sum for phi2 when |z| <= 1
  auto phi2 = [](long double z) {
    if (std::abs(z) > 1.0L) return (std::expm1(z) - z) / (z * z);
    long double acc = 0.0L, term = 0.5L;
    for (int k = 0; k < 30; ++k) {
      acc += term;
      term *= z / (k + 3);
    }
    return acc;
  };
  for (double z : {-1e-8, -1e-3, -0.05, -0.099, -0.101, -1.0, -30.0}) {
    const auto c = detail::etd_coefficients(z);
    const long double zl = z;
    CHECK(c[0] == Approx(double(std::exp(zl))).epsilon(1e-14));
    CHECK(c[1] == Approx(double(std::expm1(zl) / zl)).epsilon(1e-14));
    CHECK(c[2] == Approx(double(phi2(zl))).epsilon(1e-13));
  }
  const auto zero = detail::etd_coefficients(0.0);
  CHECK(zero[1] == 1.0);
  CHECK(zero[2] == 0.5);
}

TEST_CASE("pure diffusion is advanced exactly", "[integrator]") {
  const Grid g = make_grid(2, 32, pi);
  ModelParams p;
  p.alpha = 1.5;
  const Field mode = Field::sample(g, [](Point x) { return 2.0 + std::cos(3 * x[0] + 4 * x[1]); });
  for (double dt : {0.01, 0.3, 2.0}) {
    const Field out = etd_step(mode, p, dt);
    const double decay = std::exp(-dt * std::pow(5.0, 1.5));
    for (std::size_t i = 0; i < g.size(); i += 7)
      CHECK(out[i] == Approx(2.0 + decay * std::cos(3 * g.point(i)[0] + 4 * g.point(i)[1])).margin(1e-14));
  }
}

TEST_CASE("alpha = 2 reproduces the heat kernel", "[integrator]") {
  const Grid g = make_grid(2, 128, 16.0);
  ModelParams p;
  p.alpha = 2.0;
  const Field rho0 = gaussian(g, 1.0, 1.0);
  const Field out = march(rho0, p, 1.0, 0.1);
  const Field exact = gaussian(g, 1.0, std::sqrt(3.0));
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(out[i] - exact[i]));
  CHECK(err <= 1e-10 * exact[64 * 128 + 64]);
}

TEST_CASE("ETDRK2 is second order on the full model", "[integrator]") {
  const Grid g = make_grid(2, 64, 2 * pi);
  const ModelParams p = full_params();
  const Field rho0 = gaussian(g, 4.0, 1.0, {0.3, -0.2});
  const double T = 0.2;
  const Field ref = march(rho0, p, T, 0.00125);
  const double e1 = l2_diff(march(rho0, p, T, 0.02), ref);
  const double e2 = l2_diff(march(rho0, p, T, 0.01), ref);
  const double e3 = l2_diff(march(rho0, p, T, 0.005), ref);
  CHECK(std::log2(e1 / e2) >= 1.9);
  CHECK(std::log2(e2 / e3) >= 1.9);
}

TEST_CASE("IMEX-BDF2 converges at second order", "[integrator]") {
  const Grid g = make_grid(2, 64, 2 * pi);
  const ModelParams p = full_params();
  const Field rho0 = gaussian(g, 4.0, 1.0, {0.3, -0.2});
  const double T = 0.2;
  const Field ref = march(rho0, p, T, 0.00125, Scheme::etdrk2);
  const double e1 = l2_diff(march(rho0, p, T, 0.01, Scheme::imex_bdf2), ref);
  const double e2 = l2_diff(march(rho0, p, T, 0.005, Scheme::imex_bdf2), ref);
  const double e3 = l2_diff(march(rho0, p, T, 0.0025, Scheme::imex_bdf2), ref);
  CHECK(std::log2(e1 / e2) >= 1.8);
  CHECK(std::log2(e2 / e3) >= 1.8);
}

TEST_CASE("nonlinear overflow raises a numeric error with the time", "[integrator]") {
  const Grid g = make_grid(1, 16, pi);
  ModelParams p;
  p.eps = 1e300;
  const Field one = Field::sample(g, [](Point) { return 1.0; });
  try {
    (void)etd_step(one, p, 1.0);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(e.time() == 1.0);
  }
  Field bad = one;
  bad.mutable_values()[3] = std::nan("");
  CHECK_THROWS_AS(etd_step(bad, p, 0.1), ParameterError);
}

TEST_CASE("run records and conservation", "[integrator]") {
  const Grid g = make_grid(2, 64, 2 * pi);
  ModelParams p;
  p.alpha = 1.5;
  p.flow.kind = FlowSpec::Kind::cellular;
  p.flow.amplitude = 2.0;
  const Field rho0 = gaussian(g, 1.0, 1.0);
  StepperConfig c;
  c.t_end = 1.0;
  c.record_every = 0.1;
  c.dt_max = 0.05;
  const auto tr = run(rho0, p, c);
  REQUIRE(tr.status == RunStatus::completed);
  REQUIRE(tr.records.size() == 11);
  CHECK(tr.records.front().t == 0.0);
  CHECK(tr.records.front().mass == Approx(integrate(rho0)).epsilon(1e-15));
  CHECK(tr.records.front().linf == Approx(rho0[32 * 64 + 32]).epsilon(1e-15));
  for (std::size_t k = 1; k < tr.records.size(); ++k) {
    CHECK(tr.records[k].t > tr.records[k - 1].t);
    CHECK(tr.records[k].t == Approx(0.1 * double(k)).epsilon(1e-12));
    CHECK(std::abs(tr.records[k].mass - tr.records[0].mass) <= 1e-10 * tr.records[0].mass);
    CHECK(tr.records[k].dt_used <= c.dt_max);
    CHECK(tr.records[k].dt_used > 0.0);
    CHECK(record_finite(tr.records[k]));
  }
  CHECK(tr.final_state.grid() == g);

  // determinism
  const auto again = run(rho0, p, c);
  REQUIRE(again.records.size() == tr.records.size());
  for (std::size_t k = 0; k < tr.records.size(); ++k) {
    CHECK(again.records[k].l2 == tr.records[k].l2);
    CHECK(again.records[k].w_gamma == tr.records[k].w_gamma);
  }
}

TEST_CASE("reaction decreases the mass", "[integrator]") {
  const Grid g = make_grid(2, 64, 8.0);
  ModelParams p;
  p.eps = 0.5;
  p.q = 3;
  const Field rho0 = gaussian(g, 6.0, 1.0);
  StepperConfig c;
  c.t_end = 1.0;
  c.record_every = 0.05;
  const auto tr = run(rho0, p, c);
  REQUIRE(tr.status == RunStatus::completed);
  for (std::size_t k = 1; k < tr.records.size(); ++k) {
    CHECK(tr.records[k].mass < tr.records[k - 1].mass);
    CHECK(tr.records[k].min_rho >= -1e-10 * tr.records[0].linf);
  }
}

TEST_CASE("run rejects bad initial data and configs", "[integrator]") {
  const Grid g = make_grid(1, 32, pi);
  ModelParams p;
  StepperConfig c;
  Field neg = Field::sample(g, [](Point x) { return std::cos(x[0]); });
  CHECK_THROWS_AS(run(neg, p, c), ParameterError);
  CHECK_THROWS_AS(run(Field(g), p, c), ParameterError);
  c.t_end = -1;
  CHECK_THROWS_AS(run(Field::sample(g, [](Point) { return 1.0; }), p, c), ParameterError);
}

TEST_CASE("unstable fixed steps end in a failure status", "[integrator]") {
  const Grid g = make_grid(2, 32, 4.0);
  ModelParams p;
  p.eps = 5.0;
  p.q = 3;
  const Field rho0 = gaussian(g, 20.0, 0.6);
  StepperConfig c;
  c.dt_policy = DtPolicy::fixed;
  c.dt = 1.0;
  c.t_end = 5.0;
  const auto tr = run(rho0, p, c);
  CHECK(tr.status != RunStatus::completed);
  CHECK(tr.status_time > 0.0);
}

TEST_CASE("supercritical classical chemotaxis is flagged as blowup", "[integrator]") {
  const Grid g = make_grid(2, 512, 8 * pi);
  ModelParams p;
  p.alpha = 2.0;
  p.chi = 1.0;
  const Field rho0 = gaussian(g, 16 * pi, 1.0);
  StepperConfig c;
  c.t_end = 1.0;
  c.record_every = 0.01;
  c.dt_max = 0.01;
  c.blowup_ceiling = 2.0 * rho0[256 * 512 + 256];
  const auto tr = run(rho0, p, c);
  CHECK(tr.status == RunStatus::blowup_detected);
  CHECK(tr.status_time < 0.5);  // m2 reaches zero by t = m2(0) / (64 pi)
}

TEST_CASE("Picard base cases", "[integrator]") {
  const Grid g = make_grid(2, 32, 2 * pi);
  const Field rho0 = gaussian(g, 1.0, 0.8);
  ModelParams lin;
  lin.alpha = 1.5;
  const Spectrum& s0 = rho0.spectrum();
  const auto lam = fractional_symbol(g, 1.5);
  Spectrum ks(g);
  for (std::size_t e = 0; e < lam.size(); ++e) ks.modes[e] = std::exp(-0.3 * lam[e]) * s0.modes[e];
  const Field exact = inverse(ks);

  const Field zero_iter = picard_mild_solve(rho0, lin, 0.3, 0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(zero_iter[i] == Approx(exact[i]).margin(1e-15));

  const auto r = picard_solve(rho0, lin, 0.3);
  CHECK(r.iterations == 1);
  CHECK(r.horizon == 0.3);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(r.state[i] == Approx(exact[i]).margin(1e-15));

  // iterations = 0 with a nonlinearity still returns the free term
  ModelParams nl = lin;
  nl.eps = 1.0;
  const Field free_term = picard_mild_solve(rho0, nl, 0.3, 0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(free_term[i] == Approx(exact[i]).margin(1e-15));
}

TEST_CASE("Picard iterate contracts and matches the stepper", "[integrator]") {
  const Grid g = make_grid(2, 64, 4 * pi);
  ModelParams p;
  p.alpha = 1.5;
  p.chi = 0.1;
  p.eps = 0.1;
  p.q = 3;
  const Field rho0 = gaussian(g, 2.0, 1.0);
  const auto r = picard_solve(rho0, p, 0.05);
  CHECK(r.horizon == 0.05);
  REQUIRE(!r.ratios.empty());
  for (double ratio : r.ratios) CHECK(ratio <= 0.5);
  const Field stepped = march(rho0, p, r.horizon, r.horizon / 50);
  CHECK(l2_diff(r.state, stepped) <= 1e-5 * l2(stepped));
}

TEST_CASE("Picard shrinks the horizon until it contracts", "[integrator]") {
  const Grid g = make_grid(2, 32, 2 * pi);
  ModelParams p;
  p.alpha = 1.5;
  p.eps = 4.0;
  p.q = 3;
  const Field rho0 = gaussian(g, 20.0, 0.7);
  const auto r = picard_solve(rho0, p, 2.0);
  CHECK(r.shrinks > 0);
  CHECK(r.horizon < 2.0);
  for (double ratio : r.ratios) CHECK(ratio <= 0.5);

  PicardConfig tight;
  tight.min_horizon = 1.0;
  CHECK_THROWS_AS(picard_solve(rho0, p, 2.0, tight), ContractionFailure);
}
