#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "fracchemo/kernel.hpp"

using namespace fracchemo;
using Catch::Approx;
using std::numbers::pi;

namespace {

// Independent closed forms, written out here rather than taken from the library.
double gaussian_oracle(int d, double t, double r) { return std::exp(-r * r / (4 * t)) / std::pow(4 * pi * t, 0.5 * d); }
double cauchy_oracle(int d, double t, double r) {
  const double c = d == 1 ? 1.0 / pi : d == 2 ? 1.0 / (2 * pi) : 1.0 / (pi * pi);
  return c * t / std::pow(t * t + r * r, 0.5 * (d + 1));
}

}  // namespace

TEST_CASE("kernel closed-form values at the origin", "[kernel]") {
  const std::vector<double> o2{0.0, 0.0};
  CHECK(eval_kernel(2.0, 2, 1.0, o2) == Approx(1.0 / (4 * pi)).epsilon(1e-12));
  CHECK(eval_kernel(2.0, 2, 1.0, o2) == Approx(0.0795775).epsilon(1e-6));
  CHECK(eval_kernel(1.0, 2, 1.0, o2) == Approx(0.159155).epsilon(1e-5));
  CHECK(radial_kernel(1.0, 2, 1.0, 0.0) == Approx(1.0 / (2 * pi)).epsilon(1e-10));
  CHECK(radial_kernel(2.0, 1, 1.0, 0.0) == Approx(1.0 / std::sqrt(4 * pi)).epsilon(1e-10));
}

TEST_CASE("radial quadrature matches closed forms", "[kernel]") {
  for (int d : {1, 2, 3}) {
    for (double t : {0.3, 1.0, 2.5}) {
      for (double r : {0.0, 0.1, 0.7, 1.5, 3.0, 6.0}) {
        const double rs = r * std::sqrt(t);  // alpha = 2 sampled where K / K(0) >= e^{-9}
        CHECK(radial_kernel(2.0, d, t, rs) == Approx(gaussian_oracle(d, t, rs)).epsilon(1e-6));
      }
      for (double r : {0.0, 0.1, 0.7, 1.5, 3.0, 10.0, 40.0}) {
        const double rs = r * t;
        CHECK(radial_kernel(1.0, d, t, rs) == Approx(cauchy_oracle(d, t, rs)).epsilon(1e-6));
      }
    }
  }
  CHECK_THROWS_AS(closed_form_kernel(1.5, 2, 1.0, 0.0), ParameterError);
}

TEST_CASE("kernel rejects bad arguments", "[kernel]") {
  const std::vector<double> o{0.0};
  CHECK_THROWS_AS(eval_kernel(1.5, 1, 0.0, o), ParameterError);
  CHECK_THROWS_AS(eval_kernel(1.5, 1, -1.0, o), ParameterError);
  CHECK_THROWS_AS(eval_kernel(2.5, 1, 1.0, o), ParameterError);
}

TEST_CASE("kernel self-similarity", "[kernel]") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ut(0.05, 5.0), ur(0.0, 6.0);
  for (double alpha : {1.1, 1.5, 1.9}) {
    for (int d : {1, 2}) {
      for (int trial = 0; trial < 6; ++trial) {
        const double t = ut(rng), r = ur(rng);
        const double scale = std::pow(t, 1.0 / alpha);
        const double lhs = radial_kernel(alpha, d, t, r);
        const double rhs = std::pow(t, -d / alpha) * radial_kernel(alpha, d, 1.0, r / scale);
        CHECK(lhs == Approx(rhs).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("spectral-box and radial evaluations agree", "[kernel]") {
  for (double alpha : {1.0, 1.3, 1.5, 2.0}) {
    for (double r : {0.0, 0.8, 2.5}) {
      const std::vector<double> x1{r};
      const std::vector<double> x2{0.6 * r, -0.8 * r};
      const double b1 = eval_kernel(alpha, 1, 1.0, x1, KernelMethod::spectral_box);
      const double b2 = eval_kernel(alpha, 2, 1.0, x2, KernelMethod::spectral_box);
      CHECK(b1 == Approx(eval_kernel(alpha, 1, 1.0, x1)).epsilon(1e-6));
      CHECK(b2 == Approx(eval_kernel(alpha, 2, 1.0, x2)).epsilon(1e-6));
    }
  }
}

TEST_CASE("kernel mass is one", "[kernel]") {
  CHECK(std::abs(kernel_mass(2.0, 1, 0.5) - 1.0) < 1e-8);
  CHECK(std::abs(kernel_mass(1.5, 2, 1.0) - 1.0) < 1e-6);
  for (double alpha : {1.0, 1.25, 1.5, 1.75, 2.0})
    for (int d : {1, 2}) CHECK(std::abs(kernel_mass(alpha, d, 1.0) - 1.0) < 1e-6);
  CHECK(std::abs(kernel_mass(1.5, 3, 0.7) - 1.0) < 1e-6);
}

TEST_CASE("kernel tail coefficient equals the singular-integral constant", "[kernel]") {
  for (double alpha : {0.5, 1.0, 1.5, 1.9})
    for (int d : {1, 2, 3}) {
      const double c = std::pow(2.0, alpha - 1) * alpha * std::tgamma(0.5 * (d + alpha)) /
                       (std::pow(pi, 0.5 * d) * std::tgamma(1 - 0.5 * alpha));
      CHECK(detail::tail_coefficient(alpha, d, 1) == Approx(c).epsilon(1e-12));
    }
}

TEST_CASE("gradient of the kernel has zero mass", "[kernel]") {
  for (double alpha : {1.5, 2.0}) {
    const auto g1 = kernel_gradient_mass(alpha, 1, 1.0);
    const auto g2 = kernel_gradient_mass(alpha, 2, 0.5, 128);
    CHECK(std::abs(g1[0]) < 1e-8);
    CHECK(std::abs(g2[0]) < 1e-8);
    CHECK(std::abs(g2[1]) < 1e-8);
  }
}

TEST_CASE("kernel tail exponent", "[kernel]") {
  CHECK(tail_exponent(1.0, 1) == Approx(-2.0).epsilon(0.05));
  CHECK(tail_exponent(1.5, 2) == Approx(-3.5).epsilon(0.05));
  CHECK_THROWS_AS(tail_exponent(2.0, 2), ParameterError);
}

TEST_CASE("kernel profiles are positive and decreasing", "[kernel]") {
  std::vector<double> radii;
  for (int i = 0; i <= 60; ++i) radii.push_back(0.05 * i * i);
  for (double alpha : {1.0, 1.25, 1.5, 1.75}) {
    for (int d : {1, 2, 3}) {
      const KernelEval prof = radial_profile(alpha, d, 1.0, radii);
      CHECK(prof.positive());
      CHECK(prof.monotone_decreasing());
    }
  }
}

TEST_CASE("box kernel semigroup and convolution", "[kernel]") {
  const Grid g = make_grid(2, 64, 12.0);
  const Field a = box_kernel_field(g, 1.5, 0.4);
  const Field b = box_kernel_field(g, 1.5, 0.7);
  const Field ab = periodic_convolution(a, b);
  const Field c = box_kernel_field(g, 1.5, 1.1);
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    err = std::max(err, std::abs(ab[i] - c[i]));
    scale = std::max(scale, std::abs(c[i]));
  }
  CHECK(err <= 1e-10 * scale);

  // the periodized kernel peaks at the origin and integrates to 1
  const std::size_t centre = std::size_t(32) * 64 + 32;
  CHECK(integrate(c) == Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(c[i] <= c[centre]);

  // heat_semigroup of a point-like field is the same as convolving with K_t
  const Spectrum heat = heat_semigroup(a.spectrum(), 1.5, 0.7);
  const Field h = inverse(heat);
  for (std::size_t i = 0; i < g.size(); i += 37) CHECK(h[i] == Approx(ab[i]).margin(1e-12 * scale));
}
