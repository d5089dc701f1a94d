#pragma once
// Fractional heat kernel K_t with Fourier transform e^{-t |xi|^alpha}
// (angular wavenumbers), i.e. K_t(x) = (2 pi)^{-d} int e^{-t|eta|^alpha} e^{i x.eta} d eta.
// The e^{-t (2 pi |xi|)^alpha} form with e^{2 pi i x.xi} is the same function
// after eta = 2 pi xi; alpha = 2 gives (4 pi t)^{-d/2} e^{-|x|^2 / 4t}.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracchemo/errors.hpp"
#include "fracchemo/grid.hpp"

namespace fracchemo {

enum class KernelMethod { radial_quadrature, spectral_box, closed_form };

inline std::string to_string(KernelMethod m) {
  switch (m) {
    case KernelMethod::radial_quadrature: return "radial-quadrature";
    case KernelMethod::spectral_box: return "spectral-box";
    case KernelMethod::closed_form: return "closed-form";
  }
  return "radial-quadrature";
}

/// Surface area of the unit sphere in R^d.
inline double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

namespace detail {

inline void check_kernel_args(double alpha, int d, double t) {
  require(alpha > 0.0 && alpha <= 2.0, "kernel order alpha must lie in (0,2]");
  require(d >= 1 && d <= 3, "kernel dimension must be 1, 2 or 3");
  require(t > 0.0 && std::isfinite(t), "kernel time t must be positive");
}

/// Frequency beyond which e^{-t rho^alpha} < 1e-17.
inline double cutoff_frequency(double alpha, double t) { return std::pow(39.2 / t, 1.0 / alpha); }

inline const std::vector<double>& bessel_j0_zeros(std::size_t count) {
  thread_local std::vector<double> zeros;
  if (zeros.size() < count) {
    const std::size_t have = zeros.size();
    const std::size_t want = std::max(count, 2 * have);
    zeros.resize(want);
    boost::math::cyl_bessel_j_zero(0.0, int(have + 1), unsigned(want - have), zeros.begin() + std::ptrdiff_t(have));
  }
  return zeros;
}

/// Coefficient of r^{-k alpha - d} in the large-|x| expansion of K_1.
inline double tail_coefficient(double alpha, int d, int k) {
  const double ka = k * alpha;
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  const double log_mag = std::lgamma(0.5 * ka + 1.0) + std::lgamma(0.5 * (ka + d)) - std::lgamma(k + 1.0) +
                         ka * std::log(2.0) - (0.5 * d + 1.0) * std::log(std::numbers::pi);
  return sign * std::sin(0.5 * std::numbers::pi * ka) * std::exp(log_mag);
}

}  // namespace detail

/// K_t(0) = |S^{d-1}| Gamma(d/alpha) / (alpha (2 pi)^d) t^{-d/alpha}.
inline double kernel_at_origin(double alpha, int d, double t) {
  detail::check_kernel_args(alpha, d, t);
  return sphere_area(d) * std::tgamma(d / alpha) / (alpha * std::pow(2 * std::numbers::pi, d)) *
         std::pow(t, -d / alpha);
}

/// Closed forms: Gaussian (alpha = 2) and Poisson/Cauchy (alpha = 1).
inline double closed_form_kernel(double alpha, int d, double t, double r) {
  detail::check_kernel_args(alpha, d, t);
  if (alpha == 2.0) return std::pow(4 * std::numbers::pi * t, -0.5 * d) * std::exp(-r * r / (4 * t));
  if (alpha == 1.0) {
    const double cd = std::tgamma(0.5 * (d + 1)) / std::pow(std::numbers::pi, 0.5 * (d + 1));
    return cd * t / std::pow(t * t + r * r, 0.5 * (d + 1));
  }
  throw ParameterError("closed-form kernel exists only for alpha in {1, 2}");
}

/// Large-|x| expansion sum_k a_k t^k r^{-k alpha - d}, truncated at `terms`.
inline double kernel_tail_series(double alpha, int d, double t, double r, int terms = 4) {
  double s = 0.0;
  for (int k = 1; k <= terms; ++k)
    s += detail::tail_coefficient(alpha, d, k) * std::pow(t, k) * std::pow(r, -k * alpha - d);
  return s;
}

/// Radial oscillatory quadrature of K_t at radius r, d in {1,2,3}.
///   d=1: (1/pi) int cos(r rho) e^{-t rho^alpha} d rho
///   d=2: (1/2pi) int J0(r rho) e^{-t rho^alpha} rho d rho
///   d=3: (1/(2 pi^2 r)) int sin(r rho) e^{-t rho^alpha} rho d rho
/// Panels run between consecutive zeros of the oscillatory factor, further
/// split to width <= t^{-1/alpha}/2; the first panel uses tanh-sinh to absorb
/// the rho^alpha endpoint behaviour.
inline double radial_kernel(double alpha, int d, double t, double r) {
  detail::check_kernel_args(alpha, d, t);
  r = std::abs(r);
  const double pi = std::numbers::pi;
  const double top = detail::cutoff_frequency(alpha, t);
  auto integrand = [&](double rho) {
    const double damp = std::exp(-t * std::pow(rho, alpha));
    switch (d) {
      case 1: return std::cos(r * rho) * damp;
      case 2: return boost::math::cyl_bessel_j(0, r * rho) * rho * damp;
      default: return (r > 0.0 ? std::sin(r * rho) / r : rho) * rho * damp;
    }
  };
  const double prefactor = d == 1 ? 1.0 / pi : d == 2 ? 1.0 / (2 * pi) : 1.0 / (2 * pi * pi);

  std::vector<double> breaks{0.0};
  if (r * top > pi) {
    if (d == 2) {
      const std::size_t count = std::size_t(r * top / pi) + 2;
      const auto& z = detail::bessel_j0_zeros(count);
      for (std::size_t k = 0; k < count && z[k] / r < top; ++k) breaks.push_back(z[k] / r);
    } else {
      const double offset = d == 1 ? 0.5 : 1.0;
      for (int k = 0;; ++k) {
        const double b = (k + offset) * pi / r;
        if (b >= top) break;
        breaks.push_back(b);
      }
    }
  }
  breaks.push_back(top);
  const double width = 0.5 * std::pow(t, -1.0 / alpha);

  boost::math::quadrature::tanh_sinh<double> ts;
  double sum = 0.0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    const int pieces = std::max(1, int(std::ceil((b - a) / width)));
    for (int s = 0; s < pieces; ++s) {
      const double lo = a + (b - a) * s / pieces, hi = a + (b - a) * (s + 1) / pieces;
      if (lo == 0.0)
        sum += ts.integrate(integrand, lo, hi, 1e-14);
      else
        sum += boost::math::quadrature::gauss_kronrod<double, 21>::integrate(integrand, lo, hi, 3, 1e-12);
    }
  }
  return prefactor * sum;
}

/// Periodized kernel on [-L, L)^d by direct lattice summation,
/// (2L)^{-d} sum_xi e^{-t|xi|^alpha} cos(xi.x), xi in (pi/L) Z^d, d <= 2.
inline double lattice_kernel(double alpha, int d, double t, std::span<const double> x, double L) {
  detail::check_kernel_args(alpha, d, t);
  require(d <= 2, "lattice kernel supports d <= 2");
  const double unit = std::numbers::pi / L;
  const int jmax = int(detail::cutoff_frequency(alpha, t) / unit) + 1;
  double s = 0.0;
  if (d == 1) {
    for (int j = -jmax; j <= jmax; ++j)
      s += std::exp(-t * std::pow(std::abs(unit * j), alpha)) * std::cos(unit * j * x[0]);
  } else {
    std::vector<double> cx(std::size_t(2 * jmax + 1)), cy(cx.size());
    for (int j = -jmax; j <= jmax; ++j) {
      cx[std::size_t(j + jmax)] = std::cos(unit * j * x[0]);
      cy[std::size_t(j + jmax)] = std::sin(unit * j * x[0]);
    }
    for (int a = -jmax; a <= jmax; ++a) {
      const double xa = unit * a;
      for (int b = -jmax; b <= jmax; ++b) {
        const double xb = unit * b;
        const double k = std::sqrt(xa * xa + xb * xb);
        const double damp = std::exp(-t * std::pow(k, alpha));
        if (damp < 1e-18) continue;
        s += damp * (cx[std::size_t(a + jmax)] * std::cos(xb * x[1]) - cy[std::size_t(a + jmax)] * std::sin(xb * x[1]));
      }
    }
  }
  return s / std::pow(2 * L, d);
}

/// Spectral-box evaluation: the lattice sum minus the periodic images
/// sum_{m != 0} K_t(x + 2Lm). Images use the closed form for alpha = 2 and the
/// large-|x| expansion otherwise (plus a continuum remainder for the far
/// lattice), so L must be >= 10 t^{1/alpha}.
inline double box_kernel(double alpha, int d, double t, std::span<const double> x, double L) {
  const double scale = std::pow(t, 1.0 / alpha);
  require(L >= 10.0 * scale, "spectral-box kernel needs half_width >= 10 t^{1/alpha}");
  const double periodic = lattice_kernel(alpha, d, t, x, L);
  const int M = d == 1 ? 2000 : 40;
  auto image = [&](double r) {
    return alpha == 2.0 ? closed_form_kernel(2.0, d, t, r) : kernel_tail_series(alpha, d, t, r, 4);
  };
  double images = 0.0;
  if (d == 1) {
    for (int m = -M; m <= M; ++m)
      if (m != 0) images += image(std::abs(x[0] + 2 * L * m));
  } else {
    for (int a = -M; a <= M; ++a)
      for (int b = -M; b <= M; ++b)
        if (a != 0 || b != 0) images += image(std::hypot(x[0] + 2 * L * a, x[1] + 2 * L * b));
  }
  if (alpha < 2.0) {
    // lattice beyond the summed block, replaced by the continuum of the leading term
    // int over |y|_inf > s of |y|^{-d-alpha}: 2 s^{-alpha}/alpha in 1-D and
    // 8 s^{-alpha}/alpha int_0^1 (1+u^2)^{-(2+alpha)/2} du in 2-D.
    const double cell = std::pow(2 * L, d);
    const double side = (2 * M + 1) * L;  // half-side of the summed block
    double outside = 2.0 * std::pow(side, -alpha) / alpha;
    if (d == 2) {
      auto f = [&](double u) { return std::pow(1.0 + u * u, -0.5 * (2.0 + alpha)); };
      outside = 8.0 * std::pow(side, -alpha) / alpha *
                boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 5, 1e-14);
    }
    images += detail::tail_coefficient(alpha, d, 1) * t * outside / cell;
  }
  return periodic - images;
}

/// K_t at a point of R^d (d = x.size()).
inline double eval_kernel(double alpha, int d, double t, std::span<const double> x,
                          KernelMethod method = KernelMethod::radial_quadrature, double box_half_width = 0.0) {
  detail::check_kernel_args(alpha, d, t);
  require(x.size() == std::size_t(d), "point dimension does not match d");
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double r = std::sqrt(r2);
  switch (method) {
    case KernelMethod::closed_form:
      return closed_form_kernel(alpha, d, t, r);
    case KernelMethod::spectral_box: {
      const double L = box_half_width > 0.0 ? box_half_width : 30.0 * std::pow(t, 1.0 / alpha) + 2.0 * r;
      return box_kernel(alpha, d, t, x, L);
    }
    case KernelMethod::radial_quadrature:
      break;
  }
  return r == 0.0 ? kernel_at_origin(alpha, d, t) : radial_kernel(alpha, d, t, r);
}

/// Radial profile of K_t sampled at the given radii.
struct KernelEval {
  double alpha = 0.0;
  int d = 0;
  double t = 1.0;
  KernelMethod method = KernelMethod::radial_quadrature;
  std::vector<std::pair<double, double>> samples;

  bool positive() const {
    return std::all_of(samples.begin(), samples.end(), [](const auto& s) { return s.second > 0.0; });
  }
  bool monotone_decreasing() const {
    for (std::size_t i = 1; i < samples.size(); ++i)
      if (samples[i].first > samples[i - 1].first && samples[i].second > samples[i - 1].second) return false;
    return true;
  }
};

inline KernelEval radial_profile(double alpha, int d, double t, std::span<const double> radii,
                                 KernelMethod method = KernelMethod::radial_quadrature) {
  KernelEval out{alpha, d, t, method, {}};
  for (double r : radii) {
    std::vector<double> x(std::size_t(d), 0.0);
    x[0] = r;
    out.samples.emplace_back(r, eval_kernel(alpha, d, t, x, method));
  }
  return out;
}

/// int K_t dx. The mass of the ball |x| < R is integrated on the Fourier side,
///   d=1: (2/pi) int sin(R rho)/rho e^{-t rho^alpha} d rho
///   d=2: R int J1(R rho) e^{-t rho^alpha} d rho
///   d=3: (2/pi) int (sin(R rho)/rho - R cos(R rho)) e^{-t rho^alpha} d rho
/// with R = 40 t^{1/alpha}, and the mass beyond R comes from the large-|x|
/// expansion, sum_k |S^{d-1}| a_k t^k R^{-k alpha} / (k alpha).
inline double kernel_mass(double alpha, int d, double t) {
  detail::check_kernel_args(alpha, d, t);
  const double pi = std::numbers::pi;
  const double scale = std::pow(t, 1.0 / alpha);
  const double R = (alpha == 2.0 ? 14.0 : 40.0) * scale;
  const double top = detail::cutoff_frequency(alpha, t);
  auto integrand = [&](double rho) {
    const double damp = std::exp(-t * std::pow(rho, alpha));
    const double z = R * rho;
    switch (d) {
      case 1: return 2.0 / pi * (rho > 0.0 ? std::sin(z) / rho : R) * damp;
      case 2: return R * boost::math::cyl_bessel_j(1, z) * damp;
      default: return 2.0 / pi * (rho > 0.0 ? std::sin(z) / rho - R * std::cos(z) : 0.0) * damp;
    }
  };
  std::vector<double> breaks{0.0};
  for (int k = 1; k * pi / R < top; ++k) breaks.push_back(k * pi / R);
  breaks.push_back(top);
  boost::math::quadrature::tanh_sinh<double> ts;
  double inner = 0.0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p)
    inner += p == 0 ? ts.integrate(integrand, breaks[p], breaks[p + 1], 1e-14)
                    : boost::math::quadrature::gauss_kronrod<double, 21>::integrate(integrand, breaks[p], breaks[p + 1], 3, 1e-12);
  double tail = 0.0;
  if (alpha < 2.0)
    for (int k = 1; k <= 8; ++k)
      tail += sphere_area(d) * detail::tail_coefficient(alpha, d, k) * std::pow(t, k) * std::pow(R, -k * alpha) / (k * alpha);
  return inner + tail;
}

/// Spectrum of K_t centred at x = 0 on the grid's box (the periodized kernel).
inline Spectrum box_kernel_spectrum(const Grid& g, double alpha, double t) {
  detail::check_kernel_args(alpha, g.dim(), t);
  Spectrum s(g);
  const auto k2 = g.k2();
  const double inv_volume = 1.0 / g.box_volume();
  const int half = g.spectral_cols();
  for (std::size_t e = 0; e < s.modes.size(); ++e) {
    // value grid starts at -L, so centring at 0 contributes (-1)^{j_x + j_y}
    const int h = int(e % std::size_t(half));
    const int r = int(e / std::size_t(half));
    const int parity = (mode_of_index(h, g.n()) + (g.dim() == 2 ? mode_of_index(r, g.n()) : 0)) & 1;
    const double sign = parity ? -1.0 : 1.0;
    s.modes[e] = sign * inv_volume * std::exp(-t * std::pow(k2[e], 0.5 * alpha));
  }
  return s;
}

inline Field box_kernel_field(const Grid& g, double alpha, double t) { return inverse(box_kernel_spectrum(g, alpha, t)); }

/// K_t * f on the box: multiply every mode by e^{-t |xi|^alpha}.
inline Spectrum heat_semigroup(const Spectrum& f, double alpha, double t) {
  Spectrum out(f.grid);
  const auto k2 = f.grid.k2();
  for (std::size_t e = 0; e < f.modes.size(); ++e)
    out.modes[e] = f.modes[e] * std::exp(-t * std::pow(k2[e], 0.5 * alpha));
  return out;
}

/// Periodic convolution (a * b)(x) = int a(y) b(x - y) dy on the box.
inline Field periodic_convolution(const Field& a, const Field& b) {
  const Grid& g = a.grid();
  require(g == b.grid(), "convolution operands must share a grid");
  Spectrum s(g);
  const auto& sa = a.spectrum();
  const auto& sb = b.spectrum();
  const int half = g.spectral_cols();
  for (std::size_t e = 0; e < s.modes.size(); ++e) {
    const int h = int(e % std::size_t(half));
    const int r = int(e / std::size_t(half));
    const int parity = (mode_of_index(h, g.n()) + (g.dim() == 2 ? mode_of_index(r, g.n()) : 0)) & 1;
    s.modes[e] = (parity ? -1.0 : 1.0) * g.box_volume() * sa.modes[e] * sb.modes[e];
  }
  return inverse(s);
}

/// Box quadrature of the spectral gradient of the periodized kernel, one entry
/// per axis.
inline std::array<double, 2> kernel_gradient_mass(double alpha, int d, double t, int n = 256) {
  require(d == 1 || d == 2, "gradient mass is evaluated on a 1-D or 2-D box");
  const Grid g = make_grid(d, n, 30.0 * std::pow(t, 1.0 / alpha));
  const Spectrum s = box_kernel_spectrum(g, alpha, t);
  std::array<double, 2> out{0.0, 0.0};
  for (int axis = 0; axis < d; ++axis) out[std::size_t(axis)] = integrate(inverse(derivative(s, axis)));
  return out;
}

/// Least-squares slope of log K_1 against log r over r in [10, 100].
inline double tail_exponent(double alpha, int d) {
  require(alpha > 0.0 && alpha < 2.0, "tail exponent requires alpha in (0,2); alpha = 2 has a Gaussian tail");
  const int count = 21;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < count; ++i) {
    const double r = 10.0 * std::pow(10.0, double(i) / (count - 1));
    const double k = radial_kernel(alpha, d, 1.0, r);
    require(k > 0.0, "kernel quadrature lost positivity in the tail");
    const double lx = std::log(r), ly = std::log(k);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

}  // namespace fracchemo
