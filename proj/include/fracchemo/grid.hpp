#pragma once
// Periodic spectral substrate: box grids, FFTW transform plans, fields and
// their half-complex spectra.
//
// Layout conventions
//   * physical values are row-major, x (axis 0) slowest; the box is [-L, L)^d
//     with x_i = -L + i dx.
//   * spectra use FFTW's half-complex layout: the last axis stores indices
//     0..n/2 only. FFT index i on a full axis maps to the integer mode
//     j = i for i < n/2 and j = i - n otherwise, so i = n/2 is the Nyquist
//     mode j = -n/2. Angular wavenumber is xi = pi j / L.
//   * normalization: s_k = (1/N) sum_x f(x) e^{-i xi_k (x + L)}, so the zero
//     mode is the box mean and inverse(forward(f)) == f with no extra factor.

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracchemo/errors.hpp"

namespace fracchemo {

using Complex = std::complex<double>;
using Point = std::array<double, 2>;

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace detail

/// Real-to-complex / complex-to-real FFTW plan pair for an n^d periodic box.
/// Plans are created with FFTW_UNALIGNED so they can be executed concurrently
/// on arbitrary std::vector storage through the new-array interface.
class FftPlan {
 public:
  FftPlan(int dim, int n) : dim_(dim), n_(n) {
    real_size_ = dim == 1 ? std::size_t(n) : std::size_t(n) * std::size_t(n);
    complex_size_ = dim == 1 ? std::size_t(n / 2 + 1) : std::size_t(n) * std::size_t(n / 2 + 1);
    std::vector<double> r(real_size_);
    std::vector<Complex> c(complex_size_);
    auto* cp = reinterpret_cast<fftw_complex*>(c.data());
    std::array<int, 2> dims{n, n};
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_r2c(dim, dims.data(), r.data(), cp, flags);
    inverse_ = fftw_plan_dft_c2r(dim, dims.data(), cp, r.data(), flags | FFTW_DESTROY_INPUT);
    if (forward_ == nullptr || inverse_ == nullptr) throw NumericError("FFTW failed to create a plan");
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t real_size() const { return real_size_; }
  std::size_t complex_size() const { return complex_size_; }

  /// Unnormalized forward transform.
  void forward(const double* in, Complex* out) const {
    fftw_execute_dft_r2c(forward_, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
  }

  /// Unnormalized inverse transform; the input is copied so it is left intact.
  void inverse(const Complex* in, double* out) const {
    thread_local std::vector<Complex> scratch;
    scratch.assign(in, in + complex_size_);
    fftw_execute_dft_c2r(inverse_, reinterpret_cast<fftw_complex*>(scratch.data()), out);
  }

 private:
  int dim_;
  int n_;
  std::size_t real_size_ = 0;
  std::size_t complex_size_ = 0;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

/// Process-wide plan cache; plans are immutable and shared.
inline std::shared_ptr<const FftPlan> shared_plan(int dim, int n) {
  static std::mutex cache_mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const FftPlan>> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto& slot = cache[{dim, n}];
  if (!slot) slot = std::make_shared<const FftPlan>(dim, n);
  return slot;
}

/// Integer mode number of FFT index i on an axis of n points.
inline int mode_of_index(int i, int n) { return i < n / 2 ? i : i - n; }

namespace detail {

struct GridData {
  int dim = 0;
  int n = 0;
  double half_width = 0.0;
  double dx = 0.0;
  std::vector<double> table;                 // ascending wavenumbers, j = -n/2 .. n/2-1
  std::vector<double> k2;                    // |xi|^2 per spectral entry
  std::array<std::vector<double>, 2> kder;   // xi_axis per entry, Nyquist zeroed
  std::vector<double> weight;                // Parseval multiplicity per entry
  std::shared_ptr<const FftPlan> plan;
};

}  // namespace detail

/// Periodic box [-L, L)^d standing in for R^d. Cheap to copy; all tables and
/// plans are shared and immutable.
class Grid {
 public:
  Grid(int dim, int n, double half_width) {
    require(dim == 1 || dim == 2, "grid dimension must be 1 or 2, got " + std::to_string(dim));
    require(detail::is_power_of_two(n) && n >= 16,
            "points per axis must be a power of two >= 16, got " + std::to_string(n));
    require(std::isfinite(half_width) && half_width > 0.0, "half_width must be positive");
    auto g = std::make_shared<detail::GridData>();
    g->dim = dim;
    g->n = n;
    g->half_width = half_width;
    g->dx = 2.0 * half_width / n;
    const double unit = std::numbers::pi / half_width;
    g->table.resize(std::size_t(n));
    for (int j = -n / 2; j < n / 2; ++j) g->table[std::size_t(j + n / 2)] = unit * j;

    const int half = n / 2 + 1;
    const std::size_t count = dim == 1 ? std::size_t(half) : std::size_t(n) * half;
    g->k2.resize(count);
    g->weight.resize(count);
    g->kder[0].assign(count, 0.0);
    g->kder[1].assign(count, 0.0);
    const int rows = dim == 1 ? 1 : n;
    for (int r = 0; r < rows; ++r) {
      const int jr = dim == 1 ? 0 : mode_of_index(r, n);
      for (int h = 0; h < half; ++h) {
        const std::size_t e = std::size_t(r) * half + h;
        const int jh = mode_of_index(h, n);
        const double xr = unit * jr;
        const double xh = unit * jh;
        g->k2[e] = xr * xr + xh * xh;
        g->weight[e] = (h == 0 || h == n / 2) ? 1.0 : 2.0;
        const double dh = (h == n / 2) ? 0.0 : xh;
        if (dim == 1) {
          g->kder[0][e] = dh;
        } else {
          g->kder[0][e] = (r == n / 2) ? 0.0 : xr;
          g->kder[1][e] = dh;
        }
      }
    }
    g->plan = shared_plan(dim, n);
    data_ = std::move(g);
  }

  int dim() const { return data_->dim; }
  int n() const { return data_->n; }
  double half_width() const { return data_->half_width; }
  double dx() const { return data_->dx; }
  std::size_t size() const { return data_->plan->real_size(); }
  std::size_t spectral_size() const { return data_->plan->complex_size(); }
  int spectral_rows() const { return dim() == 1 ? 1 : n(); }
  int spectral_cols() const { return n() / 2 + 1; }
  double cell_volume() const { return std::pow(dx(), dim()); }
  double box_volume() const { return std::pow(2.0 * half_width(), dim()); }
  double coordinate(int i) const { return -half_width() + i * dx(); }

  /// Physical point of flat index idx.
  Point point(std::size_t idx) const {
    if (dim() == 1) return {coordinate(int(idx)), 0.0};
    return {coordinate(int(idx / std::size_t(n()))), coordinate(int(idx % std::size_t(n())))};
  }

  std::span<const double> wavenumbers() const { return data_->table; }
  double wavenumber_of_index(int i) const { return std::numbers::pi / half_width() * mode_of_index(i, n()); }
  std::span<const double> k2() const { return data_->k2; }
  std::span<const double> derivative_symbol(int axis) const { return data_->kder[std::size_t(axis)]; }
  std::span<const double> mode_weight() const { return data_->weight; }
  const FftPlan& plan() const { return *data_->plan; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.data_ == b.data_ ||
           (a.dim() == b.dim() && a.n() == b.n() && a.half_width() == b.half_width());
  }

 private:
  std::shared_ptr<const detail::GridData> data_;
};

inline Grid make_grid(int dim, int n, double half_width) { return Grid(dim, n, half_width); }

/// Half-complex spectrum of a real field.
struct Spectrum {
  Grid grid;
  std::vector<Complex> modes;

  explicit Spectrum(Grid g) : grid(std::move(g)), modes(grid.spectral_size()) {}
  Spectrum(Grid g, std::vector<Complex> m) : grid(std::move(g)), modes(std::move(m)) {}
};

/// Real scalar field sampled on a Grid with a lazily cached spectrum.
class Field {
 public:
  explicit Field(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}
  Field(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    require(values_.size() == grid_.size(), "field value count does not match grid");
  }

  /// Samples f(point) at every grid node.
  template <class F>
  static Field sample(const Grid& grid, F&& f) {
    Field out(grid);
    for (std::size_t i = 0; i < out.values_.size(); ++i) out.values_[i] = f(grid.point(i));
    return out;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Mutable access; drops any cached spectrum.
  std::span<double> mutable_values() {
    cache_.reset();
    return values_;
  }

  bool has_cached_spectrum() const { return cache_.has_value(); }
  const Spectrum& spectrum() const;
  void set_cached_spectrum(Spectrum s) const { cache_ = std::move(s); }

  Field& operator+=(const Field& o) {
    auto v = mutable_values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.values_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    auto v = mutable_values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.values_[i];
    return *this;
  }
  Field& operator*=(double a) {
    for (auto& x : mutable_values()) x *= a;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }

 private:
  Grid grid_;
  std::vector<double> values_;
  mutable std::optional<Spectrum> cache_;
};

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline Spectrum forward(const Field& f) {
  if (!all_finite(f.values())) throw NumericError("forward transform of a field with non-finite values");
  const Grid& g = f.grid();
  Spectrum s(g);
  g.plan().forward(f.values().data(), s.modes.data());
  const double inv = 1.0 / double(g.size());
  for (auto& c : s.modes) c *= inv;
  return s;
}

inline Field inverse(const Spectrum& s) {
  Field out(s.grid);
  s.grid.plan().inverse(s.modes.data(), out.mutable_values().data());
  return out;
}

inline const Spectrum& Field::spectrum() const {
  if (!cache_) cache_ = forward(*this);
  return *cache_;
}

/// Rectangle-rule box quadrature, sum f * dx^d.
inline double integrate(std::span<const double> values, const Grid& g) {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * g.cell_volume();
}
inline double integrate(const Field& f) { return integrate(f.values(), f.grid()); }

/// Spectral Parseval sum, box_volume * sum w_k |s_k|^2.
inline double spectral_energy(const Spectrum& s) {
  const auto w = s.grid.mode_weight();
  double acc = 0.0;
  for (std::size_t e = 0; e < s.modes.size(); ++e) acc += w[e] * std::norm(s.modes[e]);
  return acc * s.grid.box_volume();
}

/// Multiplies each spectral entry by a real symbol.
inline Spectrum apply_symbol(const Spectrum& s, std::span<const double> symbol) {
  Spectrum out(s.grid);
  for (std::size_t e = 0; e < s.modes.size(); ++e) out.modes[e] = s.modes[e] * symbol[e];
  return out;
}

/// Spectral partial derivative along an axis (Nyquist mode dropped).
inline Spectrum derivative(const Spectrum& s, int axis) {
  Spectrum out(s.grid);
  const auto k = s.grid.derivative_symbol(axis);
  for (std::size_t e = 0; e < s.modes.size(); ++e) out.modes[e] = Complex(0.0, k[e]) * s.modes[e];
  return out;
}

}  // namespace fracchemo
