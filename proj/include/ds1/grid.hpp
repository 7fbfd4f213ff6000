#pragma once

// Periodic computational torus, collocation grid, wavenumber lattices and the
// 2D Fourier transform contract shared by every other module.
//
// Transform convention (discrete analogue of the continuous transform with
// kernel exp(-i(k_xi xi + k_eta eta))):
//
//   F(k_p, k_q) = h_xi h_eta sum_{i,j} f(xi_i, eta_j) exp(-i(k_p xi_i + k_q eta_j))
//   f(xi_i, eta_j) = 1/(P_xi P_eta) sum_{p,q} F(k_p, k_q) exp(+i(k_p xi_i + k_q eta_j))
//
// with periods P = 2 pi l and spacings h = P / n. Under this normalization
// F(0,0) is exactly the grid quadrature of f and Parseval reads
//   h_xi h_eta sum |f|^2 = sum |F|^2 / (P_xi P_eta).
// Because xi_i = l(-pi + 2 pi i / n) the phase reduces to (-1)^(p+q) times
// the plain DFT kernel.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <new>
#include <span>
#include <stdexcept>
#include <vector>

namespace ds1 {

using cplx = std::complex<double>;

template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), alignment));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

template <class T>
using aligned_vector = std::vector<T, AlignedAllocator<T>>;

enum class Axis : std::uint8_t { xi, eta };

enum class Representation : std::uint8_t { physical = 0, fourier = 1 };

class FftEngine;

namespace detail {
struct GridData;
}

/// Geometry of the torus l_xi[-pi, pi) x l_eta[-pi, pi) with n_xi x n_eta
/// collocation points. Cheap to copy; all copies share the transform plans.
class SpectralGrid {
 public:
  SpectralGrid() = default;

  std::size_t n_xi() const;
  std::size_t n_eta() const;
  std::size_t size() const { return n_xi() * n_eta(); }
  double l_xi() const;
  double l_eta() const;
  double h_xi() const;
  double h_eta() const;
  double cell_area() const { return h_xi() * h_eta(); }
  double period_xi() const;
  double period_eta() const;

  std::span<const double> xi_points() const;
  std::span<const double> eta_points() const;
  /// Wavenumbers m / l in FFT order (0, 1, ..., n/2-1, -n/2, ..., -1).
  std::span<const double> k_xi() const;
  std::span<const double> k_eta() const;
  /// Same lattice with the Nyquist entry zeroed; used for odd symbols.
  std::span<const double> k_xi_odd() const;
  std::span<const double> k_eta_odd() const;

  std::size_t n(Axis a) const { return a == Axis::xi ? n_xi() : n_eta(); }
  double l(Axis a) const { return a == Axis::xi ? l_xi() : l_eta(); }
  double h(Axis a) const { return a == Axis::xi ? h_xi() : h_eta(); }
  std::span<const double> points(Axis a) const { return a == Axis::xi ? xi_points() : eta_points(); }
  std::span<const double> k(Axis a) const { return a == Axis::xi ? k_xi() : k_eta(); }
  std::span<const double> k_odd(Axis a) const { return a == Axis::xi ? k_xi_odd() : k_eta_odd(); }

  /// erf of the collocation points, and exp(-k^2/4) on the lattice.
  std::span<const double> erf_points(Axis a) const;
  std::span<const double> gauss_symbol(Axis a) const;

  /// Index of the collocation point at the coordinate origin (n/2).
  std::size_t origin_index(Axis a) const { return n(a) / 2; }

  const FftEngine& fft() const;

  bool valid() const { return static_cast<bool>(data_); }
  bool same_geometry(const SpectralGrid& other) const;
  bool operator==(const SpectralGrid& other) const { return same_geometry(other); }

 private:
  friend SpectralGrid make_grid(std::size_t, std::size_t, double, double);
  std::shared_ptr<const detail::GridData> data_;
};

/// Builds a grid. Sizes must be powers of two >= 8, half-periods positive.
SpectralGrid make_grid(std::size_t n_xi, std::size_t n_eta, double l_xi, double l_eta);

/// Complex samples of a field on a grid, in physical or Fourier representation.
/// Storage is row-major with the row index running over xi.
class ComplexField {
 public:
  ComplexField() = default;
  ComplexField(SpectralGrid grid, Representation rep);
  ComplexField(SpectralGrid grid, Representation rep, aligned_vector<cplx> values);

  const SpectralGrid& grid() const { return grid_; }
  Representation representation() const { return rep_; }
  bool is_physical() const { return rep_ == Representation::physical; }
  bool is_fourier() const { return rep_ == Representation::fourier; }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx& operator()(std::size_t i, std::size_t j) { return values_[i * grid_.n_eta() + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return values_[i * grid_.n_eta() + j]; }

  /// In-place transforms; they flip the representation tag.
  void to_fourier();
  void to_physical();

 private:
  SpectralGrid grid_;
  Representation rep_ = Representation::physical;
  aligned_vector<cplx> values_;
};

/// Real samples in the physical representation.
class RealField {
 public:
  RealField() = default;
  explicit RealField(SpectralGrid grid);
  RealField(SpectralGrid grid, aligned_vector<double> values);

  const SpectralGrid& grid() const { return grid_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * grid_.n_eta() + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * grid_.n_eta() + j]; }

 private:
  SpectralGrid grid_;
  aligned_vector<double> values_;
};

ComplexField forward(const ComplexField& f);
ComplexField inverse(const ComplexField& f);

ComplexField to_complex(const RealField& f);
/// Drops the imaginary part after checking max|Im| <= tol * max|Re|.
RealField to_real(const ComplexField& f, double rel_tol = 1e-12);

/// Fills a real field from a pointwise function of (xi, eta).
template <class Fn>
RealField sample(const SpectralGrid& grid, Fn&& fn) {
  RealField out(grid);
  const auto xs = grid.xi_points();
  const auto ys = grid.eta_points();
  for (std::size_t i = 0; i < grid.n_xi(); ++i)
    for (std::size_t j = 0; j < grid.n_eta(); ++j) out(i, j) = fn(xs[i], ys[j]);
  return out;
}

double max_abs(std::span<const double> v);
double max_abs(std::span<const cplx> v);
/// Grid quadrature h_xi h_eta sum f.
double quadrature(const RealField& f);
/// Grid quadrature of |f|^2 (physical representation).
double quadrature_abs2(const ComplexField& f);

/// Decay check: the largest coefficient modulus in the outer third of the
/// spectrum (|m| >= n/3 along either axis) relative to the largest overall.
double spectral_tail_ratio(const ComplexField& fourier_coefficients);
bool is_resolved(const ComplexField& f, double rel_tol = 1e-13);
bool is_resolved(const RealField& f, double rel_tol = 1e-13);

/// Zeroes modes with |m| > n/3 along either axis (2/3 rule). Off by default
/// everywhere; exposed for experiments.
void apply_two_thirds_filter(ComplexField& fourier_coefficients);

}  // namespace ds1
