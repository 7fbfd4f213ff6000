#pragma once

// FFTW-backed transforms in the grid's physical-coordinate convention (see
// grid.hpp). All buffers passed in must come from aligned_vector so they
// share the alignment of the planning buffers.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>

#include "ds1/grid.hpp"

namespace ds1 {

enum class FftPlanner { estimate, measure };

/// Planner rigor for plans created after the call. Plans are reproducible
/// across processes only for `estimate`, or for `measure` with a shared
/// wisdom file (see set_fft_wisdom_file).
void set_fft_planner(FftPlanner planner);
FftPlanner fft_planner();
/// Wisdom is imported from this file before planning and exported after.
void set_fft_wisdom_file(std::string path);

class FftEngine {
 public:
  FftEngine(std::size_t n_xi, std::size_t n_eta, double h_xi, double h_eta);
  ~FftEngine();
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  std::size_t n_xi() const { return n_xi_; }
  std::size_t n_eta() const { return n_eta_; }
  /// Columns of the real-to-complex half spectrum, n_eta / 2 + 1.
  std::size_t half_cols() const { return n_eta_ / 2 + 1; }
  std::size_t half_size() const { return n_xi_ * half_cols(); }

  /// Full complex transforms, in place.
  void forward(std::span<cplx> data) const;
  void inverse(std::span<cplx> data) const;

  /// Real to half spectrum (q = 0..n_eta/2). `in` is preserved.
  void forward_real(std::span<const double> in, std::span<cplx> half) const;
  /// Half spectrum to real. `half` is overwritten.
  void inverse_real(std::span<cplx> half, std::span<double> out) const;

  /// 1D transforms along a single axis, in place (length n(axis)).
  void forward_line(Axis axis, std::span<cplx> data) const;
  void inverse_line(Axis axis, std::span<cplx> data) const;

  /// Raw unnormalized FFTW forward transform, exposed for benchmarks.
  void raw_forward(std::span<cplx> data) const;

 private:
  struct Plans;
  std::size_t n_xi_;
  std::size_t n_eta_;
  double h_xi_;
  double h_eta_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace ds1
