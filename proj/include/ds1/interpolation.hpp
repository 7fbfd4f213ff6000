#pragma once

// Evaluation of the trigonometric interpolant of a resolved real field at
// arbitrary points, plus helpers built on it (sub-grid maximum location and
// spectral translation).

#include <span>
#include <vector>

#include "ds1/grid.hpp"

namespace ds1 {

class TrigInterpolant {
 public:
  explicit TrigInterpolant(const RealField& f);

  const SpectralGrid& grid() const { return grid_; }

  double operator()(double x, double y) const;

  struct Derivatives {
    double f, fx, fy, fxx, fxy, fyy;
  };
  Derivatives derivatives(double x, double y) const;

  /// Values at the tensor product xs x ys, row-major (|xs| rows). Points
  /// outside l[-pi, pi] on either axis give 0 when `zero_outside` is set,
  /// the periodic continuation otherwise.
  std::vector<double> on_tensor(std::span<const double> xs, std::span<const double> ys,
                                bool zero_outside = true) const;

 private:
  SpectralGrid grid_;
  aligned_vector<cplx> coeffs_;  // full spectrum scaled by 1/(P_xi P_eta)
};

struct Extremum {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

/// Location of the maximum of f: grid argmax, then separable parabolic
/// interpolation on the 3x3 stencil, then Newton steps on the gradient of
/// the interpolant.
Extremum locate_maximum(const RealField& f, int newton_steps = 8);
/// Same for |f| of a complex physical field (parabolic refinement only).
Extremum locate_maximum_abs(const ComplexField& f);

/// g(xi, eta) = f(xi + dx, eta + dy), evaluated spectrally.
RealField translate(const RealField& f, double dx, double dy);

/// Spectral zero-padding / truncation onto a grid with the same l and
/// different sizes.
RealField resample(const RealField& f, const SpectralGrid& target);

}  // namespace ds1
