#pragma once

// Spectral derivatives, the regularized antiderivatives d_xi^{-1}, d_eta^{-1}
// with trivial (principal value) boundary normalization, and the nonlocal
// operator B = d_xi^{-1} d_eta + d_eta^{-1} d_xi.
//
// The antiderivative along an axis is evaluated as
//
//   d^{-1} f = F^{-1}[ (f^(k) - f^(0) exp(-k^2/4)) / (i k) ] + f^(0) erf(x) / 2
//
// where the k = 0 entry of the bracket is its limit, -(quadrature of x f).
// The first term is as smooth as f; the second carries the non-decaying part
// (limits +-(1/2) int f). On the torus the erf term does not wrap
// periodically: values at the two ends of the axis differ by ~f^(0). That jump
// is the genuine antiderivative of a function with nonzero integral.
//
// Odd symbols (i k, 1/(i k), k_eta/k_xi) vanish on the Nyquist row/column so
// real inputs give real outputs.

#include <span>
#include <vector>

#include "ds1/grid.hpp"
#include "ds1/parallel.hpp"

namespace ds1 {

/// Spectral derivative along `axis`; result in the physical representation.
ComplexField derivative(const ComplexField& f, Axis axis);
RealField derivative(const RealField& f, Axis axis);

/// Regularized antiderivative along `axis` (physical representation out).
/// Warns when the input is not resolved.
ComplexField antiderivative(const ComplexField& f, Axis axis);
RealField antiderivative(const RealField& f, Axis axis);

/// Antiderivative of a single periodic line of samples on l[-pi, pi).
std::vector<double> antiderivative_line(std::span<const double> f, double l);

/// Laplacian d_xi^2 + d_eta^2 of a real field.
RealField laplacian(const RealField& f);

std::vector<double> erf_eval(std::span<const double> x);

/// B f for real f via the fused operator below.
RealField apply_B(const RealField& f);

/// Fused evaluation of B on one grid: one real-to-complex transform, one
/// complex-to-real transform and O(n) line work. Owns its workspace, so one
/// instance must not be shared between threads.
class NonlocalOperator {
 public:
  explicit NonlocalOperator(SpectralGrid grid, exec::Policy policy = exec::default_policy);

  const SpectralGrid& grid() const { return grid_; }

  /// out = B f. `f` and `out` may not alias.
  void apply(std::span<const double> f, std::span<double> out);
  RealField apply(const RealField& f);

 private:
  SpectralGrid grid_;
  exec::Policy policy_;
  aligned_vector<cplx> half_;
  aligned_vector<cplx> row0_, col0_;
  aligned_vector<cplx> mom_eta_, mom_xi_;  // transformed first moments
  aligned_vector<cplx> int_eta_, int_xi_;  // line integrals, then their derivatives
  std::vector<double> s_eta_, m_eta_, s_xi_, m_xi_;
};

namespace reference {

/// B f composed from the general complex derivative and antiderivative
/// routes, one axis at a time. Slow; kept as the oracle for the fused path.
RealField apply_B(const RealField& f);

}  // namespace reference

}  // namespace ds1
