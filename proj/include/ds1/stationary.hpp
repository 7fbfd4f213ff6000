#pragma once

// Localized stationary states Q of the DS I system with trivial boundary
// conditions:  F(Q) = -omega Q + 2 (d_xi^2 + d_eta^2) Q + [B(Q^2)] Q = 0,
// found by Newton's method with matrix-free, left-preconditioned GMRES.

#include <stdexcept>
#include <vector>

#include "ds1/grid.hpp"
#include "ds1/parallel.hpp"

namespace ds1 {

struct NewtonConfig {
  double residual_tol = 1e-10;  // on max |F|
  int max_newton_iters = 50;
  double gmres_rel_tol = 1e-8;
  int gmres_max_iters = 200;
  int gmres_restart = 0;  // 0: full GMRES
  int max_halvings = 8;
  /// An iterate whose spectral tail ratio exceeds this has lost resolution.
  double resolution_tol = 1e-6;
  /// Shift the maximum of the converged solution to the origin.
  bool center = true;

  void validate() const;
};

struct StationaryResult {
  RealField Q;
  std::vector<double> residual_history;  // max |F| before each Newton step, plus the final value
  std::vector<int> gmres_iterations;
  double mass = 0.0;  // grid quadrature of Q^2
  double shift_xi = 0.0;
  double shift_eta = 0.0;
  double final_residual() const { return residual_history.empty() ? 0.0 : residual_history.back(); }
};

class StationaryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NonConvergence : public StationaryError {
 public:
  using StationaryError::StationaryError;
};
class Divergence : public StationaryError {
 public:
  using StationaryError::StationaryError;
};
class LostResolution : public StationaryError {
 public:
  using StationaryError::StationaryError;
};

RealField residual_F(const RealField& Q, double omega);

/// DF[Q] v = -omega v + 2 Laplacian v + B(Q^2) v + 2 B(Q v) Q.
RealField jacobian_vector_product(const RealField& Q, const RealField& v, double omega);

/// Least-squares fit log|Q| = slope |x| + intercept along the axis line
/// through the origin, over the samples with |Q| in [lo, hi] on both sides.
/// rel_residual is rms(fit residual) / std(log|Q|).
struct TailFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rel_residual = 0.0;
  std::size_t points = 0;
};
TailFit exponential_tail_fit(const RealField& Q, Axis axis, double lo = 1e-10, double hi = 1e-2);

/// max |Q(xi, eta) - Q(eta, xi)| on a square grid.
double exchange_asymmetry(const RealField& Q);

StationaryResult newton_solve(const RealField& Q0, double omega, const NewtonConfig& cfg = {});

}  // namespace ds1
