#pragma once

// Closed-form reference fields and initial data builders.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ds1/grid.hpp"

namespace ds1 {

/// Classical dromion for radiating boundary conditions (omega = 1):
///   1 / (4 cosh(xi/2) cosh(eta/2) + exp((xi + eta)/2)).
/// It is *not* a stationary state for the trivial boundary conditions used
/// here; it serves as the Newton initial iterate (scaled by 6) and as a test
/// function. Warns when it has not decayed to 1e-14 at the grid boundary.
RealField dromion_radiating(const SpectralGrid& grid);
double dromion_radiating(double xi, double eta);

/// |Q~_2|^2 = 4 / (4 cosh(xi) cosh(eta) + exp(xi + eta))^2, the squared
/// omega = 2 radiating dromion.
RealField dromion2_squared(const SpectralGrid& grid);
double dromion2_squared(double xi, double eta);

/// Exact action of B (trivial boundary conditions) on dromion2_squared.
/// With U = e^{2 xi}, V = e^{2 eta}, D = 2UV + U + V + 1:
///   B f = T(U, V) + T(V, U),
///   T(U, V) = 4UV [(U+1) - V^2 (2U+1)] / ((V+1)^2 D^2)
///             - 2V (1 - 2V^2) / ((V+1)^2 (2V+1)^2).
double dromion2_B_exact(double xi, double eta);
RealField dromion2_B_exact(const SpectralGrid& grid);

/// Shift function of the radiating boundary conditions,
///   f(x) = 4 / (4 (1 + e^x)) + 1 / (4 (1 + 2 e^x)).
/// The first term equals 1 / (1 + e^x); the unreduced form is kept.
double radiating_shift_f(double x);
std::vector<double> radiating_shift_f(std::span<const double> x);

/// kappa * exp(-xi^2 - eta^2)
RealField gaussian(const SpectralGrid& grid, double kappa);

/// Q_omega(xi, eta) = sqrt(omega) Q(sqrt(omega) xi, sqrt(omega) eta) on the
/// same grid, by exact trigonometric interpolation of Q. Throws when the
/// rescaled field is not decayed at the boundary.
RealField omega_rescale(const RealField& q, double omega);

/// max |f| over the outermost grid rows/columns relative to max |f|.
double boundary_ratio(const RealField& f);

enum class InitialKind { scaled_dromion_radiating, mu_times_Q, Q_minus_gaussian, gaussian, from_file };

std::string to_string(InitialKind kind);
InitialKind initial_kind_from_string(const std::string& s);

struct InitialDataSpec {
  InitialKind kind = InitialKind::gaussian;
  /// mu for mu_times_Q, kappa for gaussian, the dromion factor for
  /// scaled_dromion_radiating, the Gaussian weight for Q_minus_gaussian.
  double amplitude = 1.0;
  std::optional<std::filesystem::path> file_path;
};

/// Physical-representation initial field. `q` is required for the kinds that
/// reference the stationary state and must live on `grid`.
ComplexField build_initial_data(const InitialDataSpec& spec, const SpectralGrid& grid,
                                const RealField* q = nullptr);

}  // namespace ds1
