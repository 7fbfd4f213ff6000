#pragma once

// Post-processing of evolution records: dispersion / blow-up classification,
// blow-up rate fits, and comparison of near-blow-up profiles with the
// dynamically rescaled stationary state Q(xi/L, eta/L)/L.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ds1/evolution.hpp"
#include "ds1/grid.hpp"

namespace ds1 {

enum class Classification { dispersing, blow_up_suspected, stationary };
std::string to_string(Classification c);

struct Undetermined : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Needs at least 100 records. Throws Undetermined when no rule applies.
Classification classify(const EvolutionRecord& rec);

enum class NormKind { linf_psi, l2_grad_xi };
std::string to_string(NormKind k);
NormKind norm_kind_from_string(const std::string& s);

struct FitOptions {
  /// Explicit (t_lo, t_hi) window; disables the sweep.
  std::optional<std::pair<double, double>> window;
  /// Windows are the last fraction of the recorded points up to the cutoff.
  std::vector<double> fractions{0.15, 0.20, 0.25, 0.30};
  double report_fraction = 0.25;
  double delta_cutoff = -3.0;
  double stabilize_tol = 0.05;
};

struct FitSweepEntry {
  double fraction = 0.0;
  double a = 0.0, b = 0.0, t_star = 0.0;
  double rms_residual = 0.0;
};

/// ln N(t) = -a ln(t* - t) + b, so a > 0 is growth. For l2_grad_xi the
/// stored series is the unsquared norm; the squared-norm exponent is
/// reported alongside as a_squared = 2a, b_squared = 2b.
struct FitReport {
  NormKind norm_kind = NormKind::linf_psi;
  double a = 0.0, b = 0.0, t_star = 0.0;
  double a_squared = 0.0, b_squared = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  std::size_t points = 0;
  double rms_residual = 0.0;
  bool stabilized = false;
  std::vector<FitSweepEntry> sweep;

  /// The exponent as quoted with the squared gradient norm (a for linf).
  double a_quoted() const { return norm_kind == NormKind::l2_grad_xi ? a_squared : a; }
};

/// Fit of one window [t_lo, t_hi] of (t, N) data.
FitSweepEntry fit_power_law(std::span<const double> t, std::span<const double> norm);

FitReport fit_blowup(const EvolutionRecord& rec, NormKind kind, const FitOptions& opt = {});

/// sqrt((t* - t) / ln|ln(t* - t)|). Throws std::domain_error when t >= t*
/// or ln|ln(t* - t)| <= 0.
std::vector<double> loglog_rate(std::span<const double> t, double t_star);

enum class RateLaw { linear, loglog };
std::string to_string(RateLaw r);

struct RateLawComparison {
  RateLaw better = RateLaw::linear;
  double rms_linear = 0.0;
  double rms_loglog = 0.0;
  std::size_t points = 0;
};

/// Compares L(t) against c (t* - t) and c loglog_rate(t) in log space, each
/// with its best constant c. Points where the loglog law is undefined are
/// skipped for both.
RateLawComparison compare_rate_laws(std::span<const double> t, std::span<const double> L, double t_star);

struct ProfileComparison {
  double L = 0.0;
  double max_residual_fraction = 0.0;
  double center_xi = 0.0, center_eta = 0.0;
  std::size_t core_points = 0;
  bool truncated_core = false;
  /// |Psi| - Q((xi - xi0)/L, (eta - eta0)/L)/L on the Psi grid (the model is
  /// evaluated where |Psi| >= 1e-3 max|Psi| and taken as zero elsewhere).
  RealField residual;
};

ProfileComparison compare_profile(const ComplexField& psi, const RealField& q);

/// JSON documents.
std::string to_json(const FitReport& r);
std::string to_json(const ProfileComparison& p);
std::string to_json(const RateLawComparison& c);

/// Overlay data for plotting: t,norm,fit,loglog over the fit window.
void write_overlay_csv(const std::filesystem::path& path, const EvolutionRecord& rec, const FitReport& fit);

}  // namespace ds1
