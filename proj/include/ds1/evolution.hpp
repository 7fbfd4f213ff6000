#pragma once

// Time integration of the spectrally discretized DS I system
//
//   u_t = L u + N(u),   L = -2i (k_xi^2 + k_eta^2),
//   N(u) = i F[ (B |Psi|^2) Psi ],   Psi = F^{-1} u,
//
// with the fourth-order exponential time differencing Runge-Kutta scheme
// (ETDRK4) of Cox and Matthews. Its coefficient functions are evaluated from
// the phi-functions, by Taylor series for |z| < 1 and by the recurrence
// phi_{k+1} = (phi_k - 1/k!)/z otherwise.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ds1/grid.hpp"
#include "ds1/parallel.hpp"
#include "ds1/singular_ops.hpp"

namespace ds1 {

struct EvolutionConfig {
  double t_start = 0.0;
  double t_max = 1.0;
  std::size_t n_steps = 1000;
  std::size_t record_every = 1;
  std::vector<double> snapshot_times;
  double delta_abort = -3.0;
  std::size_t checkpoint_every = 0;  // 0: no checkpoints
  bool record_energy = true;
  /// Stop with resolution_lost once the spectral tail ratio of a recorded
  /// state exceeds this; 0 disables the check.
  double resolution_abort = 0.0;

  double dt() const { return (t_max - t_start) / static_cast<double>(n_steps); }
  void validate() const;
};

enum class Termination { completed, delta_abort, resolution_lost };
std::string to_string(Termination t);

struct SnapshotRef {
  double time = 0.0;
  std::filesystem::path path;
};

struct EvolutionRecord {
  std::vector<double> times, linf, mass, l2_grad_xi, l2_grad_eta, energy, delta;
  std::vector<SnapshotRef> snapshots;
  Termination termination = Termination::completed;
  double m0 = 0.0;
  double dt = 0.0;
  std::size_t steps_taken = 0;
  /// Fourier state after the last step taken.
  ComplexField final_state;
  /// Physical state at the last record with delta <= delta_abort.
  ComplexField last_good_state;
  double last_good_time = std::numeric_limits<double>::quiet_NaN();

  std::size_t size() const { return times.size(); }
};

/// Files written by an evolution. An empty directory disables all output.
struct EvolutionIO {
  std::filesystem::path dir;
  std::string stem = "run";
  std::uint64_t config_hash = 0;

  std::filesystem::path csv_path() const { return dir / (stem + ".csv"); }
  std::filesystem::path checkpoint_path() const { return dir / (stem + ".ckpt"); }
  std::filesystem::path snapshot_path(std::size_t index) const;
};

/// Called after every record with the step index, time and Fourier state.
using RecordObserver = std::function<void(std::size_t step, double t, const ComplexField& state_hat)>;

inline constexpr const char* kNormsCsvHeader = "t,linf,mass,l2gradxi,l2gradeta,energy,delta";

double mass(const ComplexField& psi);
/// Quadrature of |Psi_xi|^2 + |Psi_eta|^2 + (1/4)(d_eta^{-1}rho d_xi rho + d_xi^{-1}rho d_eta rho),
/// rho = |Psi|^2.
double energy(const ComplexField& psi);
/// ||d_axis Psi||_2 (not squared), via Parseval.
double l2_gradient(const ComplexField& psi_hat, Axis axis);

struct RhsSplit {
  aligned_vector<cplx> linear_symbol;  // -2i k^2 on the full spectrum
  ComplexField nonlinear;              // N(u), Fourier representation
};
RhsSplit rhs_split(const ComplexField& psi_hat);

/// ETDRK4 stepper with its workspaces. Coefficients are cached per dt.
class Etdrk4 {
 public:
  explicit Etdrk4(SpectralGrid grid, exec::Policy policy = exec::default_policy);

  const SpectralGrid& grid() const { return grid_; }
  /// Drops the nonlinear term (exact linear flow); for tests.
  void set_linear_only(bool on) { linear_only_ = on; }

  /// out = N(in). `in` and `out` may alias.
  void nonlinear(std::span<const cplx> in, std::span<cplx> out);
  /// One step of size dt on a Fourier state, in place.
  void step(std::span<cplx> u, double dt);

 private:
  void prepare(double dt);
  std::size_t quarter_index(std::size_t p, std::size_t q) const;

  SpectralGrid grid_;
  exec::Policy policy_;
  NonlocalOperator B_;
  bool linear_only_ = false;
  double dt_ = 0.0;
  std::size_t qcols_ = 0;
  std::vector<std::size_t> abs_p_, abs_q_;
  // Coefficients on the quarter lattice (|m_xi|, |m_eta|).
  aligned_vector<cplx> E_, E2_, Q_, f1_, f2_, f3_;
  aligned_vector<cplx> work_;
  aligned_vector<double> rho_, brho_;
  aligned_vector<cplx> nu_, na_, nb_, tmp_;
};

EvolutionRecord evolve(const ComplexField& psi0, const EvolutionConfig& cfg, const EvolutionIO& io = {},
                       const RecordObserver& observer = {}, exec::Policy policy = exec::default_policy);

/// Continues a run from io.checkpoint_path(). The result, CSV and snapshots
/// match an uninterrupted run bitwise. Throws FormatError on a config hash or
/// grid mismatch.
EvolutionRecord resume_evolution(const SpectralGrid& grid, const EvolutionConfig& cfg, const EvolutionIO& io,
                                 const RecordObserver& observer = {}, exec::Policy policy = exec::default_policy);

/// Reads a norms CSV back (as many rows as present, or the first `rows`).
EvolutionRecord read_norms_csv(const std::filesystem::path& path, std::size_t rows = static_cast<std::size_t>(-1));
void write_norms_csv(const std::filesystem::path& path, const EvolutionRecord& rec);

/// Two-phase protocol for blow-up runs: a coarse run until delta abort at
/// t_a, then a restart from the latest recorded state at or before
/// restart_fraction * t_a with dt / refine, run on to the coarse end time.
/// A coarse run that ends with lost resolution is refined the same way.
struct TwoPhaseConfig {
  EvolutionConfig coarse;
  double restart_fraction = 0.9;
  std::size_t refine = 10;
  /// Coarse states are kept in memory about every keep_spacing * t.
  double keep_spacing = 0.04;
};

struct TwoPhaseResult {
  EvolutionRecord coarse;
  EvolutionRecord fine;
  /// Coarse records before the restart followed by the fine ones.
  EvolutionRecord combined;
  double abort_time = 0.0;
  double restart_time = 0.0;
  bool refined = false;  // false when the coarse run never aborted
};

TwoPhaseResult run_two_phase(const ComplexField& psi0, const TwoPhaseConfig& cfg, const EvolutionIO& io = {},
                             exec::Policy policy = exec::default_policy);
/// Continues the coarse phase from its checkpoint, then runs the fine phase.
/// The checkpoint state is a restart candidate in addition to later ones.
TwoPhaseResult resume_two_phase(const SpectralGrid& grid, const TwoPhaseConfig& cfg, const EvolutionIO& io,
                                exec::Policy policy = exec::default_policy);

}  // namespace ds1
