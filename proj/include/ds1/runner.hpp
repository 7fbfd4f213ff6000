#pragma once

// Command implementations behind the ds1solve executable. Each returns a
// process exit status (0 success, 1 failure) and reports on `out`.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ds1/config.hpp"
#include "ds1/diagnostics.hpp"

namespace ds1 {

std::string version_string();

struct SelftestLine {
  std::string name;
  double error = 0.0;
  double tolerance = 1e-13;
  bool pass() const { return error <= tolerance; }
};

/// Gaussian -> erf and sinh/cosh^2 -> -sech antiderivatives on n points over
/// 10[-pi, pi], and B on the squared omega = 2 dromion on n x n.
std::vector<SelftestLine> selftest(std::size_t n = 512);
std::vector<SelftestLine> selftest_1d(std::size_t n = 512);
SelftestLine selftest_2d(std::size_t n = 512);

/// $DS1_Q_CACHE, else $XDG_CACHE_HOME/ds1solve, else ~/.cache/ds1solve.
std::filesystem::path q_cache_dir();
/// FFTW wisdom for the command-line tools: $DS1_WISDOM, else fftw.wisdom in
/// q_cache_dir(). Shared wisdom keeps MEASURE plans identical across processes.
void use_default_fft_wisdom();

/// Q for the run grid: cfg.q_file, the cache, or a fresh Newton solve from
/// six times the radiating dromion (stored in the cache).
RealField obtain_Q(const RunConfig& cfg, std::ostream& out);

int cmd_selftest(std::size_t n, std::ostream& out);
int cmd_stationary(const RunConfig& cfg, std::ostream& out);
int cmd_evolve(const RunConfig& cfg, bool resume, std::ostream& out);

struct FitCommandOptions {
  std::filesystem::path run_dir;
  std::optional<std::pair<double, double>> window;
  double delta_cutoff = -3.0;
  bool force = false;  // fit even when not classified as blow-up
};
int cmd_fit(const FitCommandOptions& opt, std::ostream& out);

int cmd_compare_profile(const std::filesystem::path& snapshot, const std::filesystem::path& q_path,
                        const std::filesystem::path& out_dir, std::ostream& out);

/// stationary (when Q is needed) -> evolve -> fit -> compare-profile.
int cmd_scenario(const RunConfig& cfg, bool resume, std::ostream& out);

/// Reads the evolution summary and norms written by cmd_evolve.
struct RunSummary {
  EvolutionRecord record;  // norms only
  std::string csv;
  std::optional<double> orbit_error;
  std::optional<double> mass_Q;
  double last_good_time = 0.0;
};
RunSummary read_run_summary(const std::filesystem::path& run_dir);

}  // namespace ds1
