#pragma once

// Run configuration: JSON (de)serialization, the configuration hash, and the
// named scenario presets.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ds1/evolution.hpp"
#include "ds1/reference.hpp"
#include "ds1/stationary.hpp"

namespace ds1 {

struct GridConfig {
  std::size_t n_xi = 1024, n_eta = 1024;
  double l_xi = 20.0, l_eta = 20.0;
  SpectralGrid make() const;
};

struct RunConfig {
  std::string scenario = "custom";
  GridConfig grid;
  InitialDataSpec initial;
  EvolutionConfig evolution;
  bool two_phase = false;
  double restart_fraction = 0.9;
  std::size_t refine = 10;
  NewtonConfig newton;
  /// Stationary state used by Q-based initial data and profile comparison.
  /// Empty: solved on the run grid (and cached).
  std::optional<std::filesystem::path> q_file;
  /// Not part of the hash.
  std::filesystem::path output_dir = "runs/custom";

  void validate() const;
};

std::string to_json(const RunConfig& c);
RunConfig run_config_from_json(const std::string& text);
RunConfig read_config(const std::filesystem::path& path);
void write_config(const std::filesystem::path& path, const RunConfig& c);

/// FNV-1a (64 bit) of the canonical JSON with the output directory removed.
std::uint64_t config_hash(const RunConfig& c);
std::string hex(std::uint64_t h);

/// Named scenarios. drom11_ci is the reduced blow-up run used as the CI gate.
std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);

/// Q_<n_xi>x<n_eta>_<l_xi>x<l_eta>.ds1
std::string q_cache_name(const GridConfig& g);

}  // namespace ds1
