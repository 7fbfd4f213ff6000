#pragma once

// Binary field snapshots, little-endian:
//   "DS1F" | u32 version | u64 n_xi | u64 n_eta | f64 l_xi | f64 l_eta |
//   f64 time | u8 representation (0 physical, 1 fourier) |
//   n_xi*n_eta interleaved (re, im) f64 pairs, row-major with xi as the row index.
//
// Checkpoints are a snapshot (Fourier representation) followed by a trailer:
//   "DS1C" | u64 step | u64 config_hash | f64 initial_mass | u64 records

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "ds1/grid.hpp"

namespace ds1 {

inline constexpr std::uint32_t kSnapshotVersion = 1;

struct SnapshotHeader {
  std::uint32_t version = kSnapshotVersion;
  std::uint64_t n_xi = 0;
  std::uint64_t n_eta = 0;
  double l_xi = 0.0;
  double l_eta = 0.0;
  double time = 0.0;
  Representation representation = Representation::physical;
};

struct Snapshot {
  ComplexField field;
  double time = 0.0;
};

struct CheckpointTrailer {
  std::uint64_t step = 0;
  std::uint64_t config_hash = 0;
  double initial_mass = 0.0;
  std::uint64_t records = 0;
};

struct Checkpoint {
  Snapshot state;
  CheckpointTrailer trailer;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_snapshot(const std::filesystem::path& path, const ComplexField& field, double time);
void write_snapshot(const std::filesystem::path& path, const RealField& field, double time);

SnapshotHeader read_snapshot_header(const std::filesystem::path& path);
/// Reads a snapshot. When `grid` is given it must match the stored geometry
/// and the field is attached to it (sharing its plans).
Snapshot read_snapshot(const std::filesystem::path& path, const std::optional<SpectralGrid>& grid = std::nullopt);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& cp);
Checkpoint read_checkpoint(const std::filesystem::path& path, const std::optional<SpectralGrid>& grid = std::nullopt);

}  // namespace ds1
