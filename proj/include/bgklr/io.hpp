#pragma once

// Binary snapshot/checkpoint files and the diagnostics CSV.
//
// Binary layout, all integers and reals little-endian:
//   "DLRK" | u32 version | u8 kind | u8 dim count | u64 shape[dim count] | payload
// kind 1 (field):   payload is float64 values, row-major.
// kind 2 (factors): shape is (N_x, r, N_v); payload is the axis table
//   u64 d_x, u64 d_v, then (f64 lower, f64 upper, u64 n) per axis, x axes first,
//   then f64 time, then X, S, V as float64 row-major.

#include "bgklr/config.hpp"
#include "bgklr/diagnostics.hpp"
#include "bgklr/integrators.hpp"
#include "bgklr/lowrank.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

namespace bgklr {

inline constexpr std::uint32_t kFormatVersion = 1;

enum class FileKind : std::uint8_t { field = 1, factors = 2 };

struct FileHeader {
  std::uint32_t version = kFormatVersion;
  FileKind kind = FileKind::field;
  std::vector<std::uint64_t> shape;
};

struct Checkpoint {
  State state;
  std::vector<AxisSpec> x_axes;
  std::vector<AxisSpec> v_axes;
};

void write_field(const std::filesystem::path& path, const FieldSnapshot& field);
FieldSnapshot read_field(const std::filesystem::path& path);

void write_checkpoint(const std::filesystem::path& path, const State& state,
                      const ProductGrid& x_grid, const ProductGrid& v_grid);
Checkpoint read_checkpoint(const std::filesystem::path& path);

FileHeader read_header(const std::filesystem::path& path);

/// One row per step: step, time, rank, mass, momentum_1..d, energy, trunc_tail, wall_ms.
class DiagnosticsCsv {
 public:
  DiagnosticsCsv(const std::filesystem::path& path, Index velocity_dims);

  void write(const StepReport& report, const MomentumEnergy& me, bool record_wall_time);

 private:
  std::ofstream out_;
  Index dims_;
};

}  // namespace bgklr
