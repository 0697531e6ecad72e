#pragma once

#include "bgklr/bgk.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bgklr {

/// A named scalar field on a grid, flattened row-major.
struct FieldSnapshot {
  std::string name;
  double time = 0.0;
  std::vector<Index> shape;
  std::vector<double> values;

  Index size() const { return static_cast<Index>(values.size()); }
};

FieldSnapshot make_snapshot(std::string name, double time, const ProductGrid& grid,
                            const Eigen::Ref<const Vector>& values);

double mass(const BgkModel& model, const State& state);
double dense_mass(const BgkModel& model, const Eigen::Ref<const Matrix>& f);

struct MomentumEnergy {
  std::vector<double> momentum;
  double energy = 0.0;
};

MomentumEnergy momentum_energy(const BgkModel& model, const State& state);
MomentumEnergy dense_momentum_energy(const BgkModel& model, const Eigen::Ref<const Matrix>& f);

/// Density, velocity components and temperature as snapshots on the x-grid.
std::vector<FieldSnapshot> moment_fields(const Moments& m, const ProductGrid& x_grid, double time);

/// Curl of the bulk velocity: one field in 2d, three in 3d.
std::vector<FieldSnapshot> vorticity(const Moments& m, const ProductGrid& x_grid, double time = 0.0);

/// Weighted L2 distance between evaluate(state) and a dense reference,
/// assembled over column blocks.
double l2_error(const BgkModel& model, const State& state, const Eigen::Ref<const Matrix>& reference,
                Index block_cols = 1024);

/// Per-axis treatment for slice_or_marginal.
struct AxisReduction {
  enum class Kind { keep, slice, integrate };
  Kind kind = Kind::keep;
  double coordinate = 0.0;  // for slice: requested coordinate, nearest grid point is used

  static AxisReduction keep() { return {}; }
  static AxisReduction slice(double c) { return {Kind::slice, c}; }
  static AxisReduction integrate() { return {Kind::integrate, 0.0}; }
};

struct ReducedField {
  FieldSnapshot field;
  std::vector<Index> slice_indices;  // one per sliced axis, in axis order
};

ReducedField slice_or_marginal(const FieldSnapshot& field, const ProductGrid& grid,
                               const std::vector<AxisReduction>& spec);

/// Nearest grid index to a coordinate on a periodic axis.
Index nearest_index(const Axis& axis, double coordinate);

}  // namespace bgklr
