#pragma once

// Right-hand side of the BGK kinetic equation
//   h = -sum_i v_i d_{x_i} f + (M(f) - f) / eps
// for factored f = X S V^T, evaluated on row/column subsets of the grid.

#include "bgklr/grid.hpp"
#include "bgklr/index_set.hpp"
#include "bgklr/lowrank.hpp"

#include <optional>
#include <vector>

namespace bgklr {

enum class PositivityPolicy { error, clamp };

struct BgkParams {
  ProductGrid x_grid;
  ProductGrid v_grid;
  std::optional<double> epsilon;  // nullopt disables the collision term
  PositivityPolicy positivity = PositivityPolicy::error;
  double rho_floor = 1e-12;
  double temperature_floor = 1e-12;
};

/// Density, bulk velocity and temperature on the x-grid (or on a row subset).
struct Moments {
  Vector rho;
  std::vector<Vector> u;
  Vector T;
  std::optional<IndexSet> rows;  // set when restricted to a subset of the x-grid

  Index size() const { return rho.size(); }
};

class BgkModel {
 public:
  explicit BgkModel(BgkParams params);

  const BgkParams& params() const { return params_; }
  const ProductGrid& x_grid() const { return params_.x_grid; }
  const ProductGrid& v_grid() const { return params_.v_grid; }
  Index dx() const { return params_.x_grid.dims(); }
  Index dv() const { return params_.v_grid.dims(); }
  Index nx() const { return params_.x_grid.size(); }
  Index nv() const { return params_.v_grid.size(); }
  bool collisionless() const { return !params_.epsilon.has_value(); }
  double inv_epsilon() const { return collisionless() ? 0.0 : 1.0 / *params_.epsilon; }

  const Vector& velocity(Index i) const { return params_.v_grid.coordinates(i); }

  /// N_v x (1 + 2 d_v) quadrature columns [w, v_1 w, ..., v_d w, v_1^2 w, ..., v_d^2 w].
  const Matrix& moment_weights() const { return moment_weights_; }

 private:
  BgkParams params_;
  Matrix moment_weights_;
};

/// Spatial derivatives D_{x_i} X, i < d_x, on the full x-grid.
struct TransportFactors {
  std::vector<Matrix> dX;
};

TransportFactors transport_factors(const BgkModel& model, const Eigen::Ref<const Matrix>& X);

Moments compute_moments(const BgkModel& model, const State& state,
                        const std::optional<IndexSet>& x_rows = std::nullopt);

/// Moments of a dense N_x x N_v distribution by v-quadrature.
Moments dense_moments(const BgkModel& model, const Eigen::Ref<const Matrix>& f);

/// Discrete Maxwellian restricted to a block. x_rows index the x-grid and are
/// only allowed when `m` covers the whole grid.
Matrix maxwellian_block(const BgkModel& model, const Moments& m,
                        const std::optional<IndexSet>& x_rows = std::nullopt,
                        const std::optional<IndexSet>& v_cols = std::nullopt);

/// h(:, J). `cache` may supply D_{x_i} X for the state's X.
Matrix rhs_cols(const BgkModel& model, const State& state, const IndexSet& J,
                const TransportFactors* cache = nullptr);

/// h(I, :).
Matrix rhs_rows(const BgkModel& model, const State& state, const IndexSet& I,
                const TransportFactors* cache = nullptr);

/// h(I, J).
Matrix rhs_block(const BgkModel& model, const State& state, const IndexSet& I,
                 const IndexSet& J, const TransportFactors* cache = nullptr);

/// h for a dense distribution.
Matrix rhs_full(const BgkModel& model, const Eigen::Ref<const Matrix>& f);

}  // namespace bgklr
