#include "bgklr/diagnostics.hpp"

#include <cmath>

namespace bgklr {

FieldSnapshot make_snapshot(std::string name, double time, const ProductGrid& grid,
                            const Eigen::Ref<const Vector>& values) {
  if (values.size() != grid.size()) throw DimensionError("snapshot: size does not match grid");
  if (!values.allFinite()) throw NumericalError("snapshot: non-finite values in " + name);
  FieldSnapshot s;
  s.name = std::move(name);
  s.time = time;
  for (const auto& a : grid.axes()) s.shape.push_back(a.n);
  s.values.assign(values.data(), values.data() + values.size());
  return s;
}

double mass(const BgkModel& model, const State& state) {
  const Vector rho = state.X * (state.S * (state.V.transpose() * model.v_grid().weights()));
  return model.x_grid().weights().dot(rho);
}

double dense_mass(const BgkModel& model, const Eigen::Ref<const Matrix>& f) {
  return model.x_grid().weights().dot(f * model.v_grid().weights());
}

namespace {

// Totals over x of [rho, int v_i f, int v_i^2 f].
MomentumEnergy from_totals(const BgkModel& model, const Vector& totals) {
  const Index d = model.dv();
  MomentumEnergy me;
  for (Index i = 0; i < d; ++i) me.momentum.push_back(totals(1 + i));
  // rho (|u|^2 + d T) = int |v|^2 f
  me.energy = 0.5 * totals.segment(1 + d, d).sum();
  return me;
}

}  // namespace

MomentumEnergy momentum_energy(const BgkModel& model, const State& state) {
  const Vector xs = state.S.transpose() * (state.X.transpose() * model.x_grid().weights());
  const Vector totals = model.moment_weights().transpose() * (state.V * xs);
  return from_totals(model, totals);
}

MomentumEnergy dense_momentum_energy(const BgkModel& model, const Eigen::Ref<const Matrix>& f) {
  const Vector totals = (f * model.moment_weights()).transpose() * model.x_grid().weights();
  return from_totals(model, totals);
}

std::vector<FieldSnapshot> moment_fields(const Moments& m, const ProductGrid& x_grid, double time) {
  if (m.rows) throw DimensionError("moment_fields: moments are row-restricted");
  std::vector<FieldSnapshot> out;
  out.push_back(make_snapshot("rho", time, x_grid, m.rho));
  for (std::size_t i = 0; i < m.u.size(); ++i) {
    out.push_back(make_snapshot("u" + std::to_string(i + 1), time, x_grid, m.u[i]));
  }
  out.push_back(make_snapshot("T", time, x_grid, m.T));
  return out;
}

std::vector<FieldSnapshot> vorticity(const Moments& m, const ProductGrid& x_grid, double time) {
  const Index d = x_grid.dims();
  if (d != 2 && d != 3) throw DimensionError("vorticity: needs 2 or 3 spatial dimensions");
  if (m.rows || m.size() != x_grid.size()) {
    throw DimensionError("vorticity: moments must cover the x-grid");
  }
  if (static_cast<Index>(m.u.size()) < d) {
    throw DimensionError("vorticity: not enough velocity components");
  }
  auto deriv = [&](Index comp, Index axis) -> Vector {
    return spectral_derivative(x_grid, m.u[comp], axis).col(0);
  };
  std::vector<FieldSnapshot> out;
  if (d == 2) {
    const Vector w = deriv(1, 0) - deriv(0, 1);
    out.push_back(make_snapshot("omega", time, x_grid, w));
  } else {
    out.push_back(make_snapshot("omega1", time, x_grid, deriv(2, 1) - deriv(1, 2)));
    out.push_back(make_snapshot("omega2", time, x_grid, deriv(0, 2) - deriv(2, 0)));
    out.push_back(make_snapshot("omega3", time, x_grid, deriv(1, 0) - deriv(0, 1)));
  }
  return out;
}

double l2_error(const BgkModel& model, const State& state, const Eigen::Ref<const Matrix>& reference,
                Index block_cols) {
  if (reference.rows() != state.nx() || reference.cols() != state.nv()) {
    throw DimensionError("l2_error: reference shape does not match state");
  }
  if (block_cols < 1) block_cols = 1;
  const Vector& wx = model.x_grid().weights();
  const Vector& wv = model.v_grid().weights();
  const Matrix XS = state.X * state.S;
  double sum = 0.0;
  for (Index c0 = 0; c0 < state.nv(); c0 += block_cols) {
    const Index nc = std::min(block_cols, state.nv() - c0);
    const Matrix diff =
        XS * state.V.middleRows(c0, nc).transpose() - reference.middleCols(c0, nc);
    sum += wx.dot(diff.array().square().matrix() * wv.segment(c0, nc));
  }
  return std::sqrt(sum);
}

Index nearest_index(const Axis& axis, double coordinate) {
  const double k = std::round((coordinate - axis.lower) / axis.spacing);
  Index idx = static_cast<Index>(k) % axis.n;
  if (idx < 0) idx += axis.n;
  return idx;
}

ReducedField slice_or_marginal(const FieldSnapshot& field, const ProductGrid& grid,
                               const std::vector<AxisReduction>& spec) {
  const Index d = grid.dims();
  if (static_cast<Index>(spec.size()) != d) {
    throw DimensionError("slice_or_marginal: one reduction per axis required");
  }
  if (field.size() != grid.size()) {
    throw DimensionError("slice_or_marginal: field does not match grid");
  }
  ReducedField out;
  std::vector<Index> fixed(static_cast<std::size_t>(d), -1);
  std::vector<Index> kept;
  for (Index a = 0; a < d; ++a) {
    const auto& r = spec[a];
    if (r.kind == AxisReduction::Kind::slice) {
      fixed[a] = nearest_index(grid.axis(a), r.coordinate);
      out.slice_indices.push_back(fixed[a]);
    } else if (r.kind == AxisReduction::Kind::keep) {
      kept.push_back(a);
    }
  }
  std::vector<Index> shape;
  for (Index a : kept) shape.push_back(grid.axis(a).n);
  Index out_size = 1;
  for (Index n : shape) out_size *= n;

  out.field.name = field.name;
  out.field.time = field.time;
  out.field.shape = shape;
  out.field.values.assign(static_cast<std::size_t>(out_size), 0.0);

  for (Index flat = 0; flat < grid.size(); ++flat) {
    const auto multi = grid.multi_index(flat);
    double w = 1.0;
    bool on_slice = true;
    for (Index a = 0; a < d; ++a) {
      if (spec[a].kind == AxisReduction::Kind::slice && multi[a] != fixed[a]) {
        on_slice = false;
        break;
      }
      if (spec[a].kind == AxisReduction::Kind::integrate) w *= grid.axis(a).weights(multi[a]);
    }
    if (!on_slice) continue;
    Index target = 0;
    for (Index a : kept) target = target * grid.axis(a).n + multi[a];
    out.field.values[target] += w * field.values[flat];
  }
  return out;
}

}  // namespace bgklr
