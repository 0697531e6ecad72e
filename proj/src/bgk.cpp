#include "bgklr/bgk.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace bgklr {

BgkModel::BgkModel(BgkParams params) : params_(std::move(params)) {
  if (dx() > dv()) {
    throw ConfigError("bgk: spatial dimension exceeds velocity dimension");
  }
  if (params_.epsilon && !(*params_.epsilon > 0.0 && std::isfinite(*params_.epsilon))) {
    throw ConfigError("bgk: epsilon must be finite and positive");
  }
  const Index d = dv();
  const Vector& w = params_.v_grid.weights();
  moment_weights_.resize(nv(), 1 + 2 * d);
  moment_weights_.col(0) = w;
  for (Index i = 0; i < d; ++i) {
    const Vector& v = velocity(i);
    moment_weights_.col(1 + i) = v.cwiseProduct(w);
    moment_weights_.col(1 + d + i) = v.cwiseProduct(v).cwiseProduct(w);
  }
}

TransportFactors transport_factors(const BgkModel& model, const Eigen::Ref<const Matrix>& X) {
  TransportFactors tf;
  tf.dX.reserve(static_cast<std::size_t>(model.dx()));
  for (Index i = 0; i < model.dx(); ++i) {
    tf.dX.push_back(spectral_derivative(model.x_grid(), X, i));
  }
  return tf;
}

namespace {

// raw: rows x (1 + 2d) integrals [rho, int v_i f, int v_i^2 f].
Moments moments_from_raw(const BgkModel& model, const Matrix& raw, std::optional<IndexSet> rows) {
  const Index d = model.dv();
  const Index n = raw.rows();
  const auto& p = model.params();
  const bool clamp = p.positivity == PositivityPolicy::clamp;
  auto row_of = [&](Index a) { return rows ? (*rows)[a] : a; };

  Moments m;
  m.rows = std::move(rows);
  m.rho = raw.col(0);
  for (Index a = 0; a < n; ++a) {
    if (!(m.rho(a) > p.rho_floor)) {
      if (clamp && std::isfinite(m.rho(a))) {
        m.rho(a) = p.rho_floor;
      } else {
        throw PositivityError("density below floor at x-row " + std::to_string(row_of(a)) +
                                  " (rho = " + std::to_string(m.rho(a)) + ")",
                              row_of(a));
      }
    }
  }
  m.u.resize(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) m.u[i] = raw.col(1 + i).cwiseQuotient(m.rho);
  m.T = Vector::Zero(n);
  for (Index i = 0; i < d; ++i) {
    const Vector& u = m.u[i];
    m.T.array() += raw.col(1 + d + i).array() - 2.0 * u.array() * raw.col(1 + i).array() +
                   u.array().square() * raw.col(0).array();
  }
  m.T.array() /= static_cast<double>(d) * m.rho.array();
  for (Index a = 0; a < n; ++a) {
    if (!(m.T(a) > p.temperature_floor)) {
      if (clamp && std::isfinite(m.T(a))) {
        m.T(a) = p.temperature_floor;
      } else {
        throw PositivityError("temperature below floor at x-row " + std::to_string(row_of(a)) +
                                  " (T = " + std::to_string(m.T(a)) + ")",
                              row_of(a));
      }
    }
  }
  return m;
}

Matrix restrict_rows(const Matrix& A, const IndexSet& rows) { return A(rows.indices, Eigen::all); }

void check_state(const BgkModel& model, const State& s) {
  if (s.nx() != model.nx() || s.nv() != model.nv() || s.S.rows() != s.X.cols() ||
      s.S.cols() != s.V.cols()) {
    throw DimensionError("bgk: state shape does not match the grids");
  }
}

void check_cache(const BgkModel& model, const State& s, const TransportFactors* cache) {
  if (!cache) return;
  if (static_cast<Index>(cache->dX.size()) != model.dx()) {
    throw DimensionError("bgk: transport cache has wrong dimension count");
  }
  for (const auto& d : cache->dX) {
    if (d.rows() != s.nx() || d.cols() != s.X.cols()) {
      throw DimensionError("bgk: transport cache shape does not match X");
    }
  }
}

// S (diag(v_i(cols)) V(cols,:))^T for each spatial direction i.
std::vector<Matrix> velocity_coefficients(const BgkModel& model, const State& s,
                                          const std::optional<IndexSet>& cols) {
  std::vector<Matrix> out;
  const Matrix Vc = cols ? restrict_rows(s.V, *cols) : s.V;
  for (Index i = 0; i < model.dx(); ++i) {
    const Vector vi = cols ? Vector(model.velocity(i)(cols->indices)) : model.velocity(i);
    out.push_back(s.S * (Vc.array().colwise() * vi.array()).matrix().transpose());
  }
  return out;
}

}  // namespace

Moments compute_moments(const BgkModel& model, const State& state,
                        const std::optional<IndexSet>& x_rows) {
  check_state(model, state);
  if (x_rows) check_bounds(*x_rows, model.nx(), "compute_moments");
  const Matrix coeff = state.S * (state.V.transpose() * model.moment_weights());
  const Matrix raw = x_rows ? Matrix(state.X(x_rows->indices, Eigen::all) * coeff)
                            : Matrix(state.X * coeff);
  return moments_from_raw(model, raw, x_rows);
}

Moments dense_moments(const BgkModel& model, const Eigen::Ref<const Matrix>& f) {
  if (f.rows() != model.nx() || f.cols() != model.nv()) {
    throw DimensionError("dense_moments: shape does not match the grids");
  }
  return moments_from_raw(model, f * model.moment_weights(), std::nullopt);
}

Matrix maxwellian_block(const BgkModel& model, const Moments& m,
                        const std::optional<IndexSet>& x_rows,
                        const std::optional<IndexSet>& v_cols) {
  if (x_rows && m.rows) {
    throw DimensionError("maxwellian_block: moments are already row-restricted");
  }
  if (!m.rows && m.size() != model.nx()) {
    throw DimensionError("maxwellian_block: moments do not cover the x-grid");
  }
  if (x_rows) check_bounds(*x_rows, m.size(), "maxwellian_block rows");
  if (v_cols) check_bounds(*v_cols, model.nv(), "maxwellian_block cols");

  const Index d = model.dv();
  const Index nr = x_rows ? x_rows->size() : m.size();
  const Index nc = v_cols ? v_cols->size() : model.nv();
  auto pos = [&](Index a) { return x_rows ? (*x_rows)[a] : a; };
  auto col = [&](Index b) { return v_cols ? (*v_cols)[b] : b; };

  Vector scale(nr), inv2T(nr);
  for (Index a = 0; a < nr; ++a) {
    const double T = m.T(pos(a));
    scale(a) = m.rho(pos(a)) / std::pow(2.0 * std::numbers::pi * T, 0.5 * static_cast<double>(d));
    inv2T(a) = 0.5 / T;
  }
  Matrix out = Matrix::Zero(nr, nc);
  for (Index i = 0; i < d; ++i) {
    const Vector& vi = model.velocity(i);
    Vector ui(nr);
    for (Index a = 0; a < nr; ++a) ui(a) = m.u[i](pos(a));
    for (Index b = 0; b < nc; ++b) {
      out.col(b).array() += (vi(col(b)) - ui.array()).square();
    }
  }
  for (Index b = 0; b < nc; ++b) {
    out.col(b).array() = scale.array() * (-out.col(b).array() * inv2T.array()).exp();
  }
  if (!out.allFinite()) {
    for (Index b = 0; b < nc; ++b) {
      for (Index a = 0; a < nr; ++a) {
        if (!std::isfinite(out(a, b))) {
          throw NumericalError("maxwellian_block: non-finite value at x-row " +
                               std::to_string(m.rows ? (*m.rows)[a] : pos(a)) + ", v-col " +
                               std::to_string(col(b)));
        }
      }
    }
  }
  return out;
}

Matrix rhs_cols(const BgkModel& model, const State& state, const IndexSet& J,
                const TransportFactors* cache) {
  check_state(model, state);
  check_bounds(J, model.nv(), "rhs_cols");
  check_cache(model, state, cache);
  TransportFactors local;
  if (!cache) {
    local = transport_factors(model, state.X);
    cache = &local;
  }
  const auto coeff = velocity_coefficients(model, state, J);
  Matrix h = Matrix::Zero(model.nx(), J.size());
  for (Index i = 0; i < model.dx(); ++i) h.noalias() -= cache->dX[i] * coeff[i];
  if (!model.collisionless()) {
    const Moments m = compute_moments(model, state);
    const Matrix f = evaluate(state, std::nullopt, J);
    h += model.inv_epsilon() * (maxwellian_block(model, m, std::nullopt, J) - f);
  }
  return h;
}

Matrix rhs_rows(const BgkModel& model, const State& state, const IndexSet& I,
                const TransportFactors* cache) {
  check_state(model, state);
  check_bounds(I, model.nx(), "rhs_rows");
  check_cache(model, state, cache);
  TransportFactors local;
  if (!cache) {
    local = transport_factors(model, state.X);
    cache = &local;
  }
  const auto coeff = velocity_coefficients(model, state, std::nullopt);
  Matrix h = Matrix::Zero(I.size(), model.nv());
  for (Index i = 0; i < model.dx(); ++i) h.noalias() -= restrict_rows(cache->dX[i], I) * coeff[i];
  if (!model.collisionless()) {
    const Moments m = compute_moments(model, state, I);
    const Matrix f = evaluate(state, I, std::nullopt);
    h += model.inv_epsilon() * (maxwellian_block(model, m) - f);
  }
  return h;
}

Matrix rhs_block(const BgkModel& model, const State& state, const IndexSet& I,
                 const IndexSet& J, const TransportFactors* cache) {
  check_state(model, state);
  check_bounds(I, model.nx(), "rhs_block rows");
  check_bounds(J, model.nv(), "rhs_block cols");
  check_cache(model, state, cache);
  TransportFactors local;
  if (!cache) {
    local = transport_factors(model, state.X);
    cache = &local;
  }
  const auto coeff = velocity_coefficients(model, state, J);
  Matrix h = Matrix::Zero(I.size(), J.size());
  for (Index i = 0; i < model.dx(); ++i) h.noalias() -= restrict_rows(cache->dX[i], I) * coeff[i];
  if (!model.collisionless()) {
    const Moments m = compute_moments(model, state, I);
    const Matrix f = evaluate(state, I, J);
    h += model.inv_epsilon() * (maxwellian_block(model, m, std::nullopt, J) - f);
  }
  return h;
}

Matrix rhs_full(const BgkModel& model, const Eigen::Ref<const Matrix>& f) {
  if (f.rows() != model.nx() || f.cols() != model.nv()) {
    throw DimensionError("rhs_full: shape does not match the grids");
  }
  Matrix h = Matrix::Zero(f.rows(), f.cols());
  for (Index i = 0; i < model.dx(); ++i) {
    const Matrix df = spectral_derivative(model.x_grid(), f, i);
    h.array() -= df.array().rowwise() * model.velocity(i).transpose().array();
  }
  if (!model.collisionless()) {
    const Moments m = dense_moments(model, f);
    h += model.inv_epsilon() * (maxwellian_block(model, m) - f);
  }
  return h;
}

}  // namespace bgklr
