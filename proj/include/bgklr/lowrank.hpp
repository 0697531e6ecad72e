#pragma once

// Factored matrices f = X S V^T and the dense linear algebra around them.

#include "bgklr/index_set.hpp"
#include "bgklr/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bgklr {

inline constexpr std::uint64_t kCompletionSeed = 0x5eed'c0de'2024ULL;

template <typename Scalar>
struct LowRankState {
  MatrixX<Scalar> X;  // N_x x r
  MatrixX<Scalar> S;  // r x r
  MatrixX<Scalar> V;  // N_v x r
  bool x_orthonormal = false;
  bool v_orthonormal = false;
  double time = 0.0;
  // Cleared by cross_compress when the rank cap was hit before the tolerance.
  bool tolerance_met = true;

  Index rank() const { return S.rows(); }
  Index nx() const { return X.rows(); }
  Index nv() const { return V.rows(); }
};

using State = LowRankState<double>;

template <typename Scalar>
Scalar orthonormality_defect(const MatrixX<Scalar>& Q) {
  if (Q.cols() == 0) return Scalar(0);
  return (Q.transpose() * Q - MatrixX<Scalar>::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff();
}

/// Shape checks, plus the orthonormality tolerance for flagged factors.
template <typename Scalar>
void validate(const LowRankState<Scalar>& s) {
  if (s.S.rows() != s.S.cols() || s.X.cols() != s.S.rows() || s.V.cols() != s.S.cols()) {
    throw DimensionError("low-rank state: factor shapes are inconsistent");
  }
  if (s.rank() < 1 || s.rank() > std::min(s.nx(), s.nv())) {
    throw DimensionError("low-rank state: rank " + std::to_string(s.rank()) + " out of range");
  }
  if (s.x_orthonormal && orthonormality_defect(s.X) > Scalar(1e-10)) {
    throw NumericalError("low-rank state: X flagged orthonormal but is not");
  }
  if (s.v_orthonormal && orthonormality_defect(s.V) > Scalar(1e-10)) {
    throw NumericalError("low-rank state: V flagged orthonormal but is not");
  }
}

template <typename Scalar>
struct QrResult {
  MatrixX<Scalar> Q;
  MatrixX<Scalar> R;
};

namespace detail {

// Orthogonalizes v against the first k columns of Q (two passes, a third if
// rounding left a measurable component). Coefficients are accumulated in coeff.
template <typename Scalar>
void orthogonalize(const MatrixX<Scalar>& Q, Index k, VectorX<Scalar>& v, VectorX<Scalar>& coeff) {
  coeff.setZero(k);
  if (k == 0) return;
  const auto basis = Q.leftCols(k);
  for (int pass = 0; pass < 3; ++pass) {
    VectorX<Scalar> c = basis.transpose() * v;
    v.noalias() -= basis * c;
    coeff += c;
    if (pass >= 1 && c.norm() <= Scalar(1e-14) * v.norm()) break;
  }
}

template <typename Scalar>
VectorX<Scalar> random_direction(const MatrixX<Scalar>& Q, Index k, std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorX<Scalar> z(Q.rows()), coeff;
  for (;;) {
    for (Index i = 0; i < z.size(); ++i) z(i) = static_cast<Scalar>(normal(gen));
    const Scalar before = z.norm();
    orthogonalize(Q, k, z, coeff);
    const Scalar after = z.norm();
    if (after > Scalar(1e-6) * before) return z / after;
  }
}

}  // namespace detail

/// Thin QR by reorthogonalized Gram-Schmidt. Columns that are numerically in
/// the span of their predecessors get R(k,k) = 0 and a seeded random direction
/// in Q, so Q always has orthonormal columns.
template <typename Derived>
QrResult<typename Derived::Scalar> qr_orthonormalize(const Eigen::MatrixBase<Derived>& A,
                                                     std::uint64_t seed = kCompletionSeed) {
  using Scalar = typename Derived::Scalar;
  const Index n = A.rows();
  const Index k = A.cols();
  if (n < k) {
    throw DimensionError("qr_orthonormalize: more columns (" + std::to_string(k) +
                         ") than rows (" + std::to_string(n) + ")");
  }
  QrResult<Scalar> out{MatrixX<Scalar>(n, k), MatrixX<Scalar>::Zero(k, k)};
  std::mt19937_64 gen(seed);
  VectorX<Scalar> v, coeff;
  for (Index j = 0; j < k; ++j) {
    v = A.col(j);
    const Scalar norm0 = v.norm();
    detail::orthogonalize(out.Q, j, v, coeff);
    out.R.col(j).head(j) = coeff;
    const Scalar resid = v.norm();
    if (norm0 == Scalar(0) || resid <= Scalar(1e-13) * norm0) {
      out.Q.col(j) = detail::random_direction(out.Q, j, gen);
      out.R(j, j) = Scalar(0);
    } else {
      out.Q.col(j) = v / resid;
      out.R(j, j) = resid;
    }
  }
  return out;
}

/// frobenius: ||discarded||_2 <= theta ||sigma||_2; largest: first discarded sigma <= theta sigma_1.
enum class TruncationRule { frobenius, largest };

template <typename Scalar>
struct TruncatedSvd {
  MatrixX<Scalar> P;      // m x r1 left singular vectors
  VectorX<Scalar> sigma;  // r1 leading singular values, non-increasing
  MatrixX<Scalar> Q;      // m x r1 right singular vectors
  Index rank = 0;
  Scalar tail = 0;  // Frobenius norm of the discarded singular values
};

/// Smallest rank in [r_min, min(r_max, m)] whose discarded part satisfies the
/// rule (default ||tail||_2 <= theta * ||sigma||_2); the cap when no such rank exists.
template <typename Derived>
TruncatedSvd<typename Derived::Scalar> svd_truncate(const Eigen::MatrixBase<Derived>& Shat,
                                                    double theta, Index r_min, Index r_max,
                                                    TruncationRule rule = TruncationRule::frobenius) {
  using Scalar = typename Derived::Scalar;
  if (r_min < 1 || r_max < r_min || theta < 0.0) {
    throw ConfigError("svd_truncate: need 1 <= r_min <= r_max and theta >= 0");
  }
  if (!Shat.allFinite()) {
    throw NumericalError("svd_truncate: non-finite entries in core matrix");
  }
  const Index m = std::min(Shat.rows(), Shat.cols());
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(Shat.eval(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorX<Scalar>& sv = svd.singularValues();

  // tail2[r] = sum_{i >= r} sigma_i^2
  std::vector<Scalar> tail2(static_cast<std::size_t>(m) + 1, Scalar(0));
  for (Index i = m - 1; i >= 0; --i) tail2[i] = tail2[i + 1] + sv(i) * sv(i);
  const Scalar bound = static_cast<Scalar>(theta) * (rule == TruncationRule::frobenius
                                                          ? std::sqrt(tail2[0])
                                                          : (m > 0 ? sv(0) : Scalar(0)));

  const Index cap = std::min(r_max, m);
  const Index lo = std::min(r_min, cap);
  Index r1 = cap;
  for (Index r = lo; r <= cap; ++r) {
    const Scalar dropped = rule == TruncationRule::frobenius ? std::sqrt(tail2[r]) : (r < m ? sv(r) : Scalar(0));
    if (dropped <= bound) {
      r1 = r;
      break;
    }
  }
  TruncatedSvd<Scalar> out;
  out.rank = r1;
  out.P = svd.matrixU().leftCols(r1);
  out.Q = svd.matrixV().leftCols(r1);
  out.sigma = sv.head(r1);
  out.tail = std::sqrt(tail2[r1]);
  return out;
}

/// X(rows,:) S V(cols,:)^T; an absent set selects everything.
template <typename Scalar>
MatrixX<Scalar> evaluate(const LowRankState<Scalar>& s, const std::optional<IndexSet>& rows = {},
                         const std::optional<IndexSet>& cols = {}) {
  if (rows) check_bounds(*rows, s.nx(), "evaluate rows");
  if (cols) check_bounds(*cols, s.nv(), "evaluate cols");
  MatrixX<Scalar> left = rows ? MatrixX<Scalar>(s.X(rows->indices, Eigen::all) * s.S)
                              : MatrixX<Scalar>(s.X * s.S);
  if (cols) return left * s.V(cols->indices, Eigen::all).transpose();
  return left * s.V.transpose();
}

namespace detail {

// Orthonormalizes both factors and diagonalizes the core: f = U C W^T -> X S V^T.
template <typename Scalar>
LowRankState<Scalar> recompress(const MatrixX<Scalar>& U, const MatrixX<Scalar>& C,
                                const MatrixX<Scalar>& W) {
  auto qu = qr_orthonormalize(U);
  auto qw = qr_orthonormalize(W);
  MatrixX<Scalar> core = qu.R * C * qw.R.transpose();
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(core, Eigen::ComputeFullU | Eigen::ComputeFullV);
  LowRankState<Scalar> s;
  s.X = qu.Q * svd.matrixU();
  s.V = qw.Q * svd.matrixV();
  s.S = svd.singularValues().asDiagonal();
  s.x_orthonormal = s.v_orthonormal = true;
  return s;
}

}  // namespace detail

/// Adaptive cross approximation with partial pivoting of the matrix given by
/// entry(i, j), 0 <= i < nx, 0 <= j < nv. The Frobenius norm of the
/// approximation is tracked incrementally from the rank-1 terms.
template <typename Oracle>
State cross_compress(Oracle&& entry, Index nx, Index nv, double tol, Index r_max) {
  if (!(tol > 0.0)) throw ConfigError("cross_compress: tolerance must be positive");
  if (nx < 1 || nv < 1) throw DimensionError("cross_compress: empty matrix");
  const Index cap = std::min({r_max, nx, nv});
  if (cap < 1) throw ConfigError("cross_compress: r_max must be positive");

  Matrix U(nx, cap), W(nv, cap);
  std::vector<char> row_used(static_cast<std::size_t>(nx), 0);
  Index rank = 0;
  double norm2 = 0.0;
  bool converged = false;
  Index row = 0;
  Index zero_rows = 0;
  std::mt19937_64 gen(kCompletionSeed);
  Vector r(nv), c(nx);

  auto next_row = [&](const Vector* hint) -> Index {
    Index best = -1;
    double best_val = -1.0;
    if (hint) {
      for (Index i = 0; i < nx; ++i) {
        if (!row_used[i] && std::abs((*hint)(i)) > best_val) {
          best = i;
          best_val = std::abs((*hint)(i));
        }
      }
    }
    if (best < 0 || best_val == 0.0) {
      std::uniform_int_distribution<Index> pick(0, nx - 1);
      for (int tries = 0; tries < 64; ++tries) {
        const Index i = pick(gen);
        if (!row_used[i]) return i;
      }
      best = -1;
      for (Index i = 0; i < nx; ++i) {
        if (!row_used[i]) return i;
      }
    }
    return best;
  };

  // Before accepting convergence, probe a few unused rows; a probe whose
  // residual is not small becomes the next pivot row.
  auto probe = [&]() -> Index {
    const double scale = tol * std::sqrt(norm2 / double(nx));
    std::uniform_int_distribution<Index> pick(0, nx - 1);
    Vector probe_row(nv);
    for (int k = 0; k < 16; ++k) {
      const Index i = pick(gen);
      if (row_used[i]) continue;
      for (Index j = 0; j < nv; ++j) probe_row(j) = entry(i, j);
      if (rank > 0) probe_row.noalias() -= W.leftCols(rank) * U.row(i).head(rank).transpose();
      if (probe_row.norm() > scale) return i;
    }
    return -1;
  };

  while (rank < cap && row >= 0) {
    row_used[row] = 1;
    for (Index j = 0; j < nv; ++j) r(j) = entry(row, j);
    if (rank > 0) r.noalias() -= W.leftCols(rank) * U.row(row).head(rank).transpose();

    Index col = 0;
    const double pivot_abs = r.cwiseAbs().maxCoeff(&col);
    if (!(pivot_abs > 0.0) || pivot_abs <= 1e-300) {
      // Row already reproduced; probe a few others before declaring convergence.
      if (++zero_rows >= 4) {
        row = probe();
        if (row < 0) {
          converged = true;
          break;
        }
        zero_rows = 0;
        continue;
      }
      row = next_row(nullptr);
      continue;
    }
    zero_rows = 0;
    const double pivot = r(col);

    for (Index i = 0; i < nx; ++i) c(i) = entry(i, col);
    if (rank > 0) c.noalias() -= U.leftCols(rank) * W.row(col).head(rank).transpose();
    const Vector w = r / pivot;

    const double term2 = c.squaredNorm() * w.squaredNorm();
    if (rank > 0 && std::sqrt(term2) <= tol * std::sqrt(norm2)) {
      row = probe();
      if (row < 0) {
        converged = true;
        break;
      }
      continue;
    }
    double cross = 0.0;
    if (rank > 0) {
      const Vector uc = U.leftCols(rank).transpose() * c;
      const Vector wc = W.leftCols(rank).transpose() * w;
      cross = uc.dot(wc);
    }
    norm2 += term2 + 2.0 * cross;
    U.col(rank) = c;
    W.col(rank) = w;
    ++rank;
    if (!std::isfinite(norm2)) throw NumericalError("cross_compress: non-finite entries");

    Vector absc = c;
    for (Index i = 0; i < nx; ++i) {
      if (row_used[i]) absc(i) = 0.0;
    }
    row = next_row(&absc);
  }
  if (row < 0) converged = true;

  if (rank == 0) {
    // Identically zero matrix: return a rank-1 zero state.
    State s;
    s.X = Matrix::Zero(nx, 1);
    s.X(0, 0) = 1.0;
    s.V = Matrix::Zero(nv, 1);
    s.V(0, 0) = 1.0;
    s.S = Matrix::Zero(1, 1);
    s.x_orthonormal = s.v_orthonormal = true;
    return s;
  }
  State s = detail::recompress<double>(U.leftCols(rank), Matrix::Identity(rank, rank),
                                       W.leftCols(rank));
  s.tolerance_met = converged;
  return s;
}

/// Extends both bases by seeded random orthonormal columns with zero coefficients.
template <typename Scalar>
LowRankState<Scalar> pad_rank(const LowRankState<Scalar>& state, Index r_target,
                              std::uint64_t seed) {
  validate(state);
  const Index r = state.rank();
  if (r_target < r) throw ConfigError("pad_rank: target rank below current rank");
  if (r_target > std::min(state.nx(), state.nv())) {
    throw ConfigError("pad_rank: target rank exceeds min(N_x, N_v)");
  }
  LowRankState<Scalar> out = state;
  if (orthonormality_defect(out.X) > Scalar(1e-10) || orthonormality_defect(out.V) > Scalar(1e-10)) {
    out = detail::recompress<Scalar>(state.X, state.S, state.V);
    out.time = state.time;
  }
  out.x_orthonormal = out.v_orthonormal = true;
  if (r_target == r) return out;

  std::mt19937_64 gen(seed);
  auto extend = [&](MatrixX<Scalar>& B) {
    MatrixX<Scalar> E(B.rows(), r_target);
    E.leftCols(r) = B;
    for (Index k = r; k < r_target; ++k) E.col(k) = detail::random_direction(E, k, gen);
    B = std::move(E);
  };
  extend(out.X);
  extend(out.V);
  MatrixX<Scalar> S = MatrixX<Scalar>::Zero(r_target, r_target);
  S.topLeftCorner(r, r) = out.S;
  out.S = std::move(S);
  return out;
}

}  // namespace bgklr
