#pragma once

// DEIM greedy interpolation-index selection.

#include "bgklr/index_set.hpp"
#include "bgklr/types.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace bgklr {

/// DEIM index selection. Ties in the argmax go to the smallest index.
/// `count`, when given, must equal the column count; oversampling is not supported.
template <typename Derived>
IndexSet deim(const Eigen::MatrixBase<Derived>& M, GridSide side = GridSide::x,
              std::optional<Index> count = std::nullopt) {
  using Scalar = typename Derived::Scalar;
  const Index n = M.rows();
  const Index r = M.cols();
  if (r < 1 || n < r) {
    throw DimensionError("deim: need n >= r >= 1, got n=" + std::to_string(n) +
                         ", r=" + std::to_string(r));
  }
  if (count && *count != r) {
    throw ConfigError("deim: oversampling is not supported (count must equal column count)");
  }

  auto argmax_abs = [n](const auto& v) {
    Index best = 0;
    Scalar best_val = std::abs(v(0));
    for (Index i = 1; i < n; ++i) {
      const Scalar a = std::abs(v(i));
      if (a > best_val) {
        best = i;
        best_val = a;
      }
    }
    return best;
  };

  IndexSet out;
  out.side = side;
  out.indices.reserve(static_cast<std::size_t>(r));
  out.indices.push_back(argmax_abs(M.col(0)));

  VectorX<Scalar> residual(n);
  for (Index j = 1; j < r; ++j) {
    const MatrixX<Scalar> A = M.leftCols(j)(out.indices, Eigen::all);
    const VectorX<Scalar> b = M.col(j)(out.indices);
    Eigen::PartialPivLU<MatrixX<Scalar>> lu(A);
    if (!(lu.rcond() > Scalar(1e-14))) {
      throw NumericalError("deim: singular interpolation matrix at step " + std::to_string(j) +
                           " (rank-deficient input)");
    }
    const VectorX<Scalar> c = lu.solve(b);
    residual = M.col(j);
    residual.noalias() -= M.leftCols(j) * c;
    const Index next = argmax_abs(residual);
    if (!(std::abs(residual(next)) > Scalar(1e-14) * M.col(j).cwiseAbs().maxCoeff())) {
      throw NumericalError("deim: residual vanished at step " + std::to_string(j) +
                           " (rank-deficient input)");
    }
    out.indices.push_back(next);
  }
  return out;
}

/// 2-norm condition number of M(idx,:); +infinity when singular.
template <typename Derived>
double selection_condition(const Eigen::MatrixBase<Derived>& M, const IndexSet& idx) {
  using Scalar = typename Derived::Scalar;
  if (idx.size() != M.cols()) {
    throw DimensionError("selection_condition: index count must equal column count");
  }
  check_bounds(idx, M.rows(), "selection_condition");
  const MatrixX<Scalar> A = M(idx.indices, Eigen::all);
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(A);
  const auto& sv = svd.singularValues();
  const double smax = static_cast<double>(sv(0));
  const double smin = static_cast<double>(sv(sv.size() - 1));
  if (!(smin > 0.0) || !std::isfinite(smax)) return std::numeric_limits<double>::infinity();
  const double cond = smax / smin;
  if (cond > 1.0 / std::numeric_limits<double>::epsilon()) {
    return std::numeric_limits<double>::infinity();
  }
  return cond;
}

}  // namespace bgklr
