#pragma once

#include "bgklr/types.hpp"

#include <span>
#include <vector>

namespace bgklr {

/// Axes up to this size differentiate by a dense matrix instead of an FFT.
inline constexpr Index kDenseDerivativeMax = 64;

/// Uniform periodic axis on [lower, upper) with n points.
struct Axis {
  double lower = 0.0;
  double upper = 1.0;
  Index n = 0;
  double spacing = 0.0;
  Vector points;       // lower + k * spacing
  Vector weights;      // periodic trapezoid, all equal to spacing
  Vector wavenumbers;  // FFT ordering scaled by 2*pi/(upper-lower); Nyquist entry zeroed
  Matrix derivative;   // n x n Fourier differentiation matrix, only for n <= kDenseDerivativeMax

  double length() const { return upper - lower; }
};

Axis make_axis(double lower, double upper, Index n);

/// Tensor product of axes, flattened row-major (last axis fastest).
class ProductGrid {
 public:
  ProductGrid() = default;
  explicit ProductGrid(std::vector<Axis> axes);

  Index dims() const { return static_cast<Index>(axes_.size()); }
  Index size() const { return size_; }
  const Axis& axis(Index a) const { return axes_[static_cast<std::size_t>(a)]; }
  const std::vector<Axis>& axes() const { return axes_; }

  /// Distance in the flat index between neighbours along axis a.
  Index stride(Index a) const { return strides_[static_cast<std::size_t>(a)]; }

  Index flat_index(std::span<const Index> multi) const;
  std::vector<Index> multi_index(Index flat) const;

  /// Quadrature weight of every flat point (product of the axis weights).
  const Vector& weights() const { return weights_; }
  double weight(Index flat) const { return weights_(flat); }

  /// Coordinate of axis a at every flat point.
  const Vector& coordinates(Index a) const { return coordinates_[static_cast<std::size_t>(a)]; }

  /// Total measure of the box.
  double volume() const;

  bool operator==(const ProductGrid& other) const;

 private:
  std::vector<Axis> axes_;
  std::vector<Index> strides_;
  std::vector<Vector> coordinates_;
  Vector weights_;
  Index size_ = 0;
};

/// Column-wise pseudospectral derivative along one axis of the grid.
Matrix spectral_derivative(const ProductGrid& grid, const Eigen::Ref<const Matrix>& values,
                           Index axis);

/// Quadrature sum of a flat field.
double integrate(const ProductGrid& grid, const Eigen::Ref<const Vector>& values);

}  // namespace bgklr
