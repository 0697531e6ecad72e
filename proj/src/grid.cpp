#include "bgklr/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace bgklr {

Axis make_axis(double lower, double upper, Index n) {
  if (!(upper > lower)) {
    throw ConfigError("axis: upper bound must exceed lower bound");
  }
  if (n < 2 || n % 2 != 0) {
    throw ConfigError("axis: point count must be even and at least 2, got " + std::to_string(n));
  }
  Axis axis;
  axis.lower = lower;
  axis.upper = upper;
  axis.n = n;
  axis.spacing = (upper - lower) / static_cast<double>(n);
  axis.points.resize(n);
  for (Index k = 0; k < n; ++k) {
    axis.points(k) = lower + static_cast<double>(k) * axis.spacing;
  }
  axis.weights = Vector::Constant(n, axis.spacing);
  axis.wavenumbers.resize(n);
  const double scale = 2.0 * std::numbers::pi / (upper - lower);
  for (Index k = 0; k < n; ++k) {
    const Index j = k < n / 2 ? k : k - n;
    axis.wavenumbers(k) = scale * static_cast<double>(j);
  }
  axis.wavenumbers(n / 2) = 0.0;
  if (n <= kDenseDerivativeMax) {
    // D(j, k) = (scale / 2) (-1)^(j-k) cot((j-k) pi / n)
    axis.derivative = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k) {
        if (j == k) continue;
        const Index m = j - k;
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        axis.derivative(j, k) = 0.5 * scale * sign / std::tan(std::numbers::pi * double(m) / double(n));
      }
  }
  return axis;
}

ProductGrid::ProductGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) {
    throw ConfigError("grid: at least one axis required");
  }
  const std::size_t d = axes_.size();
  strides_.assign(d, 1);
  for (std::size_t a = d - 1; a > 0; --a) {
    strides_[a - 1] = strides_[a] * axes_[a].n;
  }
  size_ = strides_[0] * axes_[0].n;

  coordinates_.assign(d, Vector(size_));
  weights_ = Vector::Ones(size_);
  for (Index flat = 0; flat < size_; ++flat) {
    Index rem = flat;
    for (std::size_t a = 0; a < d; ++a) {
      const Index k = rem / strides_[a];
      rem -= k * strides_[a];
      coordinates_[a](flat) = axes_[a].points(k);
      weights_(flat) *= axes_[a].weights(k);
    }
  }
}

Index ProductGrid::flat_index(std::span<const Index> multi) const {
  if (static_cast<Index>(multi.size()) != dims()) {
    throw DimensionError("grid: multi-index has wrong length");
  }
  Index flat = 0;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    if (multi[a] < 0 || multi[a] >= axes_[a].n) {
      throw DimensionError("grid: multi-index component out of range");
    }
    flat += multi[a] * strides_[a];
  }
  return flat;
}

std::vector<Index> ProductGrid::multi_index(Index flat) const {
  if (flat < 0 || flat >= size_) {
    throw DimensionError("grid: flat index out of range");
  }
  std::vector<Index> multi(axes_.size());
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    multi[a] = flat / strides_[a];
    flat -= multi[a] * strides_[a];
  }
  return multi;
}

double ProductGrid::volume() const {
  double v = 1.0;
  for (const auto& axis : axes_) v *= axis.length();
  return v;
}

bool ProductGrid::operator==(const ProductGrid& other) const {
  if (axes_.size() != other.axes_.size()) return false;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    const auto& l = axes_[a];
    const auto& r = other.axes_[a];
    if (l.lower != r.lower || l.upper != r.upper || l.n != r.n) return false;
  }
  return true;
}

Matrix spectral_derivative(const ProductGrid& grid, const Eigen::Ref<const Matrix>& values,
                           Index axis) {
  if (values.rows() != grid.size()) {
    throw DimensionError("spectral_derivative: row count does not match grid size");
  }
  if (axis < 0 || axis >= grid.dims()) {
    throw DimensionError("spectral_derivative: axis out of range");
  }
  const Axis& ax = grid.axis(axis);
  const Index n = ax.n;
  const Index stride = grid.stride(axis);
  const Index block = n * stride;
  const Index outer = grid.size() / block;

  Matrix out(values.rows(), values.cols());
  if (ax.derivative.size() > 0) {
    for (Index c = 0; c < values.cols(); ++c) {
      const double* src = values.col(c).data();
      double* dst = out.col(c).data();
      if (stride == 1) {
        Eigen::Map<Matrix>(dst, n, outer).noalias() = ax.derivative * Eigen::Map<const Matrix>(src, n, outer);
      } else {
        for (Index o = 0; o < outer; ++o) {
          Eigen::Map<Matrix>(dst + o * block, stride, n).noalias() =
              Eigen::Map<const Matrix>(src + o * block, stride, n) * ax.derivative.transpose();
        }
      }
    }
    return out;
  }

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> line(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(n / 2 + 1));

  for (Index c = 0; c < values.cols(); ++c) {
    const double* src = values.col(c).data();
    double* dst = out.col(c).data();
    for (Index o = 0; o < outer; ++o) {
      for (Index inner = 0; inner < stride; ++inner) {
        const Index base = o * block + inner;
        for (Index k = 0; k < n; ++k) line[k] = src[base + k * stride];
        fft.fwd(spectrum.data(), line.data(), n);
        for (Index k = 0; k <= n / 2; ++k) {
          spectrum[k] *= std::complex<double>(0.0, ax.wavenumbers(k));
        }
        fft.inv(line.data(), spectrum.data(), n);
        for (Index k = 0; k < n; ++k) dst[base + k * stride] = line[k];
      }
    }
  }
  return out;
}

double integrate(const ProductGrid& grid, const Eigen::Ref<const Vector>& values) {
  if (values.size() != grid.size()) {
    throw DimensionError("integrate: length does not match grid size");
  }
  return grid.weights().dot(values);
}

}  // namespace bgklr
