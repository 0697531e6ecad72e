#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace bgklr {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or indices that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or precondition on user-supplied parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical failure during stepping (singular interpolation, non-finite stage, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Density or temperature fell below its floor at a grid row.
class PositivityError : public NumericalError {
 public:
  PositivityError(const std::string& what, Index row) : NumericalError(what), row_(row) {}
  Index row() const noexcept { return row_; }

 private:
  Index row_;
};

}  // namespace bgklr
