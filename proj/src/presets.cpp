#include "bgklr/presets.hpp"

#include "bgklr/bgk.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

namespace bgklr {

namespace {

// f = (g / m) G^T as a normalized rank-1 state with m the discrete integral.
State product_state(const ProductGrid& xg, const ProductGrid& vg, const Vector& g, const Vector& G) {
  const double m = xg.weights().dot(g) * vg.weights().dot(G);
  if (!(m > 0.0) || !std::isfinite(m)) throw NumericalError("initial condition: normalization is not positive");
  State s;
  s.X = g / g.norm();
  s.V = G / G.norm();
  s.S = Matrix::Constant(1, 1, g.norm() * G.norm() / m);
  s.x_orthonormal = s.v_orthonormal = true;
  return s;
}

Vector gaussian_product(const ProductGrid& grid, double center, double variance) {
  Vector out = Vector::Ones(grid.size());
  for (Index a = 0; a < grid.dims(); ++a)
    out.array() *= (-(grid.coordinates(a).array() - center).square() / (2.0 * variance)).exp();
  return out;
}

State to_rank(State s, Index r, std::uint64_t seed) {
  if (s.rank() > r) {
    s.X = s.X.leftCols(r).eval();
    s.V = s.V.leftCols(r).eval();
    s.S = s.S.topLeftCorner(r, r).eval();
    return s;
  }
  return s.rank() < r ? pad_rank(s, r, seed) : s;
}

State shear_state(const RunConfig& c, const ProductGrid& xg, const ProductGrid& vg) {
  const Index dx = xg.dims(), dv = vg.dims();
  // Per x-point bulk velocity and discrete normalization so that rho = 1 on the grid.
  std::vector<double> point(static_cast<std::size_t>(dx));
  Matrix u(xg.size(), dv);
  for (Index i = 0; i < xg.size(); ++i) {
    for (Index a = 0; a < dx; ++a) point[std::size_t(a)] = xg.coordinates(a)(i);
    const auto ui = shear_velocity(c, point);
    for (Index b = 0; b < dv; ++b) u(i, b) = ui[std::size_t(b)];
  }
  std::vector<const Vector*> vc;
  for (Index b = 0; b < dv; ++b) vc.push_back(&vg.coordinates(b));
  const double scale = std::pow(2.0 * std::numbers::pi, -0.5 * double(dv));
  auto maxwell = [&](Index i, Index j) {
    double e = 0.0;
    for (Index b = 0; b < dv; ++b) {
      const double d = (*vc[std::size_t(b)])(j) - u(i, b);
      e += d * d;
    }
    return scale * std::exp(-0.5 * e);
  };
  // The Maxwellian factorizes over velocity axes, so its quadrature does too.
  Vector norm(xg.size());
  for (Index i = 0; i < xg.size(); ++i) {
    double total = scale;
    for (Index b = 0; b < dv; ++b) {
      const Axis& axis = vg.axis(b);
      total *= (axis.weights.array() * (-0.5 * (axis.points.array() - u(i, b)).square()).exp()).sum();
    }
    norm(i) = 1.0 / total;
  }
  const Index cap = std::min<Index>({xg.size(), vg.size(), std::max<Index>(4 * c.rank, 256)});
  State s = cross_compress([&](Index i, Index j) { return norm(i) * maxwell(i, j); }, xg.size(),
                           vg.size(), c.cross_tol, cap);
  if (!s.tolerance_met)
    std::cerr << "warning: cross approximation stopped at rank " << s.rank()
              << " before reaching tolerance " << c.cross_tol << "\n";
  return s;
}

}  // namespace

std::vector<double> shear_velocity(const RunConfig& c, const std::vector<double>& x) {
  const double v0 = c.shear_v0, width = c.shear_width, delta = c.shear_perturbation;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> u(c.v_axes.size(), 0.0);
  if (c.experiment == Experiment::shear2d2v) {
    if (x.size() != 2 || u.size() != 2) throw DimensionError("shear_velocity: 2d point expected");
    u[0] = x[1] <= 0.5 ? v0 * std::tanh((x[1] - 0.25) / width) : v0 * std::tanh((0.75 - x[1]) / width);
    u[1] = delta * std::sin(two_pi * x[0]);
  } else if (c.experiment == Experiment::shear3d3v) {
    if (x.size() != 3 || u.size() != 3) throw DimensionError("shear_velocity: 3d point expected");
    const double r2 = x[1] * x[1] + x[2] * x[2];
    const double theta = std::atan2(x[2], x[1]);
    const double wave = delta * std::sin(two_pi * x[0]);
    u[0] = v0 * std::tanh((0.25 - r2) / width);
    u[1] = wave * std::cos(theta);
    u[2] = wave * std::sin(theta);
  } else {
    throw ConfigError("shear_velocity: not a shear experiment");
  }
  return u;
}

State initial_condition(const RunConfig& c) {
  validate(c);
  const ProductGrid xg = make_grid(c.x_axes), vg = make_grid(c.v_axes);
  State s;
  switch (c.experiment) {
    case Experiment::toy1d1v: {
      Vector g = Vector::Ones(xg.size()) + gaussian_product(xg, c.toy_x0, c.toy_variance);
      Vector G = gaussian_product(vg, 0.0, 1.0) / std::sqrt(2.0 * std::numbers::pi);
      s = product_state(xg, vg, g, G);
      break;
    }
    case Experiment::shear2d2v:
    case Experiment::shear3d3v:
      s = shear_state(c, xg, vg);
      break;
    case Experiment::explosion2d2v:
    case Experiment::explosion3d3v: {
      Vector g = Vector::Ones(xg.size()) +
                 c.explosion_alpha * gaussian_product(xg, 0.0, c.explosion_sigma * c.explosion_sigma);
      s = product_state(xg, vg, g, gaussian_product(vg, 0.0, 1.0));
      break;
    }
    case Experiment::custom: {
      Vector G = Vector::Zero(vg.size());
      for (Index a = 0; a < vg.dims(); ++a) {
        const double ua = a < Index(c.custom_u.size()) ? c.custom_u[std::size_t(a)] : 0.0;
        G.array() += (vg.coordinates(a).array() - ua).square();
      }
      G = (c.custom_rho * std::pow(2.0 * std::numbers::pi * c.custom_T, -0.5 * double(vg.dims()))) *
          (-G.array() / (2.0 * c.custom_T)).exp();
      const Vector g = Vector::Ones(xg.size());
      s.X = g / g.norm();
      s.V = G / G.norm();
      s.S = Matrix::Constant(1, 1, g.norm() * G.norm());
      s.x_orthonormal = s.v_orthonormal = true;
      break;
    }
  }
  s.time = 0.0;
  return to_rank(std::move(s), c.rank, c.seed);
}

}  // namespace bgklr
