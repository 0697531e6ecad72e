#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bgklr/diagnostics.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace bgklr;
using std::numbers::pi;

namespace {

Matrix random_matrix(Index n, Index m, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix A(n, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i) A(i, j) = u(gen);
  return A;
}

State random_state(Index nx, Index nv, Index r, std::uint64_t seed) {
  State s;
  s.X = random_matrix(nx, r, seed);
  s.S = random_matrix(r, r, seed + 1);
  s.V = random_matrix(nv, r, seed + 2);
  return s;
}

BgkModel model_1d(Index nx, Index nv) {
  return BgkModel(BgkParams{ProductGrid({make_axis(-6, 6, nx)}), ProductGrid({make_axis(-6, 6, nv)}), 1.0});
}

Moments velocity_field(const ProductGrid& g, const std::vector<Vector>& u) {
  Moments m;
  m.rho = Vector::Ones(g.size());
  m.T = Vector::Ones(g.size());
  m.u = u;
  return m;
}

}  // namespace

TEST_CASE("mass") {
  const BgkModel m = model_1d(32, 32);
  const State s = random_state(32, 32, 3, 1);
  const Matrix f = evaluate(s);
  double naive = 0.0;
  for (Index i = 0; i < 32; ++i)
    for (Index j = 0; j < 32; ++j) naive += m.x_grid().weight(i) * m.v_grid().weight(j) * f(i, j);
  CHECK(std::abs(mass(m, s) - naive) <= 1e-12 * std::abs(naive));
  CHECK(dense_mass(m, f) == doctest::Approx(naive).epsilon(1e-13));
  State doubled = s;
  doubled.S *= 2.0;
  CHECK(mass(m, doubled) == doctest::Approx(2.0 * mass(m, s)).epsilon(1e-14));
}

TEST_CASE("momentum and energy of a uniform Maxwellian") {
  const ProductGrid xg({make_axis(0, 1, 4)});
  const ProductGrid vg({make_axis(-8, 8, 32), make_axis(-8, 8, 32), make_axis(-8, 8, 32)});
  const BgkModel m(BgkParams{xg, vg, 1.0});
  auto maxwell = [&](double u0) {
    Vector e = Vector::Zero(vg.size());
    e.array() += (vg.coordinates(0).array() - u0).square();
    e.array() += vg.coordinates(1).array().square() + vg.coordinates(2).array().square();
    const Vector G = std::pow(2 * pi, -1.5) * (-0.5 * e.array()).exp();
    State s;
    s.X = Vector::Ones(4) / 2.0;
    s.V = G / G.norm();
    s.S = Matrix::Constant(1, 1, 2.0 * G.norm());
    return s;
  };
  const MomentumEnergy me = momentum_energy(m, maxwell(0.0));
  REQUIRE(me.momentum.size() == 3);
  for (double p : me.momentum) CHECK(std::abs(p) <= 1e-8);
  CHECK(std::abs(me.energy - 1.5) <= 1e-8);

  const MomentumEnergy boosted = momentum_energy(m, maxwell(0.4));
  CHECK(std::abs(boosted.momentum[0] - 0.4) <= 1e-8);  // rho |Omega_x| u with rho = |Omega_x| = 1
  CHECK(std::abs(boosted.momentum[1]) <= 1e-8);

  const MomentumEnergy dense = dense_momentum_energy(m, evaluate(maxwell(0.4)));
  CHECK(dense.energy == doctest::Approx(boosted.energy).epsilon(1e-12));
}

TEST_CASE("momentum and energy agree with naive quadrature") {
  const BgkModel m = model_1d(32, 32);
  const State s = random_state(32, 32, 2, 9);
  const Matrix f = evaluate(s);
  const Vector& v = m.v_grid().coordinates(0);
  double p = 0.0, e = 0.0;
  for (Index i = 0; i < 32; ++i)
    for (Index j = 0; j < 32; ++j) {
      const double w = m.x_grid().weight(i) * m.v_grid().weight(j) * f(i, j);
      p += w * v(j);
      e += 0.5 * w * v(j) * v(j);
    }
  const MomentumEnergy me = momentum_energy(m, s);
  CHECK(std::abs(me.momentum[0] - p) <= 1e-8);
  CHECK(std::abs(me.energy - e) <= 1e-8);
}

TEST_CASE("vorticity of simple fields") {
  const ProductGrid g({make_axis(0, 1, 16), make_axis(0, 1, 16)});
  const auto zero = vorticity(velocity_field(g, {Vector::Constant(256, 0.3), Vector::Constant(256, -1.0)}), g);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].name == "omega");
  for (double w : zero[0].values) CHECK(std::abs(w) <= 1e-12);

  const Vector u1 = (2 * pi * g.coordinates(1).array()).sin();
  const auto w = vorticity(velocity_field(g, {u1, Vector::Zero(256)}), g, 0.5);
  CHECK(w[0].time == 0.5);
  for (Index k = 0; k < 256; ++k)
    CHECK(std::abs(w[0].values[std::size_t(k)] + 2 * pi * std::cos(2 * pi * g.coordinates(1)(k))) <= 1e-10);
}

TEST_CASE("vorticity against a fine-grid finite-difference curl") {
  const Index nc = 32, nf = 2048;
  const ProductGrid g({make_axis(0, 1, nc), make_axis(0, 1, nc)});
  auto u1 = [](double x, double y) { return std::exp(0.5 * std::sin(2 * pi * y)) * std::cos(2 * pi * x); };
  auto u2 = [](double x, double y) { return std::sin(2 * pi * (x + y)) + 0.3 * std::cos(4 * pi * x); };
  Vector a(g.size()), b(g.size());
  for (Index k = 0; k < g.size(); ++k) {
    a(k) = u1(g.coordinates(0)(k), g.coordinates(1)(k));
    b(k) = u2(g.coordinates(0)(k), g.coordinates(1)(k));
  }
  const auto w = vorticity(velocity_field(g, {a, b}), g);
  const double h = 1.0 / double(nf);
  const double c[] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  double worst = 0.0;
  for (Index k = 0; k < g.size(); ++k) {
    const double x = g.coordinates(0)(k), y = g.coordinates(1)(k);
    double d2x = 0.0, d1y = 0.0;
    for (int s = 1; s <= 4; ++s) {
      d2x += c[s - 1] * (u2(x + s * h, y) - u2(x - s * h, y));
      d1y += c[s - 1] * (u1(x, y + s * h) - u1(x, y - s * h));
    }
    worst = std::max(worst, std::abs((d2x - d1y) / h - w[0].values[std::size_t(k)]));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("vorticity in 3d has three components") {
  const ProductGrid g({make_axis(0, 1, 8), make_axis(0, 1, 8), make_axis(0, 1, 8)});
  // u = (0, 0, sin(2 pi x1)) -> omega = (0, -2 pi cos(2 pi x1), 0)
  const Vector u3 = (2 * pi * g.coordinates(0).array()).sin();
  const auto w = vorticity(velocity_field(g, {Vector::Zero(512), Vector::Zero(512), u3}), g);
  REQUIRE(w.size() == 3);
  for (Index k = 0; k < 512; ++k) {
    CHECK(std::abs(w[0].values[std::size_t(k)]) <= 1e-12);
    CHECK(std::abs(w[1].values[std::size_t(k)] + 2 * pi * std::cos(2 * pi * g.coordinates(0)(k))) <= 1e-10);
    CHECK(std::abs(w[2].values[std::size_t(k)]) <= 1e-12);
  }
}

TEST_CASE("l2_error") {
  const BgkModel m = model_1d(32, 32);
  const State s = random_state(32, 32, 3, 4);
  const Matrix f = evaluate(s);
  CHECK(l2_error(m, s, f) <= 1e-13);

  const double h = 12.0 / 32.0;
  CHECK(l2_error(m, s, Matrix::Zero(32, 32)) == doctest::Approx(h * f.norm()).epsilon(1e-13));

  Matrix ref = f;
  ref.array() += random_matrix(32, 32, 77).array();
  const double naive = std::sqrt(((f - ref).array().square() * h * h).sum());
  CHECK(std::abs(l2_error(m, s, ref, 5) - naive) <= 1e-12);
}

TEST_CASE("slice_or_marginal") {
  const ProductGrid g({make_axis(0, 1, 8), make_axis(0, 2, 6)});
  const Vector gx = (g.coordinates(0).array() + 1.0);
  const Vector hy = (g.coordinates(1).array() * 0.5).cos();
  const Vector prod = gx.cwiseProduct(hy);
  const FieldSnapshot f = make_snapshot("p", 0.0, g, prod);

  const auto same = slice_or_marginal(f, g, {AxisReduction::keep(), AxisReduction::keep()});
  CHECK(same.field.values == f.values);

  const auto marg = slice_or_marginal(f, g, {AxisReduction::keep(), AxisReduction::integrate()});
  REQUIRE(marg.field.shape == std::vector<Index>{8});
  const Vector h1 = (g.axis(1).points.array() * 0.5).cos();
  const double int_h = g.axis(1).weights.dot(h1);
  for (Index i = 0; i < 8; ++i)
    CHECK(marg.field.values[std::size_t(i)] == doctest::Approx((g.axis(0).points(i) + 1.0) * int_h));

  const Axis a = make_axis(0, 1, 100);
  CHECK(nearest_index(a, 0.49) == 49);
  CHECK(nearest_index(a, 0.999) == 0);

  const ProductGrid g2({make_axis(0, 1, 100), make_axis(0, 1, 2)});
  const FieldSnapshot f2 = make_snapshot("q", 0.0, g2, g2.coordinates(0));
  const auto sl = slice_or_marginal(f2, g2, {AxisReduction::slice(0.49), AxisReduction::keep()});
  CHECK(sl.slice_indices == std::vector<Index>{49});
  CHECK(sl.field.values[0] == doctest::Approx(0.49));
}
