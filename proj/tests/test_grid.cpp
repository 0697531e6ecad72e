#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bgklr/grid.hpp"

#include <cmath>
#include <numbers>

using namespace bgklr;
using std::numbers::pi;

TEST_CASE("make_axis partitions the interval") {
  const Axis a = make_axis(0.0, 1.0, 4);
  CHECK(a.points.size() == 4);
  for (Index k = 0; k < 4; ++k) {
    CHECK(a.points(k) == doctest::Approx(0.25 * double(k)));
    CHECK(a.weights(k) == 0.25);
  }
  CHECK(a.points(3) + a.spacing == doctest::Approx(1.0).epsilon(1e-15));

  const Axis b = make_axis(-6.0, 6.0, 32);
  CHECK(b.spacing == 0.375);
  CHECK(b.weights.sum() == doctest::Approx(12.0).epsilon(1e-15));
  for (Index k = 1; k < b.n; ++k) CHECK(b.points(k) - b.points(k - 1) == doctest::Approx(0.375));

  CHECK_THROWS_AS(make_axis(0.0, 1.0, 3), ConfigError);
  CHECK_THROWS_AS(make_axis(1.0, 1.0, 4), ConfigError);
}

TEST_CASE("wavenumbers follow FFT ordering with the Nyquist entry zeroed") {
  const Axis a = make_axis(0.0, 2.0, 8);
  const double s = 2.0 * pi / 2.0;
  const double expected[] = {0, 1, 2, 3, 0, -3, -2, -1};
  for (Index k = 0; k < 8; ++k) CHECK(a.wavenumbers(k) == doctest::Approx(expected[k] * s));
}

TEST_CASE("flat and multi indices are inverse, last axis fastest") {
  const ProductGrid g({make_axis(0, 1, 4), make_axis(0, 2, 6), make_axis(-1, 1, 2)});
  CHECK(g.size() == 48);
  CHECK(g.stride(2) == 1);
  CHECK(g.stride(1) == 2);
  CHECK(g.stride(0) == 12);
  for (Index k = 0; k < g.size(); ++k) {
    const auto m = g.multi_index(k);
    CHECK(g.flat_index(m) == k);
    double w = 1.0;
    for (Index a = 0; a < 3; ++a) {
      w *= g.axis(a).weights(m[std::size_t(a)]);
      CHECK(g.coordinates(a)(k) == g.axis(a).points(m[std::size_t(a)]));
    }
    CHECK(g.weight(k) == doctest::Approx(w).epsilon(1e-15));
  }
  CHECK(g.volume() == doctest::Approx(4.0));
}

TEST_CASE("spectral derivative of a single mode is exact") {
  const ProductGrid g({make_axis(0.0, 1.0, 16)});
  const Vector& x = g.coordinates(0);
  Matrix f(16, 2);
  f.col(0) = (2 * pi * x.array()).sin();
  f.col(1).setConstant(3.0);
  const Matrix d = spectral_derivative(g, f, 0);
  const Vector want = 2 * pi * (2 * pi * x.array()).cos();
  CHECK((d.col(0) - want).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(d.col(1).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("spectral derivative matches an eighth-order finite-difference oracle") {
  const Index nc = 64, nf = 4096;
  const ProductGrid g({make_axis(0.0, 1.0, nc)});
  const Vector f = (2 * pi * g.coordinates(0).array()).sin().exp();
  const Matrix d = spectral_derivative(g, f, 0);

  const double h = 1.0 / double(nf);
  auto F = [&](Index k) {
    const Index m = ((k % nf) + nf) % nf;
    return std::exp(std::sin(2 * pi * double(m) * h));
  };
  const double c[] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  double worst = 0.0;
  for (Index i = 0; i < nc; ++i) {
    const Index k = i * (nf / nc);
    double fd = 0.0;
    for (int s = 1; s <= 4; ++s) fd += c[s - 1] * (F(k + s) - F(k - s));
    fd /= h;
    worst = std::max(worst, std::abs(fd - d(i, 0)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("derivative along one axis of a 2d grid") {
  const ProductGrid g({make_axis(0.0, 1.0, 8), make_axis(0.0, 2.0, 10)});
  const Vector& x0 = g.coordinates(0);
  const Vector& x1 = g.coordinates(1);
  const Vector f = (2 * pi * x0.array()).sin() * (pi * x1.array()).cos();
  const Vector d1 = spectral_derivative(g, f, 1);
  const Vector want1 = -pi * (2 * pi * x0.array()).sin() * (pi * x1.array()).sin();
  CHECK((d1 - want1).cwiseAbs().maxCoeff() <= 1e-12);
  const Vector d0 = spectral_derivative(g, f, 0);
  const Vector want0 = 2 * pi * (2 * pi * x0.array()).cos() * (pi * x1.array()).cos();
  CHECK((d0 - want0).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(spectral_derivative(g, f, 2), DimensionError);
}

TEST_CASE("integrate") {
  const ProductGrid box({make_axis(0.0, 1.0, 8), make_axis(0.0, 1.0, 8)});
  CHECK(integrate(box, Vector::Ones(64)) == doctest::Approx(1.0).epsilon(1e-15));

  const ProductGrid v({make_axis(-6.0, 6.0, 32)});
  const Vector& c = v.coordinates(0);
  const Vector gauss = (-0.5 * c.array().square()).exp();

  // composite Simpson on 10^6 intervals
  const Index m = 1000000;
  const double h = 12.0 / double(m);
  double simpson = 0.0;
  for (Index k = 0; k <= m; ++k) {
    const double x = -6.0 + h * double(k);
    const double w = (k == 0 || k == m) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    simpson += w * std::exp(-0.5 * x * x);
  }
  simpson *= h / 3.0;
  CHECK(std::abs(integrate(v, gauss) - simpson) <= 1e-8);
  CHECK(std::abs(integrate(v, gauss) - std::sqrt(2 * pi)) <= 1e-8);

  // symmetric grid: drop the unpaired point at -6
  const ProductGrid sym({make_axis(-6.0, 6.0, 32)});
  Vector odd = c.array() * gauss.array();
  odd(0) = 0.0;
  CHECK(std::abs(integrate(sym, odd)) <= 1e-14);
}
