#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bgklr/sampling.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace bgklr;

TEST_CASE("deim on unit vectors") {
  Matrix M = Matrix::Zero(10, 2);
  M(3, 0) = 1.0;
  M(7, 1) = 1.0;
  const IndexSet idx = deim(M);
  CHECK(idx.indices == std::vector<Index>{3, 7});
  CHECK(idx.side == GridSide::x);
}

TEST_CASE("deim single column picks the largest magnitude") {
  Matrix M(3, 1);
  M << 0.1, -0.9, 0.3;
  CHECK(deim(M, GridSide::v).indices == std::vector<Index>{1});
}

TEST_CASE("deim ties go to the smallest index") {
  Matrix M(4, 1);
  M << 0.5, -1.0, 1.0, 0.2;
  CHECK(deim(M)[0] == 1);
}

TEST_CASE("deim agrees with the literal greedy oracle") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix M = oracle::random_orthonormal(40, 5, gen);
    CHECK(deim(M).indices == oracle::literal_deim(M));
  }
}

TEST_CASE("deim rejects bad input") {
  CHECK_THROWS_AS(deim(Matrix::Zero(3, 4)), DimensionError);
  Matrix dup(6, 2);
  dup.col(0) << 1, 2, 3, 4, 5, 6;
  dup.col(1) = 2.0 * dup.col(0);
  CHECK_THROWS_AS(deim(dup), NumericalError);
  CHECK_THROWS_AS(deim(Matrix::Identity(6, 2), GridSide::x, 3), ConfigError);
}

TEST_CASE("selection_condition") {
  const Matrix E = Matrix::Identity(6, 3);
  CHECK(selection_condition(E, IndexSet{{0, 1, 2}}) == doctest::Approx(1.0));
  CHECK(std::isinf(selection_condition(E, IndexSet{{0, 0, 1}})));
  CHECK_THROWS_AS(selection_condition(E, IndexSet{{0, 1}}), DimensionError);
}

TEST_CASE("deim conditioning beats random index draws") {
  std::mt19937_64 gen(77);
  const Matrix M = oracle::random_orthonormal(64, 8, gen);
  const double c = selection_condition(M, deim(M));
  CHECK(std::isfinite(c));

  std::vector<double> draws;
  std::vector<Index> all(64);
  for (Index i = 0; i < 64; ++i) all[std::size_t(i)] = i;
  for (int k = 0; k < 1000; ++k) {
    std::shuffle(all.begin(), all.end(), gen);
    draws.push_back(selection_condition(M, IndexSet{{all.begin(), all.begin() + 8}}));
  }
  std::nth_element(draws.begin(), draws.begin() + 500, draws.end());
  CHECK(c <= draws[500]);
}
