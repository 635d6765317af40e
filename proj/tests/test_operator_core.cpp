// Copyright 2026 The qmstab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "qmstab/operator_core.hpp"
#include "test_support.hpp"

using namespace qmstab;
using qmstab::testing::diag;
using qmstab::testing::random_hermitian;

TEST_CASE("builders follow the basis convention") {
  CHECK(max_abs(pauli(PauliAxis::z) - diag({1.0, -1.0})) == 0.0);
  Matrix sx(2, 2);
  sx << 0, 1, 1, 0;
  CHECK(max_abs(pauli(PauliAxis::x) - sx) == 0.0);
  Matrix sy(2, 2);
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  CHECK(max_abs(pauli(PauliAxis::y) - sy) == 0.0);

  // sigma_- maps the first basis vector onto the second.
  Vector e0(2);
  e0 << 1, 0;
  Vector e1(2);
  e1 << 0, 1;
  CHECK((sigma_minus() * e0 - e1).norm() == 0.0);
  CHECK(max_abs(sigma_plus() * sigma_minus() - diag({1.0, 0.0})) == 0.0);
  CHECK(max_abs(sigma_plus() * sigma_minus() - 0.5 * (identity(2) + pauli(PauliAxis::z))) == 0.0);
  CHECK(max_abs(number_operator(3) - diag({0.0, 1.0, 2.0})) == 0.0);

  const Matrix a = ladder_lowering(5);
  for (Index n = 1; n < 5; ++n) CHECK(a(n - 1, n) == Complex(std::sqrt(static_cast<double>(n)), 0.0));
  CHECK(max_abs(a.adjoint() * a - number_operator(5)) < 1e-14);

  CHECK(ket_bra(2, 0, 3)(2, 0) == Complex(1.0, 0.0));
  CHECK_THROWS_AS(ket_bra(3, 0, 3), ValidationError);
  CHECK_THROWS_AS(ladder_lowering(1), ValidationError);
  CHECK_THROWS_AS(number_operator(0), ValidationError);
}

TEST_CASE("kron matches the index formula") {
  std::mt19937_64 rng(3);
  const Matrix a = qmstab::testing::random_matrix(2, rng);
  const Matrix b = qmstab::testing::random_matrix(3, rng);
  const Matrix k = kron(a, b);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j)
      for (Index p = 0; p < 3; ++p)
        for (Index q = 0; q < 3; ++q) CHECK(std::abs(k(3 * i + p, 3 * j + q) - a(i, j) * b(p, q)) < 1e-15);
}

TEST_CASE("HermitianOperator rejects rather than symmetrizes") {
  Matrix m = diag({1.0, 2.0});
  m(0, 1) = 1e-3;
  CHECK_THROWS_AS(HermitianOperator{m}, ValidationError);
  m(0, 1) = 1e-12;  // within 1e-10 * max(1, ||A||)
  CHECK_NOTHROW(HermitianOperator{m});
  CHECK_THROWS_AS(HermitianOperator{Matrix::Zero(2, 3)}, DimensionError);
  Matrix bad = diag({1.0, 0.0});
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(HermitianOperator{bad}, ValidationError);
}

TEST_CASE("DensityMatrix validates trace and positivity") {
  CHECK_NOTHROW(DensityMatrix(diag({0.5, 0.5})));
  CHECK_THROWS_AS(DensityMatrix(diag({0.5, 0.6})), ValidationError);
  CHECK_THROWS_AS(DensityMatrix(diag({1.5, -0.5})), ValidationError);
  CHECK(max_abs(DensityMatrix::maximally_mixed(4).matrix() - 0.25 * identity(4)) == 0.0);
  CHECK(DensityMatrix::basis_state(1, 3).matrix()(1, 1) == Complex(1.0, 0.0));
}

TEST_CASE("spectral_decompose examples") {
  SUBCASE("identity has a single level") {
    const auto s = spectral_decompose(HermitianOperator(identity(3)));
    REQUIRE(s.levels() == 1);
    CHECK(s.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(max_abs(s.projections[0] - identity(3)) < 1e-14);
    CHECK(s.multiplicities[0] == 3);
  }
  SUBCASE("diag(1, 0)") {
    const auto s = spectral_decompose(HermitianOperator(diag({1.0, 0.0})));
    REQUIRE(s.levels() == 2);
    CHECK(s.eigenvalues(0) == doctest::Approx(0.0));
    CHECK(s.eigenvalues(1) == doctest::Approx(1.0));
    CHECK(max_abs(s.projections[0] - diag({0.0, 1.0})) < 1e-14);
    CHECK(max_abs(s.projections[1] - diag({1.0, 0.0})) < 1e-14);
  }
  SUBCASE("truncated number operator") {
    const Index n = 6;
    const auto s = spectral_decompose(HermitianOperator(number_operator(n)));
    REQUIRE(s.levels() == n);
    for (Index i = 0; i < n; ++i) {
      CHECK(s.eigenvalues(i) == doctest::Approx(static_cast<double>(i)));
      CHECK(max_abs(s.projections[static_cast<size_t>(i)] - ket_bra(i, i, n)) < 1e-14);
    }
  }
  SUBCASE("near-degenerate levels merge") {
    const auto s = spectral_decompose(HermitianOperator(diag({0.0, 1e-12, 2.0})));
    REQUIRE(s.levels() == 2);
    CHECK(s.multiplicities[0] == 2);
  }
}

TEST_CASE("spectral decomposition properties on random Hermitian matrices") {
  std::mt19937_64 rng(17);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 2 + trial % 7;
    const Matrix a = random_hermitian(n, rng);
    const auto s = spectral_decompose(HermitianOperator(a));
    CHECK(max_abs(s.reconstruct() - a) <= 10.0 * static_cast<double>(n) * eps * std::max(1.0, a.norm()));
    Matrix sum = Matrix::Zero(n, n);
    for (size_t i = 0; i < s.projections.size(); ++i) {
      const Matrix& p = s.projections[i];
      sum += p;
      CHECK(max_abs(p * p - p) < 1e-12);
      for (size_t j = i + 1; j < s.projections.size(); ++j) CHECK(max_abs(p * s.projections[j]) < 1e-12);
    }
    CHECK(max_abs(sum - identity(n)) < 1e-12);
    for (Index i = 1; i < s.levels(); ++i) CHECK(s.eigenvalues(i) > s.eigenvalues(i - 1));
  }
}

TEST_CASE("psd_check examples and shift closure") {
  CHECK(psd_check(HermitianOperator(Matrix::Zero(3, 3))).holds());
  const auto r = psd_check(HermitianOperator(diag({-1.0, 0.0})));
  CHECK(r.verdict == Verdict::fails);
  CHECK(r.min_eigenvalue == doctest::Approx(-1.0));
  REQUIRE(r.witness.has_value());
  CHECK(std::abs((*r.witness)(0)) == doctest::Approx(1.0));

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 2 + trial % 5;
    const Matrix a = random_hermitian(n, rng, 3.0);
    const double lmin = hermitian_eigen(a).values(0);
    CHECK(psd_check(HermitianOperator(a + (std::abs(lmin) + 1.0) * identity(n))).holds());
  }
}

TEST_CASE("psd_check tolerance is relative to the spectral norm") {
  // min eig -1e-7 against ||A|| = 1000: threshold 1e-6, so it holds.
  CHECK(psd_check(HermitianOperator(diag({1000.0, -1e-7}))).holds());
  CHECK(psd_check(HermitianOperator(diag({1.0, -1e-7}))).verdict == Verdict::fails);
}

TEST_CASE("random_density yields valid states deterministically") {
  std::mt19937_64 a(9), b(9);
  for (int i = 0; i < 20; ++i) {
    const Matrix r1 = random_density(4, a);
    const Matrix r2 = random_density(4, b);
    CHECK(max_abs(r1 - r2) == 0.0);
    CHECK_NOTHROW(DensityMatrix{r1});
  }
}

TEST_CASE("trace distance") {
  CHECK(trace_distance(diag({1.0, 0.0}), diag({0.0, 1.0})) == doctest::Approx(1.0));
  CHECK(trace_distance(diag({0.5, 0.5}), diag({0.5, 0.5})) == doctest::Approx(0.0));
}
