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

#include "qmstab/generator.hpp"
#include "test_support.hpp"

using namespace qmstab;
using qmstab::testing::diag;
using qmstab::testing::random_hermitian;
using qmstab::testing::random_matrix;
using qmstab::testing::random_model;

namespace {

ModelSpec qubit_decay() { return ModelSpec(HermitianOperator(Matrix::Zero(2, 2)), {sigma_minus()}); }

ModelSpec two_level() { return ModelSpec(HermitianOperator(pauli(PauliAxis::z)), {pauli(PauliAxis::x)}); }

// Independent oracle: entrywise sum_k [X, L]^dag [X, L].
Matrix commutator_oracle(const ModelSpec& m, const Matrix& x) {
  const Index n = x.rows();
  Matrix out = Matrix::Zero(n, n);
  for (const auto& l : m.couplings()) {
    Matrix c = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k) c(i, j) += x(i, k) * l(k, j) - l(i, k) * x(k, j);
    out += c.adjoint() * c;
  }
  return out;
}

}  // namespace

TEST_CASE("dissipator examples") {
  std::mt19937_64 rng(1);
  const ModelSpec m = random_model(rng);
  CHECK(max_abs(dissipator(m, identity(m.dim()))) < 1e-12);

  const Matrix p = sigma_plus() * sigma_minus();
  CHECK(max_abs(dissipator(qubit_decay(), p) + p) < 1e-15);
  Matrix expected(2, 2);
  expected << -1, 0, 0, 0;
  CHECK(max_abs(dissipator(qubit_decay(), diag({1.0, 0.0})) - expected) < 1e-15);
}

TEST_CASE("generator_heisenberg examples") {
  SUBCASE("unitality on random models") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
      const ModelSpec m = random_model(rng);
      CHECK(max_abs(generator_heisenberg(m, identity(m.dim()))) < 1e-12);
    }
  }
  SUBCASE("oscillator energy identity on the interior block") {
    const Index n = 40;
    const Matrix a = ladder_lowering(n);
    const double alpha = 1.0, beta = 0.5;
    const ModelSpec m(HermitianOperator(number_operator(n)), {alpha * a, beta * a.adjoint()});
    const Matrix v = number_operator(n);
    const Matrix g = generator_heisenberg(m, v);
    const Matrix expected = -(alpha * alpha - beta * beta) * v + beta * beta * identity(n);
    CHECK(max_abs((g - expected).topLeftCorner(n - 2, n - 2)) <= 1e-10);
    // The top level is corrupted by the truncation.
    CHECK(max_abs(g - expected) > 1e-3);
  }
  SUBCASE("two-qubit engineered couplings") {
    const double l = 1.0 / std::sqrt(2.0);
    const std::vector<Matrix> ls = {l * ket_bra(1, 0, 4), l * ket_bra(3, 1, 4)};
    const Matrix v = diag({2.0, 0.0, 0.0, -2.0});
    const ModelSpec bare(HermitianOperator(Matrix::Zero(4, 4)), ls);
    CHECK(max_abs(generator_heisenberg(bare, v) - diag({-1.0, -1.0, 0.0, 0.0})) <= 1e-12);

    Matrix h = Matrix::Zero(4, 4);
    h(0, 1) = Complex(0.0, -0.5);
    h(1, 0) = Complex(0.0, 0.5);
    const ModelSpec driven(HermitianOperator(h), ls);
    Matrix printed = Matrix::Zero(4, 4);
    printed.topLeftCorner(2, 2).setConstant(-1.0);
    CHECK(max_abs(generator_heisenberg(driven, v) - printed) <= 1e-12);
  }
  SUBCASE("Hermitian in, Hermitian out; linearity") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    for (int i = 0; i < 50; ++i) {
      const ModelSpec m = random_model(rng);
      const Index n = m.dim();
      const Matrix x = random_hermitian(n, rng);
      const Matrix gx = generator_heisenberg(m, x);
      CHECK(max_abs(gx - gx.adjoint()) < 1e-12);
      const Matrix y = random_matrix(n, rng);
      const Complex a(g(rng), g(rng)), b(g(rng), g(rng));
      const Matrix lhs = generator_heisenberg(m, a * x + b * y);
      const Matrix rhs = a * gx + b * generator_heisenberg(m, y);
      CHECK(max_abs(lhs - rhs) <= 1e-10);
    }
  }
}

TEST_CASE("generator_schroedinger examples and trace preservation") {
  CHECK(max_abs(generator_schroedinger(two_level(), DensityMatrix::maximally_mixed(2))) < 1e-15);
  CHECK(max_abs(generator_schroedinger(qubit_decay(), DensityMatrix::basis_state(1, 2))) < 1e-15);

  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    const ModelSpec m = random_model(rng);
    const Matrix rho = random_density(m.dim(), rng);
    CHECK(std::abs(generator_schroedinger(m, rho).trace()) <= 1e-12);
  }
}

TEST_CASE("duality tr(G(X) rho) = tr(X G_*(rho))") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const ModelSpec m = random_model(rng);
    const Matrix x = random_matrix(m.dim(), rng);
    const Matrix rho = random_density(m.dim(), rng);
    const Complex lhs = (generator_heisenberg(m, x) * rho).trace();
    const Complex rhs = (x * generator_schroedinger(m, rho)).trace();
    CHECK(std::abs(lhs - rhs) <= 1e-10);
  }
}

TEST_CASE("dissipation functional") {
  CHECK(max_abs(dissipation_functional(two_level(), identity(2))) < 1e-14);
  CHECK(max_abs(dissipation_functional(two_level(), diag({0.0, 1.0})) - identity(2)) < 1e-14);

  std::mt19937_64 rng(10);
  for (int i = 0; i < 100; ++i) {
    const ModelSpec m = random_model(rng);
    const Matrix x = random_matrix(m.dim(), rng);
    const Matrix d = dissipation_functional(m, x);
    CHECK(max_abs(d - commutator_oracle(m, x)) <= 1e-10);
    CHECK(max_abs(dissipation_commutator_form(m, x) - commutator_oracle(m, x)) <= 1e-10);
    CHECK(psd_check_matrix(d, 1e-10).holds());
  }
}

TEST_CASE("P G(P) P = -P D(P) P = -sum P L^dag (I-P) L P for projections") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    const ModelSpec m = random_model(rng);
    const Index n = m.dim();
    const Index r = 1 + i % (n - 1);
    Eigen::HouseholderQR<Matrix> qr(random_matrix(n, rng));
    const Matrix q = Matrix(qr.householderQ()).leftCols(r);
    const Matrix p = q * q.adjoint();
    const Matrix lhs = p * generator_heisenberg(m, p) * p;
    const Matrix mid = -p * dissipation_functional(m, p) * p;
    Matrix rhs = Matrix::Zero(n, n);
    for (const auto& l : m.couplings()) rhs -= p * l.adjoint() * (identity(n) - p) * l * p;
    CHECK(max_abs(lhs - mid) <= 1e-10);
    CHECK(max_abs(lhs - rhs) <= 1e-10);
  }
}

TEST_CASE("heisenberg_diffusion") {
  const auto zero = heisenberg_diffusion(two_level(), identity(2));
  REQUIRE(zero.size() == 1);
  CHECK(max_abs(zero[0].b) == 0.0);
  CHECK(max_abs(zero[0].c) == 0.0);

  const auto bc = heisenberg_diffusion(qubit_decay(), sigma_plus() * sigma_minus());
  Matrix b(2, 2), c(2, 2);
  b << 0, -0.5, -0.5, 0;
  c << 0, Complex(0, -0.5), Complex(0, 0.5), 0;
  CHECK(max_abs(bc[0].b - b) < 1e-15);
  CHECK(max_abs(bc[0].c - c) < 1e-15);

  // X commuting with L and L^dag.
  const ModelSpec dephasing(HermitianOperator(Matrix::Zero(2, 2)), {pauli(PauliAxis::z)});
  const auto dz = heisenberg_diffusion(dephasing, diag({3.0, -1.0}));
  CHECK(max_abs(dz[0].b) == 0.0);
  CHECK(max_abs(dz[0].c) == 0.0);

  std::mt19937_64 rng(14);
  for (int i = 0; i < 20; ++i) {
    const ModelSpec m = random_model(rng);
    for (const auto& d : heisenberg_diffusion(m, random_hermitian(m.dim(), rng))) {
      CHECK(max_abs(d.b - d.b.adjoint()) < 1e-12);
      CHECK(max_abs(d.c - d.c.adjoint()) < 1e-12);
    }
  }
}

TEST_CASE("column-stacking vectorization") {
  std::mt19937_64 rng(16);
  const Matrix x = random_matrix(3, rng);
  const Vector v = vec(x);
  for (Index j = 0; j < 3; ++j)
    for (Index i = 0; i < 3; ++i) CHECK(v(i + 3 * j) == x(i, j));
  CHECK(max_abs(unvec(v, 3) - x) == 0.0);
  const Matrix a = random_matrix(3, rng), b = random_matrix(3, rng);
  CHECK((vec(a * x * b) - kron(b.transpose(), a) * v).norm() < 1e-12);
}

TEST_CASE("liouvillian consistency") {
  std::mt19937_64 rng(18);
  for (int i = 0; i < 50; ++i) {
    const ModelSpec m = random_model(rng);
    const Index n = m.dim();
    const auto lh = liouvillian(m, Side::heisenberg);
    const auto ls = liouvillian(m, Side::schroedinger);
    const Matrix x = random_matrix(n, rng);
    CHECK(max_abs(lh.apply(x) - generator_heisenberg(m, x)) <= 1e-10);
    CHECK(max_abs(ls.apply(x) - generator_schroedinger(m, x)) <= 1e-10);
    CHECK((lh.matrix * vec(identity(n))).norm() <= 1e-12);
    CHECK((vec(identity(n)).adjoint() * ls.matrix).norm() <= 1e-12);
  }
  const auto l2 = liouvillian(two_level(), Side::schroedinger);
  CHECK((l2.matrix * vec(0.5 * identity(2))).norm() < 1e-15);
  CHECK_THROWS_AS(liouvillian(two_level(), Side::heisenberg, 1), DimensionError);
}

TEST_CASE("ModelSpec validation") {
  CHECK_THROWS_AS(ModelSpec(HermitianOperator(identity(2)), {}), ValidationError);
  CHECK_THROWS_AS(ModelSpec(HermitianOperator(identity(2)), {identity(3)}), DimensionError);
  CHECK_THROWS_AS(ModelSpec(HermitianOperator(identity(2)), {identity(2)}, {"a"}), DimensionError);
  CHECK_THROWS_AS(generator_heisenberg(two_level(), identity(3)), DimensionError);
}
