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

#include "qmstab/synthesis.hpp"
#include "test_support.hpp"

using namespace qmstab;
using qmstab::testing::diag;
using qmstab::testing::random_hermitian;
using qmstab::testing::random_matrix;

namespace {

const double kL = 1.0 / std::sqrt(2.0);

Matrix two_qubit_h() {
  Matrix h = Matrix::Zero(4, 4);
  h(0, 1) = Complex(0.0, -0.5);
  h(1, 0) = Complex(0.0, 0.5);
  return h;
}

Matrix random_unitary(Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(n, rng));
  return qr.householderQ();
}

}  // namespace

TEST_CASE("canonical_eigenbasis") {
  const auto b = canonical_eigenbasis(HermitianOperator(diag({2.0, 0.0, 0.0, -2.0})));
  CHECK(b.values(0) == doctest::Approx(2.0));
  CHECK(b.values(3) == doctest::Approx(-2.0));
  CHECK(b.level_of == std::vector<Index>{0, 1, 1, 2});
  CHECK(b.permutation == std::vector<Index>{0, 1, 2, 3});
  CHECK(max_abs(b.vectors - identity(4)) <= 1e-12);

  const auto p = canonical_eigenbasis(HermitianOperator(diag({0.0, 3.0, 1.0})));
  CHECK(p.permutation == std::vector<Index>{1, 2, 0});

  std::mt19937_64 rng(61);
  for (int i = 0; i < 30; ++i) {
    const Matrix a = random_hermitian(4, rng);
    const auto c = canonical_eigenbasis(HermitianOperator(a));
    CHECK(max_abs(c.vectors.adjoint() * c.vectors - identity(4)) <= 1e-12);
    CHECK(max_abs(c.vectors.adjoint() * a * c.vectors - Matrix(c.values.cast<Complex>().asDiagonal())) <= 1e-10);
    for (Index k = 1; k < 4; ++k) CHECK(c.values(k) <= c.values(k - 1));
  }
}

TEST_CASE("two-qubit engineering without a Hamiltonian") {
  SynthesisSpec s{HermitianOperator(diag({2.0, 0.0, 0.0, -2.0}))};
  s.default_l = kL;
  const auto r = synthesize_coupling(s);
  REQUIRE(r.pairs.size() == 2);
  CHECK(r.pairs[0].pair.higher == 0);
  CHECK(r.pairs[0].pair.lower == 1);
  CHECK(r.pairs[1].pair.higher == 1);
  CHECK(r.pairs[1].pair.lower == 3);
  for (const auto& p : r.pairs) CHECK(p.kind == PairCase::b);
  REQUIRE(r.couplings.size() == 2);
  CHECK(max_abs(r.couplings[0] - kL * ket_bra(1, 0, 4)) <= 1e-15);
  CHECK(max_abs(r.couplings[1] - kL * ket_bra(3, 1, 4)) <= 1e-15);
  CHECK(max_abs(r.generator - diag({-1.0, -1.0, 0.0, 0.0})) <= 1e-12);
  CHECK(r.certificate_shift == doctest::Approx(2.0));
  CHECK(r.certified);
  CHECK_FALSE(r.partial);
  // |10> is left out of the default chain.
  bool noted = false;
  for (const auto& n : r.notes) noted = noted || n.find("not covered") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("uncompensated Hamiltonian reproduces the full -1 block") {
  SynthesisSpec s{HermitianOperator(diag({2.0, 0.0, 0.0, -2.0})), HermitianOperator(two_qubit_h())};
  s.default_l = kL;
  s.compensate_hamiltonian = false;
  const auto r = synthesize_coupling(s);
  Matrix printed = Matrix::Zero(4, 4);
  printed.topLeftCorner(2, 2).setConstant(-1.0);
  CHECK(max_abs(r.generator - printed) <= 1e-12);
  CHECK(r.pairs[0].kind == PairCase::b);
  CHECK(r.certified);
}

TEST_CASE("compensation cancels the Hamiltonian cross term") {
  SynthesisSpec s{HermitianOperator(diag({2.0, 0.0, 0.0, -2.0})), HermitianOperator(two_qubit_h())};
  s.default_l = kL;
  const auto r = synthesize_coupling(s);
  CHECK(r.pairs[0].kind == PairCase::c);
  CHECK(r.pairs[1].kind == PairCase::b);  // H has no (|01>, |11>) element
  CHECK(max_abs(r.generator - diag({-1.0, -1.0, 0.0, 0.0})) <= 1e-12);
  // L00 = -2i conj(H_gh) / conj(l) with H_gh = <01|H|00> = i/2.
  const Complex l00 = -2.0 * Complex(0.0, 1.0) * std::conj(Complex(0.0, 0.5)) / kL;
  CHECK(std::abs(r.couplings[0](1, 1) - l00) <= 1e-14);
  CHECK(verify_synthesis(r, assembled_model(r)).verdict == Verdict::holds);

  // Flipping the sign of the transfer amplitude breaks the cancellation.
  std::vector<Matrix> tampered = r.couplings;
  tampered[0](1, 0) = -tampered[0](1, 0);
  const ModelSpec flipped(*r.hamiltonian, tampered);
  const auto ver = verify_synthesis(r, flipped);
  CHECK(ver.verdict == Verdict::fails);
  CHECK(ver.max_deviation == doctest::Approx(2.0));
}

TEST_CASE("degenerate pairs are case A") {
  SynthesisSpec s{HermitianOperator(diag({2.0, 0.0, 0.0, -2.0}))};
  s.pairs = {{1, 2, 1.0}};
  const auto r = synthesize_coupling(s);
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0].kind == PairCase::a);
  CHECK_FALSE(r.pairs[0].coupling.has_value());
  CHECK(r.couplings.empty());
  CHECK_FALSE(r.notes.empty());
  CHECK(assembled_model(r).couplings().size() == 1);
  CHECK(max_abs(r.generator) == 0.0);

  const auto flat = synthesize_coupling(SynthesisSpec{HermitianOperator(identity(3))});
  CHECK(flat.pairs.empty());
  CHECK_FALSE(flat.notes.empty());
  CHECK(to_string(PairCase::c) == "C");
}

TEST_CASE("synthesis input errors") {
  SynthesisSpec s{HermitianOperator(diag({1.0, 0.0}))};
  s.pairs = {{0, 1, 0.0}};
  CHECK_THROWS_AS(synthesize_coupling(s), ValidationError);
  s.pairs = {{1, 0, 1.0}};
  CHECK_THROWS_AS(synthesize_coupling(s), ValidationError);
  s.pairs = {{0, 2, 1.0}};
  CHECK_THROWS_AS(synthesize_coupling(s), ValidationError);
  SynthesisSpec bad{HermitianOperator(diag({1.0, 0.0})), HermitianOperator(identity(3))};
  CHECK_THROWS_AS(synthesize_coupling(bad), DimensionError);
}

TEST_CASE("pair blocks on random targets") {
  std::mt19937_64 rng(63);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 3 + trial % 3;
    // Distinct eigenvalues, random eigenvectors.
    std::vector<double> ev(static_cast<size_t>(n));
    double x = 0.0;
    for (auto& e : ev) e = (x += u(rng));
    Matrix d = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) d(i, i) = ev[static_cast<size_t>(i)];
    const Matrix q = random_unitary(n, rng);
    const Matrix v = q * d * q.adjoint();
    const Complex l(g(rng), g(rng));

    SynthesisSpec s{HermitianOperator(0.5 * (v + v.adjoint())), HermitianOperator(random_hermitian(n, rng))};
    s.default_l = l;
    const auto r = synthesize_coupling(s);
    REQUIRE(r.pairs.size() == static_cast<size_t>(n - 1));

    // Independent recomputation of G(V) from the emitted couplings.
    const ModelSpec m = assembled_model(r);
    const Matrix gv = generator_heisenberg(m, s.v.matrix());
    CHECK(max_abs(gv - r.generator) <= 1e-10);
    const Matrix ge = r.basis.vectors.adjoint() * gv * r.basis.vectors;
    for (const auto& p : r.pairs) {
      CHECK(p.kind == PairCase::c);
      CHECK(std::abs(ge(p.pair.higher, p.pair.lower)) <= 1e-9);
      // Each vector is the higher end of at most one chain link.
      CHECK(std::abs(ge(p.pair.higher, p.pair.higher) + p.gap * std::norm(l)) <= 1e-9);
    }
    // Cross terms between unpaired vectors may survive; verification still reproduces the result.
    const auto ver = verify_synthesis(r, m);
    CHECK(ver.verdict == Verdict::holds);
    CHECK(ver.certificate->holds() == r.certified);
  }
}

TEST_CASE("verify_synthesis detects a different model") {
  SynthesisSpec s{HermitianOperator(diag({1.0, 0.0}))};
  const auto r = synthesize_coupling(s);
  const auto ok = verify_synthesis(r, assembled_model(r));
  CHECK(ok.verdict == Verdict::holds);
  CHECK(ok.max_deviation <= 1e-15);

  const ModelSpec other(HermitianOperator(Matrix::Zero(2, 2)), {sigma_plus()});
  const auto bad = verify_synthesis(r, other);
  CHECK(bad.verdict == Verdict::fails);
  CHECK_FALSE(bad.first_mismatch.empty());
  CHECK(bad.max_deviation == doctest::Approx(1.0));  // G(V) = diag(0, 1) against diag(-1, 0)
}

TEST_CASE("ground coupling for a qubit") {
  const HermitianOperator v(diag({1.0, 0.0}));
  const auto g = solve_ground_coupling(v);
  REQUIRE(g.supported);
  CHECK(max_abs(g.m - ket_bra(1, 0, 2)) <= 1e-15);
  CHECK(max_abs(commutator(g.default_l, v.matrix()) - g.m) <= 1e-15);
  CHECK(max_abs(g.m.adjoint() * g.m - v.matrix()) <= 1e-15);
  CHECK(max_abs(g.generator - diag({-1.0, 0.0})) <= 1e-15);
  REQUIRE(g.lyapunov.has_value());
  CHECK(g.lyapunov->holds());
  REQUIRE(g.ground_set.has_value());
  CHECK(g.ground_set->verdict == Verdict::holds);
}

TEST_CASE("ground coupling solves M = [L, V] on random targets") {
  std::mt19937_64 rng(65);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 4 + trial % 3;
    const Index rank = 1 + trial % (n / 2);
    Matrix d = Matrix::Zero(n, n);
    for (Index i = 0; i < rank; ++i) d(i, i) = u(rng);
    const Matrix q = random_unitary(n, rng);
    Matrix v = q * d * q.adjoint();
    v = 0.5 * (v + v.adjoint());
    const auto g = solve_ground_coupling(HermitianOperator(v));
    REQUIRE(g.supported);
    CHECK(g.factorization_residual <= 1e-10);
    CHECK(g.equation_residual <= 1e-10);
    CHECK(max_abs(commutator(g.default_l, v) - g.m) <= 1e-10);
    for (const auto& f : g.free_directions) CHECK(max_abs(commutator(f, v)) <= 1e-10);
    // [L + F, V] = M as well.
    if (!g.free_directions.empty()) {
      const Matrix shifted = g.default_l + 0.7 * g.free_directions.front();
      CHECK(max_abs(commutator(shifted, v) - g.m) <= 1e-10);
    }
    REQUIRE(g.lyapunov.has_value());
    CHECK(g.lyapunov->holds());
  }
}

TEST_CASE("ground coupling limits") {
  const auto big = solve_ground_coupling(HermitianOperator(diag({1.0, 1.0, 0.0})));
  CHECK_FALSE(big.supported);
  CHECK_FALSE(big.explanation.empty());
  CHECK_THROWS_AS(solve_ground_coupling(HermitianOperator(diag({1.0, -1.0}))), ValidationError);
  const auto zero = solve_ground_coupling(HermitianOperator(Matrix::Zero(2, 2)));
  CHECK(zero.supported);
  CHECK(max_abs(zero.m) == 0.0);
}
