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

#include "qmstab/dynamics.hpp"
#include "test_support.hpp"

using namespace qmstab;
using qmstab::testing::diag;
using qmstab::testing::random_model;

namespace {

ModelSpec two_level() { return ModelSpec(HermitianOperator(pauli(PauliAxis::z)), {pauli(PauliAxis::x)}); }
ModelSpec qubit_decay() { return ModelSpec(HermitianOperator(Matrix::Zero(2, 2)), {sigma_minus()}); }

ModelSpec oscillator(Index n) {
  const Matrix a = ladder_lowering(n);
  return ModelSpec(HermitianOperator(number_operator(n)), {1.0 * a, 0.5 * a.adjoint()});
}

EvolveOptions with_method(Method m, Index samples = 50) {
  EvolveOptions o;
  o.method = m;
  o.samples = samples;
  return o;
}

DensityMatrix plus_state() {
  Matrix p = Matrix::Constant(2, 2, Complex(0.5, 0.0));
  return DensityMatrix(p);
}

}  // namespace

TEST_CASE("qubit decay matches the closed form") {
  for (Method m : {Method::expm_fixed, Method::rk_adaptive}) {
    const auto traj = evolve(qubit_decay(), plus_state(), 5.0, with_method(m));
    REQUIRE(traj.times.size() == 51);
    CHECK(traj.steps.method == m);
    for (size_t k = 0; k < traj.times.size(); ++k) {
      const double t = traj.times[k];
      CHECK(t == doctest::Approx(5.0 * static_cast<double>(k) / 50.0).epsilon(1e-15));
      const Matrix& r = traj.states[k].matrix();
      CHECK(std::abs(r(0, 0).real() - 0.5 * std::exp(-t)) <= 1e-9);
      CHECK(std::abs(std::abs(r(0, 1)) - 0.5 * std::exp(-0.5 * t)) <= 1e-9);
    }
  }
}

TEST_CASE("two-level populations relax at rate 2") {
  const auto traj = evolve(two_level(), DensityMatrix::basis_state(0, 2), 3.0, with_method(Method::rk_adaptive));
  const auto p0 = expectation_series(traj, HermitianOperator(diag({1.0, 0.0})));
  for (size_t k = 0; k < p0.size(); ++k) CHECK(std::abs(p0[k] - (0.5 + 0.5 * std::exp(-2.0 * traj.times[k]))) <= 1e-9);
}

TEST_CASE("automatic picks the method by dimension") {
  EvolveOptions o;
  o.samples = 4;
  CHECK(evolve(qubit_decay(), plus_state(), 1.0, o).steps.method == Method::expm_fixed);
  o.expm_dim_limit = 1;
  CHECK(evolve(qubit_decay(), plus_state(), 1.0, o).steps.method == Method::rk_adaptive);
}

TEST_CASE("integrators agree and preserve the state space on random models") {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 20; ++i) {
    const ModelSpec m = random_model(rng, 4);
    const DensityMatrix rho0(random_density(m.dim(), rng));
    const auto a = evolve(m, rho0, 2.0, with_method(Method::expm_fixed, 10));
    const auto b = evolve(m, rho0, 2.0, with_method(Method::rk_adaptive, 10));
    for (size_t k = 0; k < a.states.size(); ++k) {
      CHECK(max_abs(a.states[k].matrix() - b.states[k].matrix()) <= 1e-8);
      CHECK(std::abs(b.states[k].matrix().trace() - Complex(1.0, 0.0)) <= 1e-11);
      CHECK(hermitian_eigen(b.states[k].matrix()).values(0) >= -1e-8);
    }
  }
}

TEST_CASE("oscillator energy follows the linear mean equation") {
  // d<N>/dt = -(alpha^2 - beta^2) <N> + beta^2 away from the cutoff.
  const Index n = 40;
  const auto traj = evolve(oscillator(n), DensityMatrix::basis_state(0, n), 8.0, with_method(Method::rk_adaptive, 40));
  const auto e = expectation_series(traj, HermitianOperator(number_operator(n)));
  for (size_t k = 0; k < e.size(); ++k)
    CHECK(std::abs(e[k] - (1.0 - std::exp(-0.75 * traj.times[k])) / 3.0) <= 1e-7);

  CHECK(mean_bound_check(traj, HermitianOperator(number_operator(n)), 0.75, 0.25).verdict == Verdict::holds);
  const auto fail = mean_bound_check(traj, HermitianOperator(number_operator(n)), 0.75, 0.1);
  CHECK(fail.verdict == Verdict::fails);
  CHECK(fail.max_violation > 0.0);
  CHECK_THROWS_AS(mean_bound_check(traj, HermitianOperator(number_operator(n)), 0.0, 0.1), ValidationError);
}

TEST_CASE("lasalle_diagnostics") {
  const HermitianOperator v(diag({1.0, 0.0}));
  EvolveOptions o = with_method(Method::expm_fixed, 400);
  const auto traj = evolve(qubit_decay(), DensityMatrix::basis_state(0, 2), 30.0, o);
  const auto d = lasalle_diagnostics(traj, v, v);
  CHECK(d.verdict == Verdict::holds);
  CHECK(d.v_monotone);
  CHECK(d.final_v <= 1e-12);
  // int_0^inf e^{-t} dt = 1; trapezoid bias is h^2 / 12 ~ 5e-4.
  CHECK(std::abs(d.w_integral_estimate - 1.0) <= 1e-3);
  CHECK(d.v_sup == doctest::Approx(1.0));

  // <W> = <|0><0|> tends to 1/2 for the two-level model.
  const auto t2 = evolve(two_level(), DensityMatrix::basis_state(0, 2), 10.0, o);
  const auto d2 = lasalle_diagnostics(t2, HermitianOperator(identity(2)), v);
  CHECK(d2.verdict != Verdict::holds);
  CHECK(d2.w_limit_estimate == doctest::Approx(0.5).epsilon(1e-6));

  // V increasing along the flow.
  const auto d3 = lasalle_diagnostics(t2, HermitianOperator(diag({0.0, 1.0})), HermitianOperator(Matrix::Zero(2, 2)));
  CHECK(d3.verdict == Verdict::fails);
  CHECK_FALSE(d3.v_monotone);

  const auto short_traj = evolve(qubit_decay(), plus_state(), 1.0, with_method(Method::expm_fixed, 3));
  CHECK(lasalle_diagnostics(short_traj, v, v).verdict == Verdict::inconclusive);
}

TEST_CASE("invariant_set_probe") {
  ProbeOptions po;
  po.samples = 5;
  const auto good = invariant_set_probe(qubit_decay(), HermitianOperator(diag({1.0, 0.0})), po);
  CHECK(good.passes);
  CHECK(good.in_zero_set == 5);
  CHECK(good.max_final_v <= 1e-5);
  REQUIRE(good.ground_set_hypotheses.has_value());
  CHECK(*good.ground_set_hypotheses == Verdict::holds);

  const auto bad = invariant_set_probe(two_level(), HermitianOperator(diag({1.0, 0.0})), po);
  CHECK_FALSE(bad.passes);
  CHECK(bad.max_final_v == doctest::Approx(0.5).epsilon(1e-6));

  // Same seed, same result.
  const auto again = invariant_set_probe(qubit_decay(), HermitianOperator(diag({1.0, 0.0})), po);
  CHECK(again.final_v == good.final_v);

  const auto neg = invariant_set_probe(qubit_decay(), HermitianOperator(diag({1.0, -1.0})), po);
  CHECK_FALSE(neg.ground_set_hypotheses.has_value());
  CHECK_FALSE(neg.notes.empty());
}

TEST_CASE("condition_on") {
  const auto c = condition_on(plus_state(), diag({1.0, 0.0}));
  CHECK(max_abs(c.matrix() - diag({1.0, 0.0})) <= 1e-15);
  CHECK_THROWS_AS(condition_on(DensityMatrix::basis_state(1, 2), diag({1.0, 0.0})), ValidationError);
}

TEST_CASE("evolve input errors") {
  CHECK_THROWS_AS(evolve(qubit_decay(), plus_state(), 0.0), ValidationError);
  CHECK_THROWS_AS(evolve(qubit_decay(), DensityMatrix::maximally_mixed(3), 1.0), DimensionError);
  EvolveOptions o = with_method(Method::rk_adaptive, 1);
  o.rtol = 1e-16;
  o.atol = 1e-300;
  o.min_step = 0.5;
  const Matrix a = ladder_lowering(6);
  const ModelSpec stiff(HermitianOperator(number_operator(6)), {10.0 * a});
  CHECK_THROWS_AS(evolve(stiff, DensityMatrix::basis_state(5, 6), 10.0, o), NumericalError);
  CHECK(to_string(Method::rk_adaptive) == "rk_adaptive");
}
