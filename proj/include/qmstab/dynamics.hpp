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

// Master-equation integration and finite-horizon surrogates for the
// asymptotic statements: monotone Lyapunov means, integrability and decay of
// <W>, the exponential mean bound, convergence to zero-solution sets.
//
// Time is dimensionless, in units of the model's rate constants.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmstab/generator.hpp"
#include "qmstab/lyapunov.hpp"
#include "qmstab/operator_core.hpp"

namespace qmstab {

enum class Method { automatic, expm_fixed, rk_adaptive };

std::string to_string(Method m);

struct EvolveOptions {
  Method method = Method::automatic;
  Index samples = 200;           // output grid: t_k = k * t_final / samples
  double rtol = 1e-10;
  double atol = 1e-12;
  double trace_tol = 1e-12;      // renormalize when |tr - 1| exceeds this
  double positivity_tol = 1e-8;  // abort when min eig(rho) < -positivity_tol
  Index expm_dim_limit = 30;     // automatic picks expm_fixed up to this dimension
  double min_step = 1e-12;
};

struct StepController {
  Method method = Method::expm_fixed;
  Index accepted = 0;
  Index rejected = 0;
  Index renormalizations = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  StepController steps;
};

/// Integrates d rho/dt = G_*(rho) from t = 0 to t_final.
///
/// expm_fixed exponentiates the Liouvillian once for the sample interval and
/// applies it repeatedly. rk_adaptive is Dormand-Prince 5(4) on the matrix
/// form of the generator (never builds the Liouvillian), stepping exactly
/// onto each sample time. Throws NumericalError on step underflow or when a
/// state leaves the density-matrix set beyond positivity_tol.
Trajectory evolve(const ModelSpec& model, const DensityMatrix& rho0, double t_final, const EvolveOptions& opts = {});

/// tr(rho_t X) at every sample; the imaginary residue is asserted below 1e-12.
std::vector<double> expectation_series(const Trajectory& traj, const HermitianOperator& x);

struct BoundCheck {
  Verdict verdict = Verdict::holds;
  double max_violation = 0.0;  // max of <V(t)> - bound(t), may be negative
  Index worst_index = 0;
};

/// <V(t)> <= exp(-c t) <V(0)> + d / c pointwise, with relative slack 1e-6.
BoundCheck mean_bound_check(const Trajectory& traj, const HermitianOperator& v, double c, double d,
                            double rel_slack = 1e-6);

struct DiagnosticsOptions {
  double tail_fraction = 0.1;
  double monotone_slack = 1e-8;
  double w_threshold = 1e-4;  // final <W> must fall below this for `holds`
  Index min_samples = 10;
};

struct LaSalleDiagnostics {
  std::vector<double> v_series;
  std::vector<double> w_series;
  bool v_monotone = true;
  double v_max_violation = 0.0;
  double w_integral_estimate = 0.0;  // trapezoid + fitted exponential tail
  double w_tail_integral = 0.0;      // the extrapolated part alone; +inf if not decaying
  double w_limit_estimate = 0.0;     // mean over the tail window
  double v_sup = 0.0;
  double w_sup = 0.0;
  double final_v = 0.0;
  double final_w = 0.0;  // distance of the final state from the zero solutions of W
  std::optional<BoundCheck> bound_check;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> notes;
};

LaSalleDiagnostics lasalle_diagnostics(const Trajectory& traj, const HermitianOperator& v, const HermitianOperator& w,
                                       std::optional<double> c = std::nullopt, std::optional<double> d = std::nullopt,
                                       const DiagnosticsOptions& opts = {});

struct ProbeOptions {
  Index samples = 20;
  double t_final = 30.0;
  double threshold = 1e-5;
  std::uint64_t seed = 2024;
  EvolveOptions evolve;
};

struct ProbeReport {
  std::vector<double> final_v;
  std::vector<Matrix> final_states;
  double max_final_v = 0.0;
  Index in_zero_set = 0;  // samples whose final <V> is below threshold
  bool passes = false;
  std::optional<Verdict> ground_set_hypotheses;  // check_theorem8 verdict when V >= 0
  std::vector<std::string> notes;
};

/// Integrates from `samples` seeded random states and reports the final <V>.
ProbeReport invariant_set_probe(const ModelSpec& model, const HermitianOperator& v, const ProbeOptions& opts = {});

/// P rho P / tr(P rho P): post-selection on a projective measurement outcome.
DensityMatrix condition_on(const DensityMatrix& rho, const Matrix& p);

}  // namespace qmstab
