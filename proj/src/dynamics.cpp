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

#include "qmstab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace qmstab {
namespace {

DensityMatrix accept_state(Matrix rho, double t, double tol) {
  rho = 0.5 * (rho + rho.adjoint());
  try {
    return DensityMatrix(std::move(rho), tol);
  } catch (const ValidationError& e) {
    std::ostringstream os;
    os << "evolve: state left the density-matrix set at t = " << t << " (" << e.what() << ")";
    throw NumericalError(os.str());
  }
}

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

Trajectory evolve_rk(const ModelSpec& model, const DensityMatrix& rho0, double t_final, const EvolveOptions& opts) {
  Trajectory traj;
  traj.steps.method = Method::rk_adaptive;
  auto f = [&](const Matrix& r) { return generator_schroedinger(model, r); };

  Matrix y = rho0.matrix();
  double t = 0.0;
  traj.times.push_back(0.0);
  traj.states.push_back(rho0);

  const double rate = std::max(1.0, max_abs(model.h()) + max_abs(model.decay_sum()));
  double h = std::min(t_final / static_cast<double>(opts.samples), 0.1 / rate);
  Matrix k1 = f(y);
  for (Index s = 1; s <= opts.samples; ++s) {
    const double t_target = t_final * static_cast<double>(s) / static_cast<double>(opts.samples);
    while (t < t_target) {
      const bool last = t + h >= t_target;
      const double step = last ? t_target - t : h;
      const Matrix k2 = f(y + step * a21 * k1);
      const Matrix k3 = f(y + step * (a31 * k1 + a32 * k2));
      const Matrix k4 = f(y + step * (a41 * k1 + a42 * k2 + a43 * k3));
      const Matrix k5 = f(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Matrix k6 = f(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Matrix y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Matrix k7 = f(y_new);
      const Matrix err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err_norm = 0.0;
      for (Index j = 0; j < y.cols(); ++j)
        for (Index i = 0; i < y.rows(); ++i) {
          const double sc = opts.atol + opts.rtol * std::max(std::abs(y(i, j)), std::abs(y_new(i, j)));
          err_norm = std::max(err_norm, std::abs(err(i, j)) / sc);
        }

      if (err_norm <= 1.0) {
        t = last ? t_target : t + step;
        y = y_new;
        k1 = k7;
        ++traj.steps.accepted;
        const double tr = y.trace().real();
        if (std::abs(tr - 1.0) > opts.trace_tol) {
          y /= tr;
          k1 = f(y);
          ++traj.steps.renormalizations;
        }
        const double grow = err_norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err_norm, -0.2));
        if (!last) h = step * grow;
      } else {
        ++traj.steps.rejected;
        h = step * std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
        if (h < opts.min_step) {
          std::ostringstream os;
          os << "evolve: step size underflow at t = " << t;
          throw NumericalError(os.str());
        }
      }
    }
    traj.times.push_back(t_target);
    traj.states.push_back(accept_state(y, t_target, opts.positivity_tol));
  }
  return traj;
}

Trajectory evolve_expm(const ModelSpec& model, const DensityMatrix& rho0, double t_final, const EvolveOptions& opts) {
  Trajectory traj;
  traj.steps.method = Method::expm_fixed;
  const Index n = model.dim();
  const double dt = t_final / static_cast<double>(opts.samples);
  const Matrix prop = (liouvillian(model, Side::schroedinger).matrix * Complex(dt, 0.0)).exp();
  if (!prop.allFinite()) throw NumericalError("evolve: matrix exponential produced non-finite entries");

  Vector x = vec(rho0.matrix());
  traj.times.push_back(0.0);
  traj.states.push_back(rho0);
  for (Index s = 1; s <= opts.samples; ++s) {
    x = prop * x;
    ++traj.steps.accepted;
    Matrix rho = unvec(x, n);
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > opts.trace_tol) {
      rho /= tr;
      x = vec(rho);
      ++traj.steps.renormalizations;
    }
    const double t = t_final * static_cast<double>(s) / static_cast<double>(opts.samples);
    traj.times.push_back(t);
    traj.states.push_back(accept_state(rho, t, opts.positivity_tol));
  }
  return traj;
}

double expectation(const Matrix& rho, const Matrix& x) { return (rho * x).trace().real(); }

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::automatic:
      return "automatic";
    case Method::expm_fixed:
      return "expm_fixed";
    case Method::rk_adaptive:
      return "rk_adaptive";
  }
  return "automatic";
}

Trajectory evolve(const ModelSpec& model, const DensityMatrix& rho0, double t_final, const EvolveOptions& opts) {
  if (rho0.dim() != model.dim()) throw DimensionError("evolve: initial state dimension does not match the model");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ValidationError("evolve: t_final must be positive");
  if (opts.samples < 1) throw ValidationError("evolve: samples must be >= 1");
  Method m = opts.method;
  if (m == Method::automatic) m = model.dim() <= opts.expm_dim_limit ? Method::expm_fixed : Method::rk_adaptive;
  return m == Method::expm_fixed ? evolve_expm(model, rho0, t_final, opts) : evolve_rk(model, rho0, t_final, opts);
}

std::vector<double> expectation_series(const Trajectory& traj, const HermitianOperator& x) {
  std::vector<double> out;
  out.reserve(traj.states.size());
  const double scale = std::max(1.0, max_abs(x.matrix()));
  for (const auto& rho : traj.states) {
    if (rho.dim() != x.dim()) throw DimensionError("expectation_series: observable dimension mismatch");
    const Complex val = (rho.matrix() * x.matrix()).trace();
    if (std::abs(val.imag()) > 1e-12 * scale) {
      throw NumericalError("expectation_series: expectation has a non-negligible imaginary part");
    }
    out.push_back(val.real());
  }
  return out;
}

BoundCheck mean_bound_check(const Trajectory& traj, const HermitianOperator& v, double c, double d, double rel_slack) {
  if (!(c > 0.0) || !(d >= 0.0)) throw ValidationError("mean_bound_check: requires c > 0 and d >= 0");
  const auto series = expectation_series(traj, v);
  BoundCheck out;
  out.max_violation = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < series.size(); ++i) {
    const double bound = std::exp(-c * traj.times[i]) * series.front() + d / c;
    const double violation = series[i] - bound;
    if (violation > out.max_violation) {
      out.max_violation = violation;
      out.worst_index = static_cast<Index>(i);
    }
    if (violation > rel_slack * std::max(1.0, std::abs(bound))) out.verdict = Verdict::fails;
  }
  return out;
}

LaSalleDiagnostics lasalle_diagnostics(const Trajectory& traj, const HermitianOperator& v, const HermitianOperator& w,
                                       std::optional<double> c, std::optional<double> d,
                                       const DiagnosticsOptions& opts) {
  LaSalleDiagnostics out;
  out.v_series = expectation_series(traj, v);
  out.w_series = expectation_series(traj, w);
  const auto n = static_cast<Index>(traj.times.size());
  const Index tail = std::max<Index>(2, static_cast<Index>(std::ceil(opts.tail_fraction * static_cast<double>(n))));
  if (n < opts.min_samples || tail >= n) {
    out.verdict = Verdict::inconclusive;
    out.notes.push_back("trajectory too short for tail estimates");
    return out;
  }

  for (Index i = 1; i < n; ++i) {
    const double rise = out.v_series[i] - out.v_series[i - 1];
    out.v_max_violation = std::max(out.v_max_violation, rise);
    if (rise > opts.monotone_slack * std::max(1.0, std::abs(out.v_series[i - 1]))) out.v_monotone = false;
  }
  for (Index i = 0; i < n; ++i) {
    out.v_sup = std::max(out.v_sup, std::abs(out.v_series[i]));
    out.w_sup = std::max(out.w_sup, std::abs(out.w_series[i]));
  }
  for (Index i = 1; i < n; ++i) {
    out.w_integral_estimate +=
        0.5 * (traj.times[i] - traj.times[i - 1]) * (out.w_series[i] + out.w_series[i - 1]);
  }
  out.final_v = out.v_series.back();
  out.final_w = out.w_series.back();

  double tail_sum = 0.0;
  for (Index i = n - tail; i < n; ++i) tail_sum += out.w_series[i];
  out.w_limit_estimate = tail_sum / static_cast<double>(tail);

  // Exponential fit log <W> = a - r t on the tail window.
  bool decaying = false;
  const double tiny = 1e-14 * std::max(1.0, out.w_sup);
  if (std::abs(out.final_w) <= tiny) {
    out.w_tail_integral = 0.0;
    decaying = true;
  } else {
    bool positive = true;
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (Index i = n - tail; i < n; ++i) {
      if (out.w_series[i] <= tiny) {
        positive = false;
        break;
      }
      const double ti = traj.times[i];
      const double yi = std::log(out.w_series[i]);
      st += ti;
      sy += yi;
      stt += ti * ti;
      sty += ti * yi;
    }
    const double m = static_cast<double>(tail);
    const double denom = m * stt - st * st;
    if (positive && denom > 0.0) {
      const double slope = (m * sty - st * sy) / denom;
      if (slope < 0.0) {
        out.w_tail_integral = out.final_w / -slope;
        decaying = true;
      }
    }
    if (!decaying) {
      // Tail values straddling zero around a vanishing limit still bound the integral.
      if (std::abs(out.w_limit_estimate) <= opts.w_threshold && std::abs(out.final_w) <= opts.w_threshold) {
        out.w_tail_integral = 0.0;
        decaying = true;
        out.notes.push_back("tail not exponentially fitted; values already below threshold");
      } else {
        out.w_tail_integral = std::numeric_limits<double>::infinity();
      }
    }
  }
  out.w_integral_estimate += out.w_tail_integral;

  if (c && d) out.bound_check = mean_bound_check(traj, v, *c, *d);

  if (!out.v_monotone) {
    out.verdict = Verdict::fails;
    out.notes.push_back("<V> is not nonincreasing");
  } else if (decaying && std::abs(out.final_w) <= opts.w_threshold) {
    out.verdict = Verdict::holds;
  } else {
    out.verdict = Verdict::inconclusive;
    out.notes.push_back("<W> has not decayed within the horizon");
  }
  if (out.bound_check && out.bound_check->verdict == Verdict::fails) out.verdict = Verdict::fails;
  return out;
}

ProbeReport invariant_set_probe(const ModelSpec& model, const HermitianOperator& v, const ProbeOptions& opts) {
  if (v.dim() != model.dim()) throw DimensionError("invariant_set_probe: V dimension does not match the model");
  if (opts.samples < 1) throw ValidationError("invariant_set_probe: samples must be >= 1");
  ProbeReport rep;
  if (psd_check(v).holds()) {
    rep.ground_set_hypotheses = check_theorem8(model, v).verdict;
  } else {
    rep.notes.push_back("V is not positive semidefinite; ground-set hypotheses not evaluated");
  }

  std::mt19937_64 rng(opts.seed);
  for (Index s = 0; s < opts.samples; ++s) {
    const DensityMatrix rho0(random_density(model.dim(), rng));
    const auto traj = evolve(model, rho0, opts.t_final, opts.evolve);
    const Matrix& last = traj.states.back().matrix();
    const double fv = expectation(last, v.matrix());
    rep.final_v.push_back(fv);
    rep.final_states.push_back(last);
    if (fv <= opts.threshold) ++rep.in_zero_set;
  }
  rep.max_final_v = *std::max_element(rep.final_v.begin(), rep.final_v.end());
  rep.passes = rep.max_final_v <= opts.threshold;
  return rep;
}

DensityMatrix condition_on(const DensityMatrix& rho, const Matrix& p) {
  require_dim(p, rho.dim(), "condition_on");
  const Matrix post = p * rho.matrix() * p.adjoint();
  const double prob = post.trace().real();
  if (!(prob > 1e-14)) throw ValidationError("condition_on: measurement outcome has zero probability");
  return DensityMatrix(0.5 * (post + post.adjoint()) / prob);
}

}  // namespace qmstab
