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

// Operator-inequality certificates: Lyapunov conditions (strict and weak),
// coercivity patterns, tightness tail bounds, LaSalle-type hypotheses, the
// ground-set convergence conditions, and a best-effort certificate search.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qmstab/generator.hpp"
#include "qmstab/operator_core.hpp"

namespace qmstab {

struct CheckOptions {
  double tol = kDefaultTol;
  // Restrict the generator inequality to the leading k x k block. Used for
  // truncated bosonic modes, where the top levels are corrupted by the cut.
  std::optional<Index> leading_block;
};

enum class CertificateMode { strict, weak, lasalle, relaxed, equality };

std::string to_string(CertificateMode m);

struct Witness {
  double eigenvalue = 0.0;
  Vector state;  // normalized vector in the model basis
};

struct LyapunovCertificate {
  HermitianOperator v;
  CertificateMode mode = CertificateMode::strict;
  double c = 0.0;
  double d = 0.0;
  std::optional<HermitianOperator> w;
  std::optional<HermitianOperator> u;
  Verdict verdict = Verdict::inconclusive;
  std::optional<Witness> witness;
  double tolerance = kDefaultTol;
  std::string anchor;
  std::map<std::string, double> metrics;
  std::vector<std::string> notes;

  bool holds() const { return verdict == Verdict::holds; }
};

/// V >= 0 and G(V) <= 0. Throws ValidationError if V is not PSD.
LyapunovCertificate check_lyapunov(const ModelSpec& model, const HermitianOperator& v,
                                   const CheckOptions& opts = {});

/// V >= 0 and G(V) <= -cV + dI with c > 0, d >= 0.
LyapunovCertificate check_weak_lyapunov(const ModelSpec& model, const HermitianOperator& v, double c,
                                        double d, const CheckOptions& opts = {});

struct CoercivityReport {
  SpectralDecomposition spectral;
  RealVector eigenvalues;   // with multiplicity, ascending; index i of the envelope
  Index monotone_from = 0;  // smallest i0 with v_i0 < v_i0+1 < ... strictly
  bool coercive_pattern = false;
  double envelope_intercept = 0.0;  // k(i) = intercept + slope * i
  double envelope_slope = 0.0;
  bool truncated = true;  // always: unboundedness is not decidable from a matrix
};

CoercivityReport coercivity_assess(const HermitianOperator& v,
                                   double degeneracy_tol = kDefaultDegeneracyTol);

struct TailBound {
  Verdict verdict = Verdict::inconclusive;
  Index m = 0;        // number of spectral levels kept
  Matrix projection;  // sum_{i < m} P_i
  std::string explanation;
};

/// Smallest admissible finite-rank projection P = sum_{i<m} P_i such that any
/// state with tr(rho V) <= c has tr(rho P) > 1 - eps: m = max(min_index,
/// first level with v_m >= c/eps and v_m > 0).
TailBound tightness_tail_bound(const SpectralDecomposition& v, double c, double eps, Index min_index = 0);

enum class LaSalleTheorem { t5, t6, t7, corollary1 };

std::string to_string(LaSalleTheorem t);

/// t5: G(V) <= -W (W >= 0), ||G(W)|| reported. t6: additionally G(W) <= 0.
/// t7: G(V) = W (W Hermitian) and G(W) <= 0. corollary1: G(V) <= U - W.
LyapunovCertificate check_lasalle_pair(const ModelSpec& model, const HermitianOperator& v,
                                       const HermitianOperator& w, LaSalleTheorem theorem,
                                       const std::optional<HermitianOperator>& u = std::nullopt,
                                       const CheckOptions& opts = {});

struct GroundSetReport {
  Verdict verdict = Verdict::inconclusive;
  PsdResult generator_check;            // (a) G(V) <= 0
  double commutator_norm = 0.0;         // (b) ||[G(V), V]||_max
  double kernel_leak = 0.0;             // (c) max <V> over ker D(V); 0 iff ker D(V) is inside ker V
  double min_dissipation_off_kernel = 0.0;  // min eig of D(V) compressed to ker(V)-complement
  Index kernel_dim = 0;                 // dim ker V
  Matrix dissipation;                   // D(V) = sum_k [V, L_k]^dag [V, L_k]
  double tolerance = kDefaultTol;
  std::vector<std::string> notes;
};

/// Convergence-to-ground-set hypotheses: G(V) <= 0, [G(V), V] = 0 and
/// <D(V)>_rho > 0 off Z_V. The last is decided exactly as ker D(V) subset of
/// ker V; when it fails the verdict is inconclusive (the criterion is only
/// sufficient for convergence).
GroundSetReport check_theorem8(const ModelSpec& model, const HermitianOperator& v, double tol = kDefaultTol);

struct SearchOptions {
  int max_iter = 2000;
  std::uint64_t seed = 7;
  CheckOptions check;
};

/// Best-effort search for V = sum_j x_j B_j with V >= 0 and G(V) <= -cV + dI.
///
/// Coefficients of basis elements that are not multiples of the identity are
/// restricted to the probability simplex; the identity direction is free.
/// This rules out the trivial certificates V = 0 and V = x I whenever the
/// basis offers anything else. The penalty sum of squared negative
/// eigenvalues of both constraints is minimized by projected gradient
/// descent with backtracking. A returned certificate has been re-verified by
/// check_weak_lyapunov; nullopt only means "not found".
std::optional<LyapunovCertificate> lyapunov_search(const ModelSpec& model,
                                                   const std::vector<HermitianOperator>& basis, double c,
                                                   double d, const SearchOptions& opts = {});

}  // namespace qmstab
