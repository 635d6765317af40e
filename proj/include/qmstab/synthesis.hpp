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

// Coupling synthesis: pairwise engineering of G(V) in the eigenbasis of a
// target V, and ground-state couplings from M = [L, V].

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmstab/generator.hpp"
#include "qmstab/lyapunov.hpp"
#include "qmstab/operator_core.hpp"

namespace qmstab {

/// Eigenvalues in descending order with a deterministic orthonormal basis.
/// Degenerate eigenspaces are spanned by the projected standard basis
/// vectors in index order, so a diagonal V yields permuted unit vectors.
struct CanonicalEigenbasis {
  RealVector values;            // descending, with multiplicity
  Matrix vectors;               // columns
  std::vector<Index> level_of;  // level index (0 = largest) per column
  std::vector<Index> permutation;  // largest-overlap standard index per column
};

CanonicalEigenbasis canonical_eigenbasis(const HermitianOperator& v, double degeneracy_tol = kDefaultDegeneracyTol);

/// One engineered pair, as column indices of the canonical eigenbasis.
struct SynthesisPair {
  Index higher = 0;
  Index lower = 1;
  Complex l{1.0, 0.0};
};

struct SynthesisSpec {
  HermitianOperator v;
  std::optional<HermitianOperator> hamiltonian;
  /// Empty: couple the first vector of each level to the first vector of the
  /// next lower level, with magnitude default_l.
  std::vector<SynthesisPair> pairs;
  Complex default_l{1.0, 0.0};
  /// Cancel the Hamiltonian cross term of each pair with a diagonal entry on
  /// the lower vector. When false the Hamiltonian is left uncompensated.
  bool compensate_hamiltonian = true;
  double tol = kDefaultTol;
  double degeneracy_tol = kDefaultDegeneracyTol;
};

enum class PairCase { a, b, c };

std::string to_string(PairCase c);

struct PairOutcome {
  SynthesisPair pair;
  PairCase kind = PairCase::b;
  double gap = 0.0;       // v_higher - v_lower
  Matrix block;           // 2x2 block of G(V) in (lower, higher) order, eigenbasis
  std::optional<Matrix> coupling;  // absent in case A
};

struct SynthesisResult {
  HermitianOperator v;
  std::optional<HermitianOperator> hamiltonian;
  CanonicalEigenbasis basis;
  std::vector<Matrix> couplings;  // original basis
  std::vector<PairOutcome> pairs;
  Matrix generator;               // G(V), original basis
  Matrix generator_eigenbasis;    // U^dag G(V) U, descending eigenbasis
  std::optional<LyapunovCertificate> certificate;  // always set by synthesize_coupling
  double certificate_shift = 0.0;  // certificate is for V + shift I (G(I) = 0)
  bool certified = false;
  bool partial = false;  // some vectors are left uncoupled or a cross term survives
  std::vector<std::string> notes;
};

/// Model with the result's Hamiltonian (zero if none) and couplings; a single
/// zero coupling stands in when no pair produced one.
ModelSpec assembled_model(const SynthesisResult& result);

/// Throws ValidationError for l = 0, pairs running upward, or out-of-range
/// indices. A degenerate pair is case A; with a Hamiltonian cross term and
/// compensation enabled it is case C, otherwise case B.
SynthesisResult synthesize_coupling(const SynthesisSpec& spec);

struct SynthesisVerification {
  Verdict verdict = Verdict::holds;
  double max_deviation = 0.0;
  std::string first_mismatch;
  std::optional<LyapunovCertificate> certificate;
};

/// Recomputes G(V) under `model`, compares it entrywise with the recorded
/// generator (tolerance 1e-10) and re-runs the certificate. Fails on the
/// first differing entry or when the certificate verdict differs from the
/// recorded one.
SynthesisVerification verify_synthesis(const SynthesisResult& result, const ModelSpec& model,
                                       double block_tol = 1e-10);

struct GroundCoupling {
  bool supported = true;
  std::string explanation;
  Matrix m;                          // V = M^dag M
  Matrix default_l;                  // particular solution of M = [L, V], free parameters zero
  std::vector<Matrix> free_directions;  // L + sum_k t_k F_k solves it for any t
  double factorization_residual = 0.0;  // ||M^dag M - V||_max
  double equation_residual = 0.0;       // ||[L, V] - M||_max
  Matrix generator;                     // G(V) with H = 0 and L = default_l
  std::optional<LyapunovCertificate> lyapunov;
  std::optional<GroundSetReport> ground_set;
};

/// V >= 0 required (ValidationError otherwise). M maps the eigenvectors of
/// the positive eigenvalues (descending) onto distinct kernel vectors
/// (canonical order) with weights sqrt(v_i); unsupported when rank V exceeds
/// dim ker V.
GroundCoupling solve_ground_coupling(const HermitianOperator& v, double tol = kDefaultTol);

}  // namespace qmstab
