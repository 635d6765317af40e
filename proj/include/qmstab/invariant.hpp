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

// Invariant states and their classification: Liouvillian kernel, support
// and faithfulness, the connectivity condition P L^dag (I-P) L P != 0 over
// declared projection families, algebraic uniqueness, subharmonic supports.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmstab/generator.hpp"
#include "qmstab/operator_core.hpp"

namespace qmstab {

enum class Uniqueness { unique, not_unique, inconclusive };

std::string to_string(Uniqueness u);

/// Right and left kernel bases of a square matrix (orthonormal columns).
struct KernelBases {
  Matrix right;
  Matrix left;
  double scale = 0.0;  // norm estimate used for the relative threshold
};

/// Kernel of a Liouvillian: vectors with |lambda| <= tol * ||M||. Dense SVD for
/// small matrices; shift-invert block subspace iteration above
/// `dense_limit` rows. The shift is a small positive real, which is never an
/// eigenvalue of a Lindbladian (spectrum in Re <= 0).
KernelBases liouvillian_kernel(const Superoperator& l, double tol = kDefaultTol, std::uint64_t seed = 11,
                               Index dense_limit = 400);

struct SteadyStateOptions {
  double tol = kDefaultTol;
  std::uint64_t seed = 11;
  Index dim_cap = kDefaultLiouvillianDimCap;
};

struct InvariantStateReport {
  std::vector<DensityMatrix> states;
  Index null_dimension = 0;
  std::vector<bool> faithful;
  std::vector<Matrix> support_projections;
  std::vector<Index> ranks;
  std::vector<bool> reliable;             // cleanup moved the matrix by <= 10 tol
  std::vector<double> cleanup_displacement;
  std::vector<double> residuals;          // ||G_*(rho)||_max
  Uniqueness unique = Uniqueness::inconclusive;
  double liouvillian_norm = 0.0;
  double tolerance = kDefaultTol;
};

/// Stationary states spanning the Liouvillian kernel. Candidate states are
/// the images of I/n and seeded random states under the spectral projector
/// onto the kernel; each is then hermitized, clipped at zero and
/// renormalized, with the displacement recorded.
InvariantStateReport steady_states(const ModelSpec& model, const SteadyStateOptions& opts = {});

struct FaithfulnessResult {
  bool faithful = false;
  Matrix support;
  Index rank = 0;
};

FaithfulnessResult faithfulness_check(const DensityMatrix& rho, double tol = kDefaultTol);

struct ConnectivityResult {
  Matrix projection;
  double value = 0.0;  // sum_k || P L_k^dag (I-P) L_k P ||_2
  bool connected = false;
};

inline constexpr double kConnectivityThreshold = 1e-9;

/// Throws ValidationError unless P is a non-trivial orthogonal projection.
ConnectivityResult connectivity_check(const ModelSpec& model, const Matrix& p,
                                      double threshold = kConnectivityThreshold);

/// Spectral projections of a Hermitian operator (for V or an invariant state).
std::vector<Matrix> spectral_family(const HermitianOperator& a, double degeneracy_tol = kDefaultDegeneracyTol);
/// {|i><i|} for i < dim.
std::vector<Matrix> coordinate_family(Index dim);

struct ConnectivityScan {
  std::vector<ConnectivityResult> members;       // each P_i
  std::vector<ConnectivityResult> partial_sums;  // P_0 + ... + P_i, non-trivial ones
  bool all_connected = true;
  std::optional<ConnectivityResult> counterexample;
  std::string caveat;
};

/// Requires a family of mutually orthogonal projections resolving the
/// identity. Connectivity of every member and every cumulative partial sum
/// only covers the declared family; other projections are not examined.
ConnectivityScan connectivity_scan(const ModelSpec& model, const std::vector<Matrix>& family,
                                   double threshold = kConnectivityThreshold);

struct UniquenessReport {
  Uniqueness verdict = Uniqueness::inconclusive;
  Index algebra_dimension = 0;
  bool span_stabilized = false;
  Index word_length = 0;
  Index commutant_dimension = -1;  // -1: not computed
  Index null_dimension = 0;
  std::vector<std::string> notes;
};

struct UniquenessOptions {
  double tol = kDefaultTol;
  Index max_products = 0;      // 0 means dim^2 (always enough to stabilize)
  Index algebra_dim_cap = 30;  // the word closure costs O(dim^6)
  Index commutant_dim_cap = 40;
  std::uint64_t seed = 11;
};

/// Closes span{I, H, L_k, L_k^dag} under products, derives the commutant
/// dimension and cross-checks against the Liouvillian null dimension. The
/// algebra is a *-algebra, so its commutant is trivial exactly when the span
/// is the full matrix algebra.
UniquenessReport uniqueness_check(const ModelSpec& model, const UniquenessOptions& opts = {});

/// G(P) >= -tol, the generator form of T_t(P) >= P for support projections.
PsdResult subharmonicity_check(const ModelSpec& model, const Matrix& p, double tol = kDefaultTol);

}  // namespace qmstab
