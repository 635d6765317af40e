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

// Dense complex operator algebra: validated Hermitian and density-matrix
// wrappers, spectral decomposition with degenerate-level grouping, PSD
// certification and the standard operator builders.
//
// Basis convention: basis vectors are indexed 0, 1, ...; |0> is the first
// basis vector. For a qubit sigma_z = diag(1, -1) and sigma_- = |1><0| maps
// the first basis vector onto the second.

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmstab/error.hpp"

namespace qmstab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Default relative tolerance for every operator inequality.
inline constexpr double kDefaultTol = 1e-9;
/// Default absolute gap below which eigenvalues are treated as one level.
inline constexpr double kDefaultDegeneracyTol = 1e-9;
/// Relative hermiticity tolerance applied when wrapping a matrix as Hermitian.
inline constexpr double kHermiticityTol = 1e-10;
/// Trace / positivity tolerance used when wrapping a density matrix.
inline constexpr double kDensityTol = 1e-8;

/// Tri-state outcome. `inconclusive` is never folded into the other two.
enum class Verdict { holds, fails, inconclusive };

std::string to_string(Verdict v);

/// Largest entry magnitude.
double max_abs(const Matrix& a);

/// Throws DimensionError unless `a` is square with finite entries.
void require_square(const Matrix& a, const char* what);

/// Throws DimensionError unless `a` is `dim` x `dim`.
void require_dim(const Matrix& a, Index dim, const char* what);

Matrix commutator(const Matrix& a, const Matrix& b);
Matrix anticommutator(const Matrix& a, const Matrix& b);

class HermitianOperator {
 public:
  /// Validates A = A^dag within kHermiticityTol * max(1, ||A||_max); the
  /// input is rejected rather than symmetrized.
  explicit HermitianOperator(Matrix m);

  const Matrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and min eigenvalue >= -tol.
  explicit DensityMatrix(Matrix m, double tol = kDensityTol);

  const Matrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

  /// Maximally mixed state I/n.
  static DensityMatrix maximally_mixed(Index dim);
  /// Pure state |i><i|.
  static DensityMatrix basis_state(Index i, Index dim);

 private:
  Matrix m_;
};

struct SpectralDecomposition {
  RealVector eigenvalues;            // distinct levels, ascending
  std::vector<Matrix> projections;   // one orthogonal projection per level
  std::vector<Index> multiplicities;

  Index levels() const { return eigenvalues.size(); }
  /// sum_i v_i P_i
  Matrix reconstruct() const;
};

/// Ascending spectral decomposition; eigenvalues closer than `degeneracy_tol`
/// (absolute, measured against the first member of the running group) share
/// one projection.
SpectralDecomposition spectral_decompose(const HermitianOperator& a,
                                         double degeneracy_tol = kDefaultDegeneracyTol);

/// Eigenvalues with multiplicity, ascending, plus eigenvectors as columns.
struct EigenPairs {
  RealVector values;
  Matrix vectors;
};
EigenPairs hermitian_eigen(const Matrix& a);

struct PsdResult {
  Verdict verdict = Verdict::holds;
  double min_eigenvalue = 0.0;
  double threshold = 0.0;              // the -tol * max(1, ||A||) cut actually used
  std::optional<Vector> witness;       // eigenvector of the most negative eigenvalue, on failure

  bool holds() const { return verdict == Verdict::holds; }
};

/// holds iff min eig(A) >= -tol * max(1, ||A||_2).
PsdResult psd_check(const HermitianOperator& a, double tol = kDefaultTol);

/// Same test on a matrix that is Hermitian by construction (hermitized
/// before the eigensolve to strip rounding noise).
PsdResult psd_check_matrix(const Matrix& a, double tol = kDefaultTol);

enum class PauliAxis { x, y, z };

Matrix identity(Index dim);
Matrix pauli(PauliAxis axis);
/// sigma_- = |1><0|
Matrix sigma_minus();
/// sigma_+ = |0><1|
Matrix sigma_plus();
/// Truncated bosonic annihilation operator: a|n> = sqrt(n)|n-1>.
Matrix ladder_lowering(Index dim);
/// diag(0, 1, ..., dim-1)
Matrix number_operator(Index dim);
/// |i><j|
Matrix ket_bra(Index i, Index j, Index dim);
Matrix kron(const Matrix& a, const Matrix& b);

/// Random mixed state from the partial trace of a Gaussian purification,
/// rho = G G^dag / tr(G G^dag) with G a complex Ginibre matrix.
Matrix random_density(Index dim, std::mt19937_64& rng);

/// Random normalized Gaussian vector.
Vector random_state_vector(Index dim, std::mt19937_64& rng);

/// Trace distance 1/2 ||a - b||_1 between two Hermitian matrices.
double trace_distance(const Matrix& a, const Matrix& b);

}  // namespace qmstab
