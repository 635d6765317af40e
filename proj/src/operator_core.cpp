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

#include "qmstab/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qmstab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds:
      return "holds";
    case Verdict::fails:
      return "fails";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

void require_square(const Matrix& a, const char* what) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << a.rows() << "x" << a.cols();
    throw DimensionError(os.str());
  }
  if (!a.allFinite()) {
    throw ValidationError(std::string(what) + ": matrix has non-finite entries");
  }
}

void require_dim(const Matrix& a, Index dim, const char* what) {
  require_square(a, what);
  if (a.rows() != dim) {
    std::ostringstream os;
    os << what << ": expected dimension " << dim << ", got " << a.rows();
    throw DimensionError(os.str());
  }
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

HermitianOperator::HermitianOperator(Matrix m) : m_(std::move(m)) {
  require_square(m_, "HermitianOperator");
  const double scale = std::max(1.0, max_abs(m_));
  const double defect = max_abs(m_ - m_.adjoint());
  if (defect > kHermiticityTol * scale) {
    std::ostringstream os;
    os << "HermitianOperator: ||A - A^dag||_max = " << defect << " exceeds tolerance "
       << kHermiticityTol * scale;
    throw ValidationError(os.str());
  }
}

DensityMatrix::DensityMatrix(Matrix m, double tol) : m_(std::move(m)) {
  HermitianOperator h(m_);
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > tol) {
    std::ostringstream os;
    os << "DensityMatrix: trace " << tr << " differs from 1 by more than " << tol;
    throw ValidationError(os.str());
  }
  const double lmin = hermitian_eigen(m_).values(0);
  if (lmin < -tol) {
    std::ostringstream os;
    os << "DensityMatrix: minimum eigenvalue " << lmin << " below -" << tol;
    throw ValidationError(os.str());
  }
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(identity(dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::basis_state(Index i, Index dim) {
  return DensityMatrix(ket_bra(i, i, dim));
}

Matrix SpectralDecomposition::reconstruct() const {
  if (projections.empty()) return Matrix();
  Matrix out = Matrix::Zero(projections.front().rows(), projections.front().cols());
  for (Index i = 0; i < levels(); ++i) out += eigenvalues(i) * projections[static_cast<size_t>(i)];
  return out;
}

EigenPairs hermitian_eigen(const Matrix& a) {
  // Hermitize to strip rounding asymmetry before the solver reads one triangle.
  const Matrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigensolver did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

SpectralDecomposition spectral_decompose(const HermitianOperator& a, double degeneracy_tol) {
  if (!(degeneracy_tol >= 0.0)) throw ValidationError("spectral_decompose: negative degeneracy_tol");
  const auto eig = hermitian_eigen(a.matrix());
  const Index n = eig.values.size();

  SpectralDecomposition out;
  std::vector<double> levels;
  Index start = 0;
  while (start < n) {
    Index end = start + 1;
    while (end < n && eig.values(end) - eig.values(start) <= degeneracy_tol) ++end;
    const Index count = end - start;
    const auto block = eig.vectors.middleCols(start, count);
    levels.push_back(eig.values.segment(start, count).mean());
    out.projections.push_back(block * block.adjoint());
    out.multiplicities.push_back(count);
    start = end;
  }
  out.eigenvalues = Eigen::Map<RealVector>(levels.data(), static_cast<Index>(levels.size()));
  return out;
}

PsdResult psd_check_matrix(const Matrix& a, double tol) {
  require_square(a, "psd_check");
  const auto eig = hermitian_eigen(a);
  const double norm = eig.values.cwiseAbs().maxCoeff();
  PsdResult r;
  r.min_eigenvalue = eig.values(0);
  r.threshold = -tol * std::max(1.0, norm);
  if (r.min_eigenvalue >= r.threshold) {
    r.verdict = Verdict::holds;
  } else {
    r.verdict = Verdict::fails;
    r.witness = eig.vectors.col(0);
  }
  return r;
}

PsdResult psd_check(const HermitianOperator& a, double tol) { return psd_check_matrix(a.matrix(), tol); }

Matrix identity(Index dim) {
  if (dim < 1) throw ValidationError("identity: dimension must be positive");
  return Matrix::Identity(dim, dim);
}

Matrix pauli(PauliAxis axis) {
  Matrix m = Matrix::Zero(2, 2);
  switch (axis) {
    case PauliAxis::x:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case PauliAxis::y:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case PauliAxis::z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

Matrix sigma_minus() { return ket_bra(1, 0, 2); }

Matrix sigma_plus() { return ket_bra(0, 1, 2); }

Matrix ladder_lowering(Index dim) {
  if (dim < 2) throw ValidationError("ladder_lowering: dimension must be >= 2");
  Matrix a = Matrix::Zero(dim, dim);
  for (Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix number_operator(Index dim) {
  if (dim < 2) throw ValidationError("number_operator: dimension must be >= 2");
  Matrix m = Matrix::Zero(dim, dim);
  for (Index n = 0; n < dim; ++n) m(n, n) = static_cast<double>(n);
  return m;
}

Matrix ket_bra(Index i, Index j, Index dim) {
  if (dim < 1 || i < 0 || j < 0 || i >= dim || j >= dim) {
    std::ostringstream os;
    os << "ket_bra: indices (" << i << ", " << j << ") invalid for dimension " << dim;
    throw ValidationError(os.str());
  }
  Matrix m = Matrix::Zero(dim, dim);
  m(i, j) = 1.0;
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix random_density(Index dim, std::mt19937_64& rng) {
  if (dim < 1) throw ValidationError("random_density: dimension must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i) g(i, j) = Complex(gauss(rng), gauss(rng));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

Vector random_state_vector(Index dim, std::mt19937_64& rng) {
  if (dim < 1) throw ValidationError("random_state_vector: dimension must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v / v.norm();
}

double trace_distance(const Matrix& a, const Matrix& b) {
  const auto eig = hermitian_eigen(a - b);
  return 0.5 * eig.values.cwiseAbs().sum();
}

}  // namespace qmstab
