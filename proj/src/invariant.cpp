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

#include "qmstab/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace qmstab {
namespace {

double projection_tol(const Matrix& p) { return 1e-9 * std::max(1.0, max_abs(p)); }

void require_projection(const Matrix& p, Index dim, const char* what, bool allow_trivial) {
  require_dim(p, dim, what);
  const double tol = projection_tol(p);
  if (max_abs(p - p.adjoint()) > tol || max_abs(p * p - p) > tol) {
    throw ValidationError(std::string(what) + ": not an orthogonal projection");
  }
  if (!allow_trivial) {
    if (max_abs(p) <= tol || max_abs(p - identity(dim)) <= tol) {
      throw ValidationError(std::string(what) + ": projection must be non-trivial (P != 0, P != I)");
    }
  }
}

Matrix orthonormal_columns(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using SparseSolver = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

// Block shift-invert subspace iteration for eigenvectors of `m` with
// eigenvalue within tol*scale of zero; `lu` factors m - shift I.
Matrix iterative_kernel(SparseSolver& lu, const SparseMatrix& m, double threshold, std::mt19937_64& rng) {
  const Index n = m.rows();
  Index k = std::min<Index>(8, n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (true) {
    Matrix q(n, k);
    for (Index j = 0; j < k; ++j)
      for (Index i = 0; i < n; ++i) q(i, j) = Complex(gauss(rng), gauss(rng));
    q = orthonormal_columns(q);

    Index zero_count = 0;
    Matrix ritz;
    for (int iter = 0; iter < 60; ++iter) {
      const Matrix y = lu.solve(q);
      q = orthonormal_columns(y);
      if (iter < 3) continue;
      const Matrix mq = m * q;
      const Matrix b = q.adjoint() * mq;
      Eigen::ComplexEigenSolver<Matrix> es(b);
      std::vector<Index> zeros;
      for (Index i = 0; i < k; ++i)
        if (std::abs(es.eigenvalues()(i)) <= threshold) zeros.push_back(i);
      zero_count = static_cast<Index>(zeros.size());
      if (zero_count == 0) break;
      Matrix cand(n, zero_count);
      for (Index j = 0; j < zero_count; ++j) cand.col(j) = q * es.eigenvectors().col(zeros[static_cast<size_t>(j)]);
      cand = orthonormal_columns(cand);
      const Matrix res = m * cand;
      ritz = cand;
      if (res.colwise().norm().maxCoeff() <= threshold) break;
    }
    if (zero_count < k || k == n) return zero_count == 0 ? Matrix(n, 0) : ritz;
    k = std::min<Index>(2 * k, n);
  }
}

}  // namespace

std::string to_string(Uniqueness u) {
  switch (u) {
    case Uniqueness::unique:
      return "unique";
    case Uniqueness::not_unique:
      return "not_unique";
    case Uniqueness::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

KernelBases liouvillian_kernel(const Superoperator& l, double tol, std::uint64_t seed, Index dense_limit) {
  const Matrix& m = l.matrix;
  const Index n = m.rows();
  KernelBases out;
  if (n <= dense_limit) {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    out.scale = s.size() ? s(0) : 0.0;
    const double cut = tol * std::max(out.scale, 1e-300);
    Index rank = 0;
    while (rank < s.size() && s(rank) > cut) ++rank;
    out.right = svd.matrixV().rightCols(n - rank);
    out.left = svd.matrixU().rightCols(n - rank);
    return out;
  }

  out.scale = m.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm bounds the spectral radius
  const double shift = 1e-6 * std::max(out.scale, 1e-300);
  const SparseMatrix sm = m.sparseView();
  SparseMatrix eye(n, n);
  eye.setIdentity();
  std::mt19937_64 rng(seed);
  const double threshold = tol * out.scale;
  for (const bool left : {false, true}) {
    const SparseMatrix op = left ? SparseMatrix(sm.adjoint()) : sm;
    SparseMatrix shifted = op - Complex(shift, 0.0) * eye;
    shifted.makeCompressed();
    SparseSolver lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success) throw NumericalError("liouvillian_kernel: sparse factorization failed");
    (left ? out.left : out.right) = iterative_kernel(lu, op, threshold, rng);
  }
  if (out.right.cols() != out.left.cols()) {
    throw NumericalError("liouvillian_kernel: left and right kernel dimensions disagree");
  }
  return out;
}

InvariantStateReport steady_states(const ModelSpec& model, const SteadyStateOptions& opts) {
  const Index dim = model.dim();
  const auto sup = liouvillian(model, Side::schroedinger, opts.dim_cap);
  const auto kernel = liouvillian_kernel(sup, opts.tol, opts.seed);

  InvariantStateReport rep;
  rep.tolerance = opts.tol;
  rep.liouvillian_norm = kernel.scale;
  rep.null_dimension = kernel.right.cols();
  if (rep.null_dimension == 0) {
    throw NumericalError("steady_states: no stationary vector within tolerance; the generator is not a valid Lindbladian");
  }

  // Spectral projector onto the kernel along the range: R (L^dag R)^-1 L^dag.
  const Matrix& r = kernel.right;
  const Matrix& lk = kernel.left;
  const Matrix gram = lk.adjoint() * r;
  const Eigen::FullPivLU<Matrix> gram_lu(gram);
  if (!gram_lu.isInvertible()) throw NumericalError("steady_states: kernel projector is singular (non-semisimple zero eigenvalue)");
  auto project = [&](const Matrix& rho) -> Matrix {
    const Vector x = r * gram_lu.solve(lk.adjoint() * vec(rho));
    return unvec(x, dim);
  };

  std::mt19937_64 rng(opts.seed);
  std::vector<Vector> accepted;  // orthonormalized vec of accepted candidates
  const Index want = rep.null_dimension;
  const Index max_tries = 4 * want + 16;
  for (Index attempt = 0; attempt < max_tries && static_cast<Index>(rep.states.size()) < want; ++attempt) {
    const Matrix seed_state = attempt == 0 ? Matrix(identity(dim) / static_cast<double>(dim)) : random_density(dim, rng);
    Matrix x = project(seed_state);
    Vector v = vec(x);
    const double norm0 = v.norm();
    for (const auto& a : accepted) v -= a * a.dot(v);
    if (v.norm() <= 1e-6 * norm0) continue;
    accepted.push_back(v / v.norm());

    // Cleanup: hermitize, clip, renormalize.
    Matrix herm = 0.5 * (x + x.adjoint());
    const auto eig = hermitian_eigen(herm);
    RealVector clipped = eig.values.cwiseMax(0.0);
    Matrix cleaned = eig.vectors * clipped.asDiagonal() * eig.vectors.adjoint();
    const double tr = cleaned.trace().real();
    if (!(tr > 0.0)) continue;
    cleaned /= tr;
    cleaned = 0.5 * (cleaned + cleaned.adjoint());
    const double moved = max_abs(cleaned - x / x.trace());

    DensityMatrix rho(cleaned);
    const auto fc = faithfulness_check(rho, opts.tol);
    rep.cleanup_displacement.push_back(moved);
    rep.reliable.push_back(moved <= 10.0 * opts.tol);
    rep.residuals.push_back(max_abs(generator_schroedinger(model, cleaned)));
    rep.faithful.push_back(fc.faithful);
    rep.support_projections.push_back(fc.support);
    rep.ranks.push_back(fc.rank);
    rep.states.push_back(std::move(rho));
  }
  rep.unique = rep.null_dimension == 1 ? Uniqueness::unique : Uniqueness::not_unique;
  return rep;
}

FaithfulnessResult faithfulness_check(const DensityMatrix& rho, double tol) {
  const auto eig = hermitian_eigen(rho.matrix());
  const Index n = rho.dim();
  FaithfulnessResult r;
  r.support = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    if (eig.values(i) > tol) {
      ++r.rank;
      r.support += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
    }
  }
  r.faithful = r.rank == n;
  return r;
}

ConnectivityResult connectivity_check(const ModelSpec& model, const Matrix& p, double threshold) {
  require_projection(p, model.dim(), "connectivity_check", false);
  const Matrix comp = identity(model.dim()) - p;
  ConnectivityResult r;
  r.projection = p;
  for (const auto& l : model.couplings()) {
    const Matrix term = p * l.adjoint() * comp * l * p;
    r.value += std::max(0.0, hermitian_eigen(term).values.maxCoeff());
  }
  r.connected = r.value > threshold;
  return r;
}

std::vector<Matrix> spectral_family(const HermitianOperator& a, double degeneracy_tol) {
  return spectral_decompose(a, degeneracy_tol).projections;
}

std::vector<Matrix> coordinate_family(Index dim) {
  std::vector<Matrix> out;
  for (Index i = 0; i < dim; ++i) out.push_back(ket_bra(i, i, dim));
  return out;
}

ConnectivityScan connectivity_scan(const ModelSpec& model, const std::vector<Matrix>& family, double threshold) {
  const Index dim = model.dim();
  if (family.empty()) throw ValidationError("connectivity_scan: empty projection family");
  Matrix sum = Matrix::Zero(dim, dim);
  for (size_t i = 0; i < family.size(); ++i) {
    require_projection(family[i], dim, "connectivity_scan member", true);
    for (size_t j = 0; j < i; ++j) {
      if (max_abs(family[i] * family[j]) > projection_tol(family[i])) {
        throw ValidationError("connectivity_scan: family members are not mutually orthogonal");
      }
    }
    sum += family[i];
  }
  if (max_abs(sum - identity(dim)) > 1e-9) {
    throw ValidationError("connectivity_scan: family does not resolve the identity");
  }

  ConnectivityScan scan;
  auto record = [&](const ConnectivityResult& r) {
    if (!r.connected && !scan.counterexample) scan.counterexample = r;
    scan.all_connected = scan.all_connected && r.connected;
  };
  auto nontrivial = [&](const Matrix& p) {
    const double tol = projection_tol(p);
    return max_abs(p) > tol && max_abs(p - identity(dim)) > tol;
  };
  for (const auto& p : family) {
    if (!nontrivial(p)) continue;
    scan.members.push_back(connectivity_check(model, p, threshold));
    record(scan.members.back());
  }
  Matrix partial = Matrix::Zero(dim, dim);
  for (size_t i = 0; i + 1 < family.size(); ++i) {
    partial += family[i];
    if (!nontrivial(partial)) continue;
    scan.partial_sums.push_back(connectivity_check(model, partial, threshold));
    record(scan.partial_sums.back());
  }
  scan.caveat =
      "only the declared family and its cumulative sums were examined; there may exist other projections that "
      "violate the connectivity condition";
  return scan;
}

UniquenessReport uniqueness_check(const ModelSpec& model, const UniquenessOptions& opts) {
  const Index n = model.dim();
  UniquenessReport rep;

  if (n == 1) {
    rep.verdict = Uniqueness::unique;
    rep.algebra_dimension = 1;
    rep.span_stabilized = true;
    rep.commutant_dimension = 1;
    rep.null_dimension = 1;
    rep.notes.push_back("one-dimensional system");
    return rep;
  }

  SteadyStateOptions sso;
  sso.tol = opts.tol;
  sso.seed = opts.seed;
  const auto sup = liouvillian(model, Side::schroedinger);
  rep.null_dimension = liouvillian_kernel(sup, opts.tol, opts.seed).right.cols();

  std::vector<Matrix> gens{model.h()};
  for (const auto& l : model.couplings()) {
    gens.push_back(l);
    gens.push_back(l.adjoint());
  }

  bool full_algebra = false;
  if (n <= opts.algebra_dim_cap) {
    const Index full = n * n;
    const Index max_len = opts.max_products > 0 ? opts.max_products : full;
    Matrix basis(full, full);
    Index rank = 0;
    const double eps = 1e-10;
    auto try_add = [&](const Matrix& w) {
      Vector v = vec(w);
      const double norm0 = v.norm();
      if (norm0 <= eps) return false;
      v /= norm0;
      for (int pass = 0; pass < 2; ++pass) {
        if (rank > 0) v -= basis.leftCols(rank) * (basis.leftCols(rank).adjoint() * v);
      }
      if (v.norm() <= eps * 100.0) return false;
      basis.col(rank++) = v / v.norm();
      return true;
    };
    std::vector<Matrix> frontier{identity(n)};
    try_add(identity(n));
    Index length = 0;
    while (!frontier.empty() && rank < full && length < max_len) {
      ++length;
      std::vector<Matrix> next;
      for (const auto& w : frontier)
        for (const auto& g : gens) {
          const Matrix prod = g * w;
          if (try_add(prod)) next.push_back(prod);
        }
      frontier = std::move(next);
    }
    rep.word_length = length;
    rep.algebra_dimension = rank;
    rep.span_stabilized = frontier.empty() || rank == full;
    full_algebra = rank == full;
    if (!rep.span_stabilized) {
      rep.verdict = Uniqueness::inconclusive;
      rep.notes.push_back("operator span did not stabilize within max_products");
      return rep;
    }
  } else {
    rep.notes.push_back("dimension above the algebra closure cap; algebraic certificate skipped");
  }

  if (full_algebra) {
    rep.commutant_dimension = 1;
  } else if (n <= opts.commutant_dim_cap) {
    // Null space of sum_A ad_A^dag ad_A over the generators.
    const Matrix id = identity(n);
    Matrix k = Matrix::Zero(n * n, n * n);
    for (const auto& g : gens) {
      const Matrix ad = kron(id, g) - kron(g.transpose(), id);
      k += ad.adjoint() * ad;
    }
    const auto eig = hermitian_eigen(k);
    const double cut = 1e-9 * std::max(1.0, eig.values.cwiseAbs().maxCoeff());
    rep.commutant_dimension = 0;
    for (Index i = 0; i < eig.values.size(); ++i)
      if (eig.values(i) <= cut) ++rep.commutant_dimension;
  }

  if (n > opts.algebra_dim_cap) {
    const bool conserved = rep.commutant_dimension > 1;
    rep.verdict = rep.null_dimension == 1 && !conserved ? Uniqueness::unique : Uniqueness::not_unique;
  } else if (!full_algebra) {
    // Commutant elements commute with H and every L_k, so they are fixed by the
    // Heisenberg semigroup: at least two independent conserved observables.
    rep.verdict = Uniqueness::not_unique;
    if (rep.null_dimension <= 1) rep.notes.push_back("non-trivial commutant but Liouvillian null dimension <= 1");
  } else if (rep.null_dimension == 1) {
    rep.verdict = Uniqueness::unique;
  } else {
    rep.verdict = Uniqueness::not_unique;
    rep.notes.push_back("trivial commutant but several stationary states (non-faithful absorbing subspaces)");
  }
  return rep;
}

PsdResult subharmonicity_check(const ModelSpec& model, const Matrix& p, double tol) {
  require_projection(p, model.dim(), "subharmonicity_check", true);
  return psd_check_matrix(generator_heisenberg(model, p), tol);
}

}  // namespace qmstab
