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

#include "qmstab/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qmstab {
namespace {

Matrix zero_model_hamiltonian(Index n) { return Matrix::Zero(n, n); }

}  // namespace

CanonicalEigenbasis canonical_eigenbasis(const HermitianOperator& v, double degeneracy_tol) {
  const Index n = v.dim();
  const EigenPairs eig = hermitian_eigen(v.matrix());
  CanonicalEigenbasis out;
  out.values.resize(n);
  out.vectors = Matrix::Zero(n, n);

  Index col = 0;
  Index level = 0;
  Index hi = n - 1;
  while (hi >= 0) {
    Index lo = hi;
    while (lo > 0 && std::abs(eig.values(hi) - eig.values(lo - 1)) <= degeneracy_tol) --lo;
    const Index mult = hi - lo + 1;
    const Matrix q = eig.vectors.middleCols(lo, mult);
    const Matrix proj = q * q.adjoint();
    double mean = 0.0;
    for (Index k = lo; k <= hi; ++k) mean += eig.values(k);
    mean /= static_cast<double>(mult);

    Index found = 0;
    for (Index j = 0; j < n && found < mult; ++j) {
      Vector u = proj.col(j);
      for (Index k = col - found; k < col; ++k) u -= out.vectors.col(k) * out.vectors.col(k).dot(u);
      const double nu = u.norm();
      if (nu < 1e-6) continue;
      out.vectors.col(col) = u / nu;
      out.values(col) = mean;
      out.level_of.push_back(level);
      ++col;
      ++found;
    }
    if (found < mult) throw NumericalError("canonical_eigenbasis: failed to span a degenerate eigenspace");
    ++level;
    hi = lo - 1;
  }
  for (Index c = 0; c < n; ++c) {
    Index best = 0;
    out.vectors.col(c).cwiseAbs().maxCoeff(&best);
    out.permutation.push_back(best);
  }
  return out;
}

std::string to_string(PairCase c) {
  switch (c) {
    case PairCase::a:
      return "A";
    case PairCase::b:
      return "B";
    case PairCase::c:
      return "C";
  }
  return "B";
}

ModelSpec assembled_model(const SynthesisResult& result) {
  const Index n = result.v.dim();
  HermitianOperator h = result.hamiltonian ? *result.hamiltonian : HermitianOperator(zero_model_hamiltonian(n));
  std::vector<Matrix> ls = result.couplings;
  if (ls.empty()) ls.push_back(Matrix::Zero(n, n));
  return ModelSpec(std::move(h), std::move(ls));
}

SynthesisResult synthesize_coupling(const SynthesisSpec& spec) {
  const Index n = spec.v.dim();
  if (spec.hamiltonian && spec.hamiltonian->dim() != n) {
    throw DimensionError("synthesize_coupling: Hamiltonian dimension does not match V");
  }
  SynthesisResult res{spec.v, spec.hamiltonian, canonical_eigenbasis(spec.v, spec.degeneracy_tol)};
  const auto& basis = res.basis;
  const Matrix& u = basis.vectors;

  std::vector<SynthesisPair> pairs = spec.pairs;
  if (pairs.empty()) {
    Index prev_first = -1;
    for (Index c = 0; c < n; ++c) {
      if (c > 0 && basis.level_of[c] == basis.level_of[c - 1]) continue;
      if (prev_first >= 0) pairs.push_back({prev_first, c, spec.default_l});
      prev_first = c;
    }
    if (pairs.empty()) {
      res.notes.push_back("V has a single eigenvalue: the entire space is irreducible, G(V) = 0 for any coupling");
    }
  }

  std::vector<bool> touched(static_cast<size_t>(n), false);
  for (const auto& p : pairs) {
    if (p.higher < 0 || p.higher >= n || p.lower < 0 || p.lower >= n || p.higher == p.lower) {
      throw ValidationError("synthesize_coupling: pair index out of range");
    }
    if (std::abs(p.l) == 0.0) throw ValidationError("synthesize_coupling: coupling magnitude l must be nonzero");
    PairOutcome out;
    out.pair = p;
    out.gap = basis.values(p.higher) - basis.values(p.lower);
    if (std::abs(out.gap) <= spec.degeneracy_tol) {
      out.kind = PairCase::a;
      std::ostringstream os;
      os << "pair (" << p.higher << ", " << p.lower
         << ") is degenerate: the two-dimensional subspace is irreducible, no coupling emitted";
      res.notes.push_back(os.str());
      res.pairs.push_back(std::move(out));
      continue;
    }
    if (out.gap < 0.0) throw ValidationError("synthesize_coupling: pair must run from a higher to a lower eigenvalue");

    const Vector eh = u.col(p.higher);
    const Vector eg = u.col(p.lower);
    Matrix l = p.l * eg * eh.adjoint();
    out.kind = PairCase::b;
    if (spec.hamiltonian) {
      const Complex h01 = eg.dot(spec.hamiltonian->matrix() * eh);  // <lower|H|higher>
      if (std::abs(h01) > spec.tol * std::max(1.0, max_abs(spec.hamiltonian->matrix()))) {
        if (spec.compensate_hamiltonian) {
          out.kind = PairCase::c;
          const Complex l00 = -2.0 * kI * std::conj(h01) / std::conj(p.l);
          l += l00 * eg * eg.adjoint();
        } else {
          std::ostringstream os;
          os << "pair (" << p.higher << ", " << p.lower << "): Hamiltonian cross term left uncompensated";
          res.notes.push_back(os.str());
        }
      } else if (spec.compensate_hamiltonian) {
        std::ostringstream os;
        os << "pair (" << p.higher << ", " << p.lower << "): H01 = 0, case C reduces to case B";
        res.notes.push_back(os.str());
      }
    }
    touched[static_cast<size_t>(p.higher)] = true;
    touched[static_cast<size_t>(p.lower)] = true;
    out.coupling = l;
    res.couplings.push_back(l);
    res.pairs.push_back(std::move(out));
  }

  const ModelSpec model = assembled_model(res);
  res.generator = generator_heisenberg(model, spec.v.matrix());
  res.generator_eigenbasis = u.adjoint() * res.generator * u;
  for (auto& p : res.pairs) {
    Matrix blk(2, 2);
    const Index g = p.pair.lower;
    const Index h = p.pair.higher;
    blk << res.generator_eigenbasis(g, g), res.generator_eigenbasis(g, h), res.generator_eigenbasis(h, g),
        res.generator_eigenbasis(h, h);
    p.block = blk;
  }

  const Index untouched = std::count(touched.begin(), touched.end(), false);
  if (!res.couplings.empty() && untouched > 0) {
    std::ostringstream os;
    os << untouched << " eigenvector(s) not covered by any engineered pair";
    res.notes.push_back(os.str());
  }

  const double lmin = hermitian_eigen(spec.v.matrix()).values(0);
  const double scale = std::max(1.0, max_abs(spec.v.matrix()));
  if (lmin < -spec.tol * scale) {
    res.certificate_shift = -lmin;
    std::ostringstream os;
    os << "V is not positive semidefinite; certificate issued for V + " << res.certificate_shift << " I";
    res.notes.push_back(os.str());
  }
  const HermitianOperator vc(spec.v.matrix() + res.certificate_shift * identity(n));
  CheckOptions co;
  co.tol = spec.tol;
  res.certificate = check_lyapunov(model, vc, co);
  res.certified = res.certificate->holds();
  if (!res.certified) {
    res.partial = true;
    res.notes.push_back("assembled couplings do not give G(V) <= 0: cross-pair terms are not compensated");
  }
  return res;
}

SynthesisVerification verify_synthesis(const SynthesisResult& result, const ModelSpec& model, double block_tol) {
  if (model.dim() != result.v.dim()) throw DimensionError("verify_synthesis: model dimension does not match V");
  SynthesisVerification out;
  const Matrix g = generator_heisenberg(model, result.v.matrix());
  const Matrix ge = result.basis.vectors.adjoint() * g * result.basis.vectors;
  for (Index j = 0; j < ge.cols(); ++j) {
    for (Index i = 0; i < ge.rows(); ++i) {
      const double dev = std::abs(ge(i, j) - result.generator_eigenbasis(i, j));
      if (dev > out.max_deviation) out.max_deviation = dev;
      if (dev > block_tol && out.first_mismatch.empty()) {
        std::ostringstream os;
        os << "G(V) eigenbasis entry (" << i << ", " << j << ") differs by " << dev;
        out.first_mismatch = os.str();
      }
    }
  }
  const Index n = result.v.dim();
  CheckOptions co;
  co.tol = result.certificate ? result.certificate->tolerance : kDefaultTol;
  out.certificate = check_lyapunov(model, HermitianOperator(result.v.matrix() + result.certificate_shift * identity(n)),
                                   co);
  const bool recorded = result.certificate && result.certificate->holds();
  if (out.first_mismatch.empty() && out.certificate->holds() != recorded) {
    out.first_mismatch = std::string("certificate verdict changed to ") + to_string(out.certificate->verdict);
  }
  if (!out.first_mismatch.empty()) out.verdict = Verdict::fails;
  return out;
}

GroundCoupling solve_ground_coupling(const HermitianOperator& v, double tol) {
  const Index n = v.dim();
  if (!psd_check(v, tol).holds()) throw ValidationError("solve_ground_coupling: V must be positive semidefinite");
  GroundCoupling out;
  out.m = Matrix::Zero(n, n);
  out.default_l = Matrix::Zero(n, n);

  const CanonicalEigenbasis basis = canonical_eigenbasis(v, tol * std::max(1.0, max_abs(v.matrix())));
  const double cut = tol * std::max(1.0, max_abs(v.matrix()));
  std::vector<Index> positive;
  std::vector<Index> kernel;
  for (Index c = 0; c < n; ++c) (basis.values(c) > cut ? positive : kernel).push_back(c);

  if (positive.size() > kernel.size()) {
    out.supported = false;
    std::ostringstream os;
    os << "rank V = " << positive.size() << " exceeds dim ker V = " << kernel.size()
       << ": no lowering-pattern factorization V = M^dag M with M = [L, V]";
    out.explanation = os.str();
    return out;
  }
  const Matrix& u = basis.vectors;
  for (size_t i = 0; i < positive.size(); ++i) {
    const Vector e = u.col(positive[i]);
    const Vector g = u.col(kernel[i]);
    const double vi = basis.values(positive[i]);
    out.m += std::sqrt(vi) * g * e.adjoint();
    out.default_l += (1.0 / std::sqrt(vi)) * g * e.adjoint();
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (std::abs(basis.values(i) - basis.values(j)) <= cut) out.free_directions.push_back(u.col(i) * u.col(j).adjoint());
    }
  }
  if (positive.empty()) out.explanation = "V = 0: M = 0 and every L solves M = [L, V]";

  out.factorization_residual = max_abs(out.m.adjoint() * out.m - v.matrix());
  out.equation_residual = max_abs(commutator(out.default_l, v.matrix()) - out.m);

  const ModelSpec model(HermitianOperator(Matrix::Zero(n, n)), {out.default_l});
  out.generator = generator_heisenberg(model, v.matrix());
  CheckOptions co;
  co.tol = tol;
  out.lyapunov = check_lyapunov(model, v, co);
  out.ground_set = check_theorem8(model, v, tol);
  return out;
}

}  // namespace qmstab
