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

// Lindblad generators in both pictures, the dissipation functional, the
// diffusion coefficients and their matrix (superoperator) form.
//
// Every Lindblad term is summed over all coupling operators L_k; a model with
// a single coupling is a list of length one. The scattering matrix is the
// identity throughout.

#pragma once

#include <string>
#include <vector>

#include "qmstab/operator_core.hpp"

namespace qmstab {

class ModelSpec {
 public:
  /// Requires a non-empty coupling list with every L_k matching dim(H).
  ModelSpec(HermitianOperator hamiltonian, std::vector<Matrix> couplings,
            std::vector<std::string> labels = {});

  Index dim() const { return hamiltonian_.dim(); }
  const HermitianOperator& hamiltonian() const { return hamiltonian_; }
  const Matrix& h() const { return hamiltonian_.matrix(); }
  const std::vector<Matrix>& couplings() const { return couplings_; }
  /// Optional basis labels; empty or exactly dim entries.
  const std::vector<std::string>& labels() const { return labels_; }

  /// sum_k L_k^dag L_k
  const Matrix& decay_sum() const { return decay_sum_; }

 private:
  HermitianOperator hamiltonian_;
  std::vector<Matrix> couplings_;
  std::vector<std::string> labels_;
  Matrix decay_sum_;
};

/// sum_k (L_k^dag X L_k - 1/2 L_k^dag L_k X - 1/2 X L_k^dag L_k)
Matrix dissipator(const ModelSpec& model, const Matrix& x);

/// Heisenberg picture: -i[X, H] + dissipator(X).
Matrix generator_heisenberg(const ModelSpec& model, const Matrix& x);

/// Schroedinger picture: -i[H, rho] + sum_k (L rho L^dag - 1/2 {L^dag L, rho}).
/// Accepts any square matrix so it can act on non-state operators too.
Matrix generator_schroedinger(const ModelSpec& model, const Matrix& rho);
Matrix generator_schroedinger(const ModelSpec& model, const DensityMatrix& rho);

/// G(X^dag X) - G(X^dag) X - X^dag G(X), assembled from the generator.
Matrix dissipation_functional(const ModelSpec& model, const Matrix& x);

/// sum_k [X, L_k]^dag [X, L_k], the closed form of the dissipation functional.
Matrix dissipation_commutator_form(const ModelSpec& model, const Matrix& x);

struct DiffusionCoefficients {
  Matrix b;  // 1/2 ([X, L] + [L^dag, X])
  Matrix c;  // i/2 (-[X, L] + [L^dag, X])
};

/// One (B, C) pair per coupling operator.
std::vector<DiffusionCoefficients> heisenberg_diffusion(const ModelSpec& model, const Matrix& x);

enum class Side { heisenberg, schroedinger };

std::string to_string(Side s);

/// Column-stacking vectorization: vec(A X B) = (B^T kron A) vec(X).
Vector vec(const Matrix& x);
Matrix unvec(const Vector& v, Index dim);

struct Superoperator {
  Matrix matrix;  // dim^2 x dim^2
  Side side;
  Index dim;

  Matrix apply(const Matrix& x) const { return unvec(matrix * vec(x), dim); }
};

/// Largest system dimension for which a dense Liouvillian is built by default
/// (dim^4 complex entries; 80 -> ~650 MB).
inline constexpr Index kDefaultLiouvillianDimCap = 80;

Superoperator liouvillian(const ModelSpec& model, Side side,
                          Index dim_cap = kDefaultLiouvillianDimCap);

}  // namespace qmstab
