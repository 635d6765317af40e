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

#include "qmstab/generator.hpp"

#include <sstream>

namespace qmstab {

ModelSpec::ModelSpec(HermitianOperator hamiltonian, std::vector<Matrix> couplings,
                     std::vector<std::string> labels)
    : hamiltonian_(std::move(hamiltonian)),
      couplings_(std::move(couplings)),
      labels_(std::move(labels)) {
  if (couplings_.empty()) throw ValidationError("ModelSpec: at least one coupling operator is required");
  const Index n = hamiltonian_.dim();
  for (const auto& l : couplings_) require_dim(l, n, "ModelSpec coupling");
  if (!labels_.empty() && static_cast<Index>(labels_.size()) != n) {
    std::ostringstream os;
    os << "ModelSpec: " << labels_.size() << " basis labels for dimension " << n;
    throw DimensionError(os.str());
  }
  decay_sum_ = Matrix::Zero(n, n);
  for (const auto& l : couplings_) decay_sum_ += l.adjoint() * l;
}

Matrix dissipator(const ModelSpec& model, const Matrix& x) {
  require_dim(x, model.dim(), "dissipator");
  Matrix out = -0.5 * (model.decay_sum() * x + x * model.decay_sum());
  for (const auto& l : model.couplings()) out += l.adjoint() * x * l;
  return out;
}

Matrix generator_heisenberg(const ModelSpec& model, const Matrix& x) {
  require_dim(x, model.dim(), "generator_heisenberg");
  return -kI * commutator(x, model.h()) + dissipator(model, x);
}

Matrix generator_schroedinger(const ModelSpec& model, const Matrix& rho) {
  require_dim(rho, model.dim(), "generator_schroedinger");
  // -i (K rho - rho K^dag) with K = H - (i/2) sum L^dag L.
  const Matrix k = model.h() - 0.5 * kI * model.decay_sum();
  Matrix out = -kI * (k * rho - rho * k.adjoint());
  for (const auto& l : model.couplings()) out.noalias() += l * (rho * l.adjoint());
  return out;
}

Matrix generator_schroedinger(const ModelSpec& model, const DensityMatrix& rho) {
  return generator_schroedinger(model, rho.matrix());
}

Matrix dissipation_functional(const ModelSpec& model, const Matrix& x) {
  require_dim(x, model.dim(), "dissipation_functional");
  const Matrix xd = x.adjoint();
  return generator_heisenberg(model, xd * x) - generator_heisenberg(model, xd) * x -
         xd * generator_heisenberg(model, x);
}

Matrix dissipation_commutator_form(const ModelSpec& model, const Matrix& x) {
  require_dim(x, model.dim(), "dissipation_commutator_form");
  Matrix out = Matrix::Zero(model.dim(), model.dim());
  for (const auto& l : model.couplings()) {
    const Matrix c = commutator(x, l);
    out += c.adjoint() * c;
  }
  return out;
}

std::vector<DiffusionCoefficients> heisenberg_diffusion(const ModelSpec& model, const Matrix& x) {
  require_dim(x, model.dim(), "heisenberg_diffusion");
  std::vector<DiffusionCoefficients> out;
  out.reserve(model.couplings().size());
  for (const auto& l : model.couplings()) {
    const Matrix xl = commutator(x, l);
    const Matrix ldx = commutator(l.adjoint(), x);
    out.push_back({0.5 * (xl + ldx), 0.5 * kI * (ldx - xl)});
  }
  return out;
}

std::string to_string(Side s) { return s == Side::heisenberg ? "heisenberg" : "schroedinger"; }

Vector vec(const Matrix& x) { return Eigen::Map<const Vector>(x.data(), x.size()); }

Matrix unvec(const Vector& v, Index dim) {
  if (v.size() != dim * dim) throw DimensionError("unvec: vector length does not match dim^2");
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Superoperator liouvillian(const ModelSpec& model, Side side, Index dim_cap) {
  const Index n = model.dim();
  if (n > dim_cap) {
    std::ostringstream os;
    os << "liouvillian: dimension " << n << " exceeds the configured cap " << dim_cap;
    throw DimensionError(os.str());
  }
  const Matrix id = Matrix::Identity(n, n);
  const Matrix& h = model.h();
  const Matrix ks = model.decay_sum();
  Matrix m;
  if (side == Side::heisenberg) {
    // -i X H + i H X - 1/2 K X - 1/2 X K + sum L^dag X L
    m = -kI * kron(h.transpose(), id) + kI * kron(id, h) - 0.5 * kron(id, ks) -
        0.5 * kron(ks.transpose(), id);
    for (const auto& l : model.couplings()) m += kron(l.transpose(), l.adjoint());
  } else {
    // -i H rho + i rho H - 1/2 K rho - 1/2 rho K + sum L rho L^dag
    m = -kI * kron(id, h) + kI * kron(h.transpose(), id) - 0.5 * kron(id, ks) -
        0.5 * kron(ks.transpose(), id);
    for (const auto& l : model.couplings()) m += kron(l.conjugate(), l);
  }
  return {std::move(m), side, n};
}

}  // namespace qmstab
