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

// Regenerates the files under fixtures/ in canonical serialization.
// Usage: qmstab_make_fixtures <dir>

#include <cmath>
#include <filesystem>
#include <iostream>

#include "qmstab/io.hpp"

using namespace qmstab;
namespace fs = std::filesystem;

namespace {

void put_model(const fs::path& dir, const std::string& name, const ModelSpec& m) {
  write_file_atomic(dir / name, dump_json(model_to_json(m)));
}

void put_matrix(const fs::path& dir, const std::string& name, const Matrix& m) {
  write_file_atomic(dir / name, dump_json(matrix_to_json(m)));
}

Matrix diag(std::initializer_list<double> d) {
  Matrix m = Matrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) {
    m(i, i) = x;
    ++i;
  }
  return m;
}

ModelSpec oscillator(Index n) {
  const Matrix a = ladder_lowering(n);
  return ModelSpec(HermitianOperator(number_operator(n)), {1.0 * a, 0.5 * a.adjoint()});
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: qmstab_make_fixtures <dir>\n";
    return 64;
  }
  const fs::path dir = argv[1];

  put_model(dir, "twolevel.json",
            ModelSpec(HermitianOperator(pauli(PauliAxis::z)), {pauli(PauliAxis::x)}, {"0", "1"}));

  put_model(dir, "qubit7.json", ModelSpec(HermitianOperator(Matrix::Zero(2, 2)), {sigma_minus()}, {"0", "1"}));
  put_matrix(dir, "qubit7_V.json", diag({1.0, 0.0}));
  put_matrix(dir, "excited.json", diag({1.0, 0.0}));

  const double l = 1.0 / std::sqrt(2.0);
  const std::vector<std::string> labels = {"00", "01", "10", "11"};
  const Matrix l1 = l * ket_bra(1, 0, 4);
  const Matrix l2 = l * ket_bra(3, 1, 4);
  Matrix h = Matrix::Zero(4, 4);
  h(0, 1) = Complex(0.0, -0.5);
  h(1, 0) = Complex(0.0, 0.5);
  put_model(dir, "twoqubit_noh.json", ModelSpec(HermitianOperator(Matrix::Zero(4, 4)), {l1, l2}, labels));
  put_model(dir, "twoqubit.json", ModelSpec(HermitianOperator(h), {l1, l2}, labels));
  put_model(dir, "twoqubit_refined.json", ModelSpec(HermitianOperator(h), {l1, l2, l * ket_bra(3, 2, 4)}, labels));
  put_matrix(dir, "twoqubit_V_raw.json", diag({2.0, 0.0, 0.0, -2.0}));
  put_matrix(dir, "twoqubit_V.json", diag({4.0, 2.0, 2.0, 0.0}));
  Matrix w = Matrix::Zero(4, 4);
  w.topLeftCorner(2, 2).setConstant(0.5);
  put_matrix(dir, "twoqubit_W.json", w);

  put_model(dir, "oscillator_n40.json", oscillator(40));
  put_model(dir, "oscillator_n60.json", oscillator(60));
  put_matrix(dir, "number_n40.json", number_operator(40));
  return 0;
}
