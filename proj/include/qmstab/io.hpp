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

// File formats. A complex matrix is a JSON array of rows whose entries are
// [re, im] pairs. A model file is
//   {"dim": n, "hamiltonian": M, "couplings": [M, ...], "labels": [...]}
// with "labels" optional. Reports are JSON documents whose only
// non-deterministic content is the top-level "timestamp" field.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmstab/dynamics.hpp"
#include "qmstab/generator.hpp"
#include "qmstab/invariant.hpp"
#include "qmstab/lyapunov.hpp"
#include "qmstab/operator_core.hpp"
#include "qmstab/synthesis.hpp"

namespace qmstab {

using Json = nlohmann::json;

inline constexpr const char* kToolName = "qmstab";
inline constexpr const char* kToolVersion = "1.0.0";

Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);
/// Throws FormatError on anything but a rectangular array of [re, im] rows.
Matrix matrix_from_json(const Json& j, const std::string& what);

Json model_to_json(const ModelSpec& model);
/// Throws FormatError for malformed JSON and ValidationError/DimensionError
/// for well-formed documents that do not describe a valid model.
ModelSpec model_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
ModelSpec load_model(const std::filesystem::path& path);
/// A bare complex matrix, or an object holding one under "matrix".
Matrix load_matrix(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Canonical serialization: two-space indent, trailing newline.
std::string dump_json(const Json& j);

enum class SeriesFormat { csv, svg };

/// CSV: header `t,value`, 17 significant digits. SVG: one labeled line
/// chart. Throws ValidationError on an empty or ragged series.
std::string render_series(const std::vector<double>& t, const std::vector<double>& values, SeriesFormat format,
                          const std::string& label = "value");
void emit_series(const std::vector<double>& t, const std::vector<double>& values, const std::filesystem::path& path,
                 SeriesFormat format, const std::string& label = "value");

struct CheckRecord {
  std::string name;
  std::string anchor;
  Verdict verdict = Verdict::inconclusive;
  double tolerance = kDefaultTol;
  Json details = Json::object();
  Json witness = nullptr;
};

class Report {
 public:
  Report(std::string command, std::uint64_t seed, double tol);

  void add(CheckRecord check);
  void add_series(const std::string& name, const std::string& file);
  Json& results() { return results_; }
  const std::vector<CheckRecord>& checks() const { return checks_; }

  /// 0 all hold, 1 any fails, 2 inconclusive present under `strict`.
  int exit_code(bool strict) const;

  Json to_json(bool with_timestamp = true) const;

 private:
  std::string command_;
  std::uint64_t seed_;
  double tol_;
  std::vector<CheckRecord> checks_;
  Json series_ = Json::array();
  Json results_ = Json::object();
};

Json psd_to_json(const PsdResult& r);
Json certificate_to_json(const LyapunovCertificate& c);
CheckRecord certificate_check(const std::string& name, const LyapunovCertificate& c);
Json ground_set_to_json(const GroundSetReport& r);
Json synthesis_to_json(const SynthesisResult& r);
Json ground_coupling_to_json(const GroundCoupling& g);

}  // namespace qmstab
