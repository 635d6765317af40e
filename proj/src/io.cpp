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

#include "qmstab/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace qmstab {
namespace fs = std::filesystem;

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(Json::array({v(i).real(), v(i).imag()}));
  return out;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw FormatError(what + ": expected a non-empty array of rows");
  const auto rows = static_cast<Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw FormatError(what + ": row 0 is not a non-empty array");
  const auto cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw FormatError(what + ": row " + std::to_string(r) + " has the wrong length");
    }
    for (Index c = 0; c < cols; ++c) {
      const Json& e = row[static_cast<size_t>(c)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw FormatError(what + ": entry (" + std::to_string(r) + ", " + std::to_string(c) +
                          ") is not an [re, im] pair");
      }
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

Json model_to_json(const ModelSpec& model) {
  Json j = Json::object();
  j["dim"] = model.dim();
  j["hamiltonian"] = matrix_to_json(model.h());
  Json ls = Json::array();
  for (const auto& l : model.couplings()) ls.push_back(matrix_to_json(l));
  j["couplings"] = std::move(ls);
  if (!model.labels().empty()) j["labels"] = model.labels();
  return j;
}

ModelSpec model_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("model: expected a JSON object");
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) {
    throw FormatError("model: \"dim\" must be a positive integer");
  }
  const auto dim = static_cast<Index>(j["dim"].get<long long>());
  if (!j.contains("hamiltonian")) throw FormatError("model: missing \"hamiltonian\"");
  if (!j.contains("couplings") || !j["couplings"].is_array()) throw FormatError("model: \"couplings\" must be an array");
  Matrix h = matrix_from_json(j["hamiltonian"], "model hamiltonian");
  require_dim(h, dim, "model hamiltonian");
  std::vector<Matrix> ls;
  for (size_t k = 0; k < j["couplings"].size(); ++k) {
    ls.push_back(matrix_from_json(j["couplings"][k], "model coupling " + std::to_string(k)));
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    if (!j["labels"].is_array()) throw FormatError("model: \"labels\" must be an array of strings");
    for (const auto& s : j["labels"]) {
      if (!s.is_string()) throw FormatError("model: \"labels\" must be an array of strings");
      labels.push_back(s.get<std::string>());
    }
  }
  return ModelSpec(HermitianOperator(std::move(h)), std::move(ls), std::move(labels));
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

ModelSpec load_model(const fs::path& path) { return model_from_json(read_json_file(path)); }

Matrix load_matrix(const fs::path& path) {
  const Json j = read_json_file(path);
  if (j.is_object()) {
    if (!j.contains("matrix")) throw FormatError(path.string() + ": object without \"matrix\"");
    return matrix_from_json(j["matrix"], path.string());
  }
  return matrix_from_json(j, path.string());
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

namespace {

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

std::string render_svg(const std::vector<double>& t, const std::vector<double>& v, const std::string& label) {
  constexpr double W = 640, H = 400, L = 80, R = 20, T = 30, B = 50;
  const auto [tmin_it, tmax_it] = std::minmax_element(t.begin(), t.end());
  const auto [vmin_it, vmax_it] = std::minmax_element(v.begin(), v.end());
  double t0 = *tmin_it, t1 = *tmax_it, v0 = *vmin_it, v1 = *vmax_it;
  if (t1 <= t0) t1 = t0 + 1.0;
  if (v1 <= v0) {
    v0 -= 0.5;
    v1 += 0.5;
  }
  auto px = [&](double x) { return L + (x - t0) / (t1 - t0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - v0) / (v1 - v0) * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  os << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"14\">t</text>\n";
  os << "<text x=\"20\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
     << (T + H - B) / 2 << ")\">" << label << "</text>\n";
  os << "<text x=\"" << L << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt("%.4g", t0)
     << "</text>\n";
  os << "<text x=\"" << W - R << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
     << fmt("%.4g", t1) << "</text>\n";
  os << "<text x=\"" << L - 6 << "\" y=\"" << H - B << "\" text-anchor=\"end\" font-size=\"11\">" << fmt("%.4g", v0)
     << "</text>\n";
  os << "<text x=\"" << L - 6 << "\" y=\"" << T + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << fmt("%.4g", v1)
     << "</text>\n";
  os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (size_t i = 0; i < t.size(); ++i) {
    if (i) os << ' ';
    os << fmt("%.2f", px(t[i])) << ',' << fmt("%.2f", py(v[i]));
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

}  // namespace

std::string render_series(const std::vector<double>& t, const std::vector<double>& values, SeriesFormat format,
                          const std::string& label) {
  if (t.empty()) throw ValidationError("emit_series: empty series");
  if (t.size() != values.size()) throw ValidationError("emit_series: time and value lengths differ");
  if (format == SeriesFormat::svg) return render_svg(t, values, label);
  std::string out = "t,value\n";
  for (size_t i = 0; i < t.size(); ++i) out += fmt("%.17g", t[i]) + "," + fmt("%.17g", values[i]) + "\n";
  return out;
}

void emit_series(const std::vector<double>& t, const std::vector<double>& values, const fs::path& path,
                 SeriesFormat format, const std::string& label) {
  write_file_atomic(path, render_series(t, values, format, label));
}

Report::Report(std::string command, std::uint64_t seed, double tol)
    : command_(std::move(command)), seed_(seed), tol_(tol) {}

void Report::add(CheckRecord check) { checks_.push_back(std::move(check)); }

void Report::add_series(const std::string& name, const std::string& file) {
  series_.push_back({{"name", name}, {"file", file}});
}

int Report::exit_code(bool strict) const {
  bool inconclusive = false;
  for (const auto& c : checks_) {
    if (c.verdict == Verdict::fails) return 1;
    if (c.verdict == Verdict::inconclusive) inconclusive = true;
  }
  return inconclusive && strict ? 2 : 0;
}

Json Report::to_json(bool with_timestamp) const {
  Json j = Json::object();
  j["metadata"] = {{"tool", kToolName},
                   {"version", kToolVersion},
                   {"command", command_},
                   {"seed", seed_},
                   {"tolerances",
                    {{"operator_inequality", tol_},
                     {"hermiticity", kHermiticityTol},
                     {"density", kDensityTol},
                     {"degeneracy", kDefaultDegeneracyTol}}}};
  Json cs = Json::array();
  for (const auto& c : checks_) {
    cs.push_back({{"name", c.name},
                  {"anchor", c.anchor},
                  {"verdict", to_string(c.verdict)},
                  {"tolerance", c.tolerance},
                  {"details", c.details},
                  {"witness", c.witness}});
  }
  j["checks"] = std::move(cs);
  j["results"] = results_;
  j["series"] = series_;
  if (with_timestamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    j["timestamp"] = buf;
  }
  return j;
}

Json psd_to_json(const PsdResult& r) {
  Json j = {{"verdict", to_string(r.verdict)}, {"min_eigenvalue", r.min_eigenvalue}, {"threshold", r.threshold}};
  if (r.witness) j["witness"] = vector_to_json(*r.witness);
  return j;
}

Json certificate_to_json(const LyapunovCertificate& c) {
  Json j = {{"mode", to_string(c.mode)},
            {"anchor", c.anchor},
            {"verdict", to_string(c.verdict)},
            {"tolerance", c.tolerance},
            {"c", c.c},
            {"d", c.d},
            {"v", matrix_to_json(c.v.matrix())}};
  if (c.w) j["w"] = matrix_to_json(c.w->matrix());
  if (c.u) j["u"] = matrix_to_json(c.u->matrix());
  Json metrics = Json::object();
  for (const auto& [k, val] : c.metrics) metrics[k] = std::isfinite(val) ? Json(val) : Json(nullptr);
  j["metrics"] = std::move(metrics);
  j["notes"] = c.notes;
  if (c.witness) j["witness"] = {{"eigenvalue", c.witness->eigenvalue}, {"state", vector_to_json(c.witness->state)}};
  return j;
}

CheckRecord certificate_check(const std::string& name, const LyapunovCertificate& c) {
  CheckRecord r{name, c.anchor, c.verdict, c.tolerance};
  Json metrics = Json::object();
  for (const auto& [k, val] : c.metrics) metrics[k] = std::isfinite(val) ? Json(val) : Json(nullptr);
  r.details = {{"mode", to_string(c.mode)}, {"metrics", std::move(metrics)}, {"notes", c.notes}};
  if (c.witness) r.witness = {{"eigenvalue", c.witness->eigenvalue}, {"state", vector_to_json(c.witness->state)}};
  return r;
}

Json ground_set_to_json(const GroundSetReport& r) {
  return {{"verdict", to_string(r.verdict)},
          {"generator_check", psd_to_json(r.generator_check)},
          {"commutator_norm", r.commutator_norm},
          {"kernel_leak", r.kernel_leak},
          {"min_dissipation_off_kernel", r.min_dissipation_off_kernel},
          {"kernel_dim", r.kernel_dim},
          {"dissipation", matrix_to_json(r.dissipation)},
          {"tolerance", r.tolerance},
          {"notes", r.notes}};
}

Json synthesis_to_json(const SynthesisResult& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    Json pj = {{"higher", p.pair.higher},
               {"lower", p.pair.lower},
               {"l", Json::array({p.pair.l.real(), p.pair.l.imag()})},
               {"case", to_string(p.kind)},
               {"gap", p.gap}};
    if (p.block.size() > 0) pj["block"] = matrix_to_json(p.block);
    if (p.coupling) pj["coupling"] = matrix_to_json(*p.coupling);
    pairs.push_back(std::move(pj));
  }
  Json couplings = Json::array();
  for (const auto& l : r.couplings) couplings.push_back(matrix_to_json(l));
  std::vector<double> values(r.basis.values.data(), r.basis.values.data() + r.basis.values.size());
  return {{"eigenvalues_descending", values},
          {"eigenbasis", matrix_to_json(r.basis.vectors)},
          {"permutation", r.basis.permutation},
          {"couplings", std::move(couplings)},
          {"pairs", std::move(pairs)},
          {"generator", matrix_to_json(r.generator)},
          {"generator_eigenbasis", matrix_to_json(r.generator_eigenbasis)},
          {"certificate", r.certificate ? certificate_to_json(*r.certificate) : Json(nullptr)},
          {"certificate_shift", r.certificate_shift},
          {"certified", r.certified},
          {"partial", r.partial},
          {"notes", r.notes}};
}

Json ground_coupling_to_json(const GroundCoupling& g) {
  Json j = {{"supported", g.supported}, {"explanation", g.explanation}};
  if (!g.supported) return j;
  Json free = Json::array();
  for (const auto& f : g.free_directions) free.push_back(matrix_to_json(f));
  j["m"] = matrix_to_json(g.m);
  j["default_l"] = matrix_to_json(g.default_l);
  j["free_directions"] = std::move(free);
  j["factorization_residual"] = g.factorization_residual;
  j["equation_residual"] = g.equation_residual;
  j["generator"] = matrix_to_json(g.generator);
  if (g.lyapunov) j["lyapunov"] = certificate_to_json(*g.lyapunov);
  if (g.ground_set) j["ground_set"] = ground_set_to_json(*g.ground_set);
  return j;
}

}  // namespace qmstab
