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

// qmstab command-line driver. Machine output goes to files under --out;
// diagnostics go to standard error.
//
// Exit codes: 0 all checks hold, 1 a check fails, 2 inconclusive under
// --strict, 64 usage error, 65 malformed input, 70 numerical failure.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmstab/dynamics.hpp"
#include "qmstab/generator.hpp"
#include "qmstab/invariant.hpp"
#include "qmstab/io.hpp"
#include "qmstab/lyapunov.hpp"
#include "qmstab/operator_core.hpp"
#include "qmstab/synthesis.hpp"

namespace fs = std::filesystem;
using namespace qmstab;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitFormat = 65;
constexpr int kExitSoftware = 70;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string model;
  std::string v;
  std::string w;
  std::string rho0;
  std::optional<double> c;
  std::optional<double> d;
  double t_final = 20.0;
  int theorem = 5;
  std::string out;
  std::uint64_t seed = 1;
  double tol = kDefaultTol;
  std::string format = "json";
  bool strict = false;
  bool shift_v = false;
  int samples = -1;
  int steps = 200;
  std::string method = "auto";
  std::optional<Index> leading_block;
  double l = 1.0;
  bool no_compensate = false;
  bool ground = false;
  double threshold = 1e-5;
};

template <typename F>
auto load_input(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const FormatError& e) {
    throw InputError(what + ": " + e.what());
  } catch (const ValidationError& e) {
    throw InputError(what + ": " + e.what());
  } catch (const DimensionError& e) {
    throw InputError(what + ": " + e.what());
  }
}

ModelSpec require_model(const Options& o) {
  if (o.model.empty()) throw UsageError("--model is required for this command");
  return load_input("--model", [&] { return load_model(o.model); });
}

HermitianOperator load_hermitian(const std::string& path, const std::string& flag, Index dim) {
  return load_input(flag, [&] {
    Matrix m = load_matrix(path);
    require_dim(m, dim, flag.c_str());
    return HermitianOperator(std::move(m));
  });
}

// V with the optional shift to a PSD operator; the applied shift is recorded.
HermitianOperator load_v(const Options& o, Index dim, Report& rep) {
  if (o.v.empty()) throw UsageError("--v is required for this command");
  HermitianOperator v = load_hermitian(o.v, "--v", dim);
  if (o.shift_v) {
    const double lmin = hermitian_eigen(v.matrix()).values(0);
    const double shift = lmin < 0.0 ? -lmin : 0.0;
    rep.results()["v_shift"] = shift;
    if (shift > 0.0) v = HermitianOperator(v.matrix() + shift * identity(dim));
  }
  return v;
}

Method parse_method(const std::string& s) {
  if (s == "expm") return Method::expm_fixed;
  if (s == "rk") return Method::rk_adaptive;
  return Method::automatic;
}

EvolveOptions evolve_options(const Options& o) {
  EvolveOptions e;
  e.method = parse_method(o.method);
  e.samples = o.steps;
  return e;
}

fs::path out_dir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("QMSTAB_OUT_DIR"); env && *env) return env;
  return ".";
}

void emit(const Options& o, Report& rep, const std::string& command, const std::string& name,
          const std::vector<double>& t, const std::vector<double>& values) {
  if (o.format == "json") {
    rep.results()["series"][name] = {{"t", t}, {"value", values}};
    return;
  }
  const SeriesFormat f = o.format == "svg" ? SeriesFormat::svg : SeriesFormat::csv;
  const std::string file = command + "_" + name + "." + o.format;
  emit_series(t, values, out_dir(o) / file, f, name);
  rep.add_series(name, file);
}

Json state_json(const DensityMatrix& rho) { return matrix_to_json(rho.matrix()); }

void add_steady_state_checks(const ModelSpec& model, const Options& o, Report& rep) {
  SteadyStateOptions so;
  so.tol = o.tol;
  so.seed = o.seed;
  const auto ss = steady_states(model, so);
  bool reliable = true;
  double worst_residual = 0.0;
  Json states = Json::array();
  for (size_t i = 0; i < ss.states.size(); ++i) {
    reliable = reliable && ss.reliable[i];
    worst_residual = std::max(worst_residual, ss.residuals[i]);
    states.push_back({{"state", state_json(ss.states[i])},
                      {"rank", ss.ranks[i]},
                      {"faithful", static_cast<bool>(ss.faithful[i])},
                      {"reliable", static_cast<bool>(ss.reliable[i])},
                      {"cleanup_displacement", ss.cleanup_displacement[i]},
                      {"residual", ss.residuals[i]}});
  }
  const double residual_cap = 10.0 * o.tol * std::max(1.0, ss.liouvillian_norm);
  CheckRecord st{"steady_state", "Definition 1", Verdict::holds, o.tol};
  if (!reliable || worst_residual > residual_cap) st.verdict = Verdict::inconclusive;
  st.details = {{"null_dimension", ss.null_dimension},
                {"liouvillian_norm", ss.liouvillian_norm},
                {"max_residual", worst_residual},
                {"residual_cap", residual_cap}};
  rep.results()["steady_states"] = std::move(states);
  rep.add(std::move(st));

  for (size_t i = 0; i < ss.states.size(); ++i) {
    const auto f = faithfulness_check(ss.states[i], o.tol);
    CheckRecord fc{"faithfulness[" + std::to_string(i) + "]", "Definition 1",
                   f.faithful ? Verdict::holds : Verdict::fails, o.tol};
    fc.details = {{"rank", f.rank}, {"dim", model.dim()}};
    if (!f.faithful) fc.witness = matrix_to_json(f.support);
    rep.add(std::move(fc));

    const auto sub = subharmonicity_check(model, f.support, o.tol);
    CheckRecord sc{"subharmonic_support[" + std::to_string(i) + "]", "Proposition 1", sub.verdict, o.tol};
    sc.details = psd_to_json(sub);
    if (sub.verdict == Verdict::fails) {
      // Supports of stationary states are subharmonic; a miss means the rank
      // cut dropped eigenvalues that are positive but below tolerance.
      sc.verdict = Verdict::inconclusive;
      sc.details["note"] = "numerical support excludes eigenvalues below tolerance";
    }
    rep.add(std::move(sc));
  }
}

void add_uniqueness_check(const ModelSpec& model, const Options& o, Report& rep) {
  UniquenessOptions uo;
  uo.tol = o.tol;
  uo.seed = o.seed;
  const auto u = uniqueness_check(model, uo);
  Verdict v = Verdict::inconclusive;
  if (u.verdict == Uniqueness::unique) v = Verdict::holds;
  if (u.verdict == Uniqueness::not_unique) v = Verdict::fails;
  CheckRecord c{"uniqueness", "Theorem 3", v, o.tol};
  c.details = {{"classification", to_string(u.verdict)},
               {"algebra_dimension", u.algebra_dimension},
               {"span_stabilized", u.span_stabilized},
               {"word_length", u.word_length},
               {"commutant_dimension", u.commutant_dimension},
               {"null_dimension", u.null_dimension},
               {"notes", u.notes}};
  rep.add(std::move(c));
}

void add_connectivity_scan(const ModelSpec& model, const std::vector<Matrix>& family, const std::string& name,
                           const Options& o, Report& rep) {
  const auto scan = connectivity_scan(model, family);
  Json members = Json::array();
  for (const auto& m : scan.members) members.push_back({{"value", m.value}, {"connected", m.connected}});
  Json sums = Json::array();
  for (const auto& m : scan.partial_sums) sums.push_back({{"value", m.value}, {"connected", m.connected}});
  CheckRecord c{name, "Remark 1", scan.all_connected ? Verdict::holds : Verdict::fails, kConnectivityThreshold};
  c.details = {{"members", std::move(members)}, {"partial_sums", std::move(sums)}, {"caveat", scan.caveat}};
  if (scan.counterexample) c.witness = matrix_to_json(scan.counterexample->projection);
  (void)o;
  rep.add(std::move(c));
}

CheckOptions check_options(const Options& o) {
  CheckOptions co;
  co.tol = o.tol;
  co.leading_block = o.leading_block;
  return co;
}

void add_lyapunov_checks(const ModelSpec& model, const HermitianOperator& v, const Options& o, Report& rep) {
  if (o.c && o.d) {
    rep.add(certificate_check("weak_lyapunov", check_weak_lyapunov(model, v, *o.c, *o.d, check_options(o))));
  } else {
    rep.add(certificate_check("lyapunov", check_lyapunov(model, v, check_options(o))));
  }
  const auto coer = coercivity_assess(v);
  rep.results()["coercivity"] = {{"monotone_from", coer.monotone_from},
                                 {"coercive_pattern", coer.coercive_pattern},
                                 {"envelope_intercept", coer.envelope_intercept},
                                 {"envelope_slope", coer.envelope_slope},
                                 {"truncated", coer.truncated}};
}

int cmd_analyze(const Options& o, Report& rep) {
  const ModelSpec model = require_model(o);
  rep.results()["model"] = model_to_json(model);
  add_steady_state_checks(model, o, rep);
  add_uniqueness_check(model, o, rep);
  add_connectivity_scan(model, coordinate_family(model.dim()), "connectivity_coordinate", o, rep);
  if (!o.v.empty()) {
    const HermitianOperator v = load_v(o, model.dim(), rep);
    add_connectivity_scan(model, spectral_family(v), "connectivity_spectral_v", o, rep);
    add_lyapunov_checks(model, v, o, rep);
  }
  return 0;
}

int cmd_steady_state(const Options& o, Report& rep) {
  const ModelSpec model = require_model(o);
  add_steady_state_checks(model, o, rep);
  return 0;
}

int cmd_simulate(const Options& o, Report& rep) {
  const ModelSpec model = require_model(o);
  const Index n = model.dim();
  const DensityMatrix rho0 =
      o.rho0.empty() ? DensityMatrix::basis_state(0, n)
                     : load_input("--rho0", [&] {
                         Matrix m = load_matrix(o.rho0);
                         require_dim(m, n, "--rho0");
                         return DensityMatrix(std::move(m));
                       });
  const HermitianOperator v = o.v.empty() ? model.hamiltonian() : load_v(o, n, rep);
  const auto traj = evolve(model, rho0, o.t_final, evolve_options(o));
  rep.results()["integrator"] = {{"method", to_string(traj.steps.method)},
                                 {"accepted_steps", traj.steps.accepted},
                                 {"rejected_steps", traj.steps.rejected},
                                 {"renormalizations", traj.steps.renormalizations}};
  rep.results()["final_state"] = state_json(traj.states.back());

  const auto vs = expectation_series(traj, v);
  emit(o, rep, "simulate", o.v.empty() ? "H" : "V", traj.times, vs);
  std::optional<HermitianOperator> w;
  if (!o.w.empty()) {
    w = load_hermitian(o.w, "--w", n);
    emit(o, rep, "simulate", "W", traj.times, expectation_series(traj, *w));
  }

  double sup = 0.0;
  for (double x : vs) sup = std::max(sup, std::abs(x));
  CheckRecord b{"bounded_mean", "Definition 3", std::isfinite(sup) ? Verdict::holds : Verdict::fails, o.tol};
  b.details = {{"sup", sup}, {"final", vs.back()}};
  rep.add(std::move(b));

  if (o.c && o.d) {
    const auto mb = mean_bound_check(traj, v, *o.c, *o.d);
    CheckRecord c{"mean_bound", "Theorem 2", mb.verdict, 1e-6};
    c.details = {{"max_violation", mb.max_violation}, {"worst_time", traj.times[static_cast<size_t>(mb.worst_index)]}};
    rep.add(std::move(c));
  }
  if (w) {
    const auto diag = lasalle_diagnostics(traj, v, *w, o.c, o.d);
    CheckRecord c{"lasalle_diagnostics", "Theorem 5", diag.verdict, DiagnosticsOptions{}.w_threshold};
    c.details = {{"v_monotone", diag.v_monotone},
                 {"w_integral_estimate", std::isfinite(diag.w_integral_estimate) ? Json(diag.w_integral_estimate)
                                                                                : Json(nullptr)},
                 {"w_limit_estimate", diag.w_limit_estimate},
                 {"final_w", diag.final_w},
                 {"notes", diag.notes}};
    rep.add(std::move(c));
  }
  return 0;
}

int cmd_check_lyapunov(const Options& o, Report& rep) {
  const ModelSpec model = require_model(o);
  const HermitianOperator v = load_v(o, model.dim(), rep);
  add_lyapunov_checks(model, v, o, rep);
  return 0;
}

int cmd_check_lasalle(const Options& o, Report& rep) {
  const ModelSpec model = require_model(o);
  const Index n = model.dim();
  const HermitianOperator v = load_v(o, n, rep);
  if (o.theorem == 8) {
    const auto g = check_theorem8(model, v, o.tol);
    CheckRecord c{"ground_set_convergence", "Theorem 8", g.verdict, o.tol};
    c.details = ground_set_to_json(g);
    rep.add(std::move(c));
    return 0;
  }
  if (o.w.empty()) throw UsageError("--w is required for --theorem 5, 6 or 7");
  const HermitianOperator w = load_hermitian(o.w, "--w", n);
  const LaSalleTheorem t = o.theorem == 6 ? LaSalleTheorem::t6 : o.theorem == 7 ? LaSalleTheorem::t7 : LaSalleTheorem::t5;
  rep.add(certificate_check("lasalle_pair", check_lasalle_pair(model, v, w, t, std::nullopt, check_options(o))));

  const int samples = o.samples < 0 ? 0 : o.samples;
  if (samples > 0) {
    std::mt19937_64 rng(o.seed);
    Verdict worst = Verdict::holds;
    Json runs = Json::array();
    for (int s = 0; s < samples; ++s) {
      const auto traj = evolve(model, DensityMatrix(random_density(n, rng)), o.t_final, evolve_options(o));
      const auto diag = lasalle_diagnostics(traj, v, w, o.c, o.d);
      if (diag.verdict == Verdict::fails) worst = Verdict::fails;
      else if (diag.verdict == Verdict::inconclusive && worst == Verdict::holds) worst = Verdict::inconclusive;
      runs.push_back({{"verdict", to_string(diag.verdict)},
                      {"final_v", diag.final_v},
                      {"final_w", diag.final_w},
                      {"w_limit_estimate", diag.w_limit_estimate}});
    }
    CheckRecord c{"lasalle_diagnostics", "Theorem 5", worst, DiagnosticsOptions{}.w_threshold};
    c.details = {{"samples", samples}, {"t_final", o.t_final}, {"runs", std::move(runs)}};
    rep.add(std::move(c));
  }
  return 0;
}

int cmd_synthesize(const Options& o, Report& rep) {
  if (o.v.empty()) throw UsageError("--v is required for synthesize");
  std::optional<ModelSpec> model;
  if (!o.model.empty()) model = require_model(o);
  const HermitianOperator v = load_input("--v", [&] { return HermitianOperator(load_matrix(o.v)); });
  if (model && model->dim() != v.dim()) throw InputError("--v: dimension does not match --model");

  if (o.ground) {
    const auto g = solve_ground_coupling(v, o.tol);
    rep.results()["ground_coupling"] = ground_coupling_to_json(g);
    Verdict verdict = Verdict::fails;
    if (g.supported && g.lyapunov && g.ground_set) {
      verdict = g.lyapunov->holds() ? g.ground_set->verdict : Verdict::fails;
    }
    CheckRecord c{"ground_coupling", "Corollary 2", verdict, o.tol};
    c.details = {{"supported", g.supported}, {"explanation", g.explanation}};
    rep.add(std::move(c));
    if (g.supported) {
      const ModelSpec out(HermitianOperator(Matrix::Zero(v.dim(), v.dim())), {g.default_l});
      write_file_atomic(out_dir(o) / "synthesized_model.json", dump_json(model_to_json(out)));
    }
    return 0;
  }

  SynthesisSpec spec{v};
  if (model) spec.hamiltonian = model->hamiltonian();
  spec.default_l = Complex(o.l, 0.0);
  spec.compensate_hamiltonian = !o.no_compensate;
  spec.tol = o.tol;
  const auto res = synthesize_coupling(spec);
  rep.results()["synthesis"] = synthesis_to_json(res);
  CheckRecord c{"synthesis", "Definition 2", res.certified ? Verdict::holds : Verdict::fails, o.tol};
  c.details = {{"partial", res.partial}, {"certificate_shift", res.certificate_shift}, {"notes", res.notes}};
  rep.add(std::move(c));

  const ModelSpec assembled = assembled_model(res);
  const auto ver = verify_synthesis(res, assembled);
  CheckRecord vc{"verify_synthesis", "Definition 2", ver.verdict, 1e-10};
  vc.details = {{"max_deviation", ver.max_deviation}, {"first_mismatch", ver.first_mismatch}};
  rep.add(std::move(vc));
  write_file_atomic(out_dir(o) / "synthesized_model.json", dump_json(model_to_json(assembled)));
  return 0;
}

int cmd_probe(const Options& o, Report& rep) {
  const ModelSpec model = require_model(o);
  const HermitianOperator v = load_v(o, model.dim(), rep);
  ProbeOptions po;
  po.samples = o.samples < 0 ? 20 : o.samples;
  po.t_final = o.t_final;
  po.seed = o.seed;
  po.threshold = o.threshold;
  po.evolve = evolve_options(o);
  const auto pr = invariant_set_probe(model, v, po);
  CheckRecord c{"invariant_set_probe", "Theorem 8", pr.passes ? Verdict::holds : Verdict::fails, o.threshold};
  c.details = {{"samples", po.samples},
               {"t_final", po.t_final},
               {"max_final_v", pr.max_final_v},
               {"in_zero_set", pr.in_zero_set},
               {"final_v", pr.final_v},
               {"ground_set_hypotheses",
                pr.ground_set_hypotheses ? Json(to_string(*pr.ground_set_hypotheses)) : Json(nullptr)},
               {"notes", pr.notes}};
  rep.add(std::move(c));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qmstab: stability analysis of finite-dimensional quantum Markov semigroups"};
  app.require_subcommand(1);
  Options o;

  const std::map<std::string, int (*)(const Options&, Report&)> handlers = {
      {"analyze", cmd_analyze},
      {"steady-state", cmd_steady_state},
      {"simulate", cmd_simulate},
      {"check-lyapunov", cmd_check_lyapunov},
      {"check-lasalle", cmd_check_lasalle},
      {"synthesize", cmd_synthesize},
      {"probe-invariant-set", cmd_probe},
  };
  const std::map<std::string, std::string> blurbs = {
      {"analyze", "steady states, faithfulness, uniqueness, connectivity and optional Lyapunov checks"},
      {"steady-state", "stationary states of the master equation"},
      {"simulate", "integrate the master equation and emit <V> (and <W>) series"},
      {"check-lyapunov", "V >= 0 and G(V) <= 0, or G(V) <= -cV + dI with --c/--d"},
      {"check-lasalle", "LaSalle-type pair conditions (--theorem 5|6|7) or ground-set conditions (8)"},
      {"synthesize", "engineer couplings for a target V (--ground: couplings from M = [L, V])"},
      {"probe-invariant-set", "integrate random states and test convergence to {<V> = 0}"},
  };

  for (const auto& [name, blurb] : blurbs) {
    CLI::App* sub = app.add_subcommand(name, blurb);
    sub->add_option("--model", o.model, "model file (JSON)");
    sub->add_option("--v", o.v, "Lyapunov operator V (JSON complex matrix)");
    sub->add_option("--w", o.w, "operator W (JSON complex matrix)");
    sub->add_option("--rho0", o.rho0, "initial density matrix (JSON complex matrix); default |0><0|");
    sub->add_option("--c", o.c, "rate c > 0 of G(V) <= -cV + dI");
    sub->add_option("--d", o.d, "offset d >= 0 of G(V) <= -cV + dI");
    sub->add_option("--t-final", o.t_final, "integration horizon")->check(CLI::PositiveNumber);
    sub->add_option("--theorem", o.theorem, "LaSalle variant: 5, 6, 7 or 8 (ground set)")
        ->check(CLI::IsMember({5, 6, 7, 8}));
    sub->add_option("--out", o.out, "output directory (default $QMSTAB_OUT_DIR or .)");
    sub->add_option("--seed", o.seed, "seed for random initial states and iterative solvers");
    sub->add_option("--tol", o.tol, "relative tolerance for operator inequalities")->check(CLI::PositiveNumber);
    sub->add_option("--format", o.format, "series output: json (inline), csv or svg")
        ->check(CLI::IsMember({"json", "csv", "svg"}));
    sub->add_flag("--strict", o.strict, "exit 2 when any verdict is inconclusive");
    sub->add_flag("--shift-v", o.shift_v, "shift V by -lambda_min I when it is not positive semidefinite");
    sub->add_option("--samples", o.samples, "number of random initial states")->check(CLI::NonNegativeNumber);
    sub->add_option("--steps", o.steps, "output samples per trajectory")->check(CLI::PositiveNumber);
    sub->add_option("--method", o.method, "integrator: auto, expm or rk")->check(CLI::IsMember({"auto", "expm", "rk"}));
    sub->add_option("--leading-block", o.leading_block, "restrict the generator inequality to the leading k x k block");
    sub->add_option("--l", o.l, "coupling magnitude for synthesize");
    sub->add_flag("--no-compensate", o.no_compensate, "synthesize: leave the Hamiltonian cross term uncompensated");
    sub->add_flag("--ground", o.ground, "synthesize: solve M = [L, V] for ground-state couplings");
    sub->add_option("--threshold", o.threshold, "probe-invariant-set: bound on the final <V>");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Report rep(command, o.seed, o.tol);
  try {
    handlers.at(command)(o, rep);
    const fs::path path = out_dir(o) / (command + ".json");
    write_file_atomic(path, dump_json(rep.to_json()));
    for (const auto& c : rep.checks()) {
      std::cerr << c.name << " [" << c.anchor << "]: " << to_string(c.verdict) << "\n";
    }
    return rep.exit_code(o.strict);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSoftware;
  }
}
