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

#include "qmstab/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace qmstab {
namespace {

Matrix restrict_block(const Matrix& m, const CheckOptions& opts) {
  if (!opts.leading_block) return m;
  const Index k = *opts.leading_block;
  if (k < 1 || k > m.rows()) throw ValidationError("leading_block outside the operator dimension");
  return m.topLeftCorner(k, k);
}

Vector embed(const Vector& v, Index dim) {
  Vector out = Vector::Zero(dim);
  out.head(v.size()) = v;
  return out;
}

void require_psd_v(const HermitianOperator& v, double tol, const char* what) {
  const auto r = psd_check(v, tol);
  if (!r.holds()) {
    std::ostringstream os;
    os << what << ": V must be positive semidefinite (min eigenvalue " << r.min_eigenvalue << ")";
    throw ValidationError(os.str());
  }
}

// Records the outcome of "m >= 0" into the certificate. `m` must be the full
// (unrestricted) matrix; the block option is applied here.
void apply_psd(LyapunovCertificate& cert, const Matrix& m, const CheckOptions& opts, const std::string& key) {
  const Matrix block = restrict_block(m, opts);
  const auto r = psd_check_matrix(block, opts.tol);
  cert.metrics[key + ".min_eigenvalue"] = r.min_eigenvalue;
  if (!r.holds()) {
    cert.verdict = Verdict::fails;
    if (!cert.witness) cert.witness = Witness{r.min_eigenvalue, embed(*r.witness, m.rows())};
  }
}

LyapunovCertificate make_cert(const HermitianOperator& v, CertificateMode mode, const CheckOptions& opts,
                              std::string anchor) {
  LyapunovCertificate cert{v};
  cert.mode = mode;
  cert.tolerance = opts.tol;
  cert.anchor = std::move(anchor);
  cert.verdict = Verdict::holds;
  if (opts.leading_block) {
    cert.notes.push_back("generator inequality checked on the leading " + std::to_string(*opts.leading_block) +
                         "x" + std::to_string(*opts.leading_block) + " block");
  }
  return cert;
}

double spectral_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace

std::string to_string(CertificateMode m) {
  switch (m) {
    case CertificateMode::strict:
      return "strict";
    case CertificateMode::weak:
      return "weak";
    case CertificateMode::lasalle:
      return "lasalle";
    case CertificateMode::relaxed:
      return "relaxed";
    case CertificateMode::equality:
      return "equality";
  }
  return "strict";
}

std::string to_string(LaSalleTheorem t) {
  switch (t) {
    case LaSalleTheorem::t5:
      return "Theorem 5";
    case LaSalleTheorem::t6:
      return "Theorem 6";
    case LaSalleTheorem::t7:
      return "Theorem 7";
    case LaSalleTheorem::corollary1:
      return "Corollary 1";
  }
  return "Theorem 5";
}

LyapunovCertificate check_lyapunov(const ModelSpec& model, const HermitianOperator& v, const CheckOptions& opts) {
  require_dim(v.matrix(), model.dim(), "check_lyapunov");
  require_psd_v(v, opts.tol, "check_lyapunov");
  auto cert = make_cert(v, CertificateMode::strict, opts, "Definition 2");
  apply_psd(cert, -generator_heisenberg(model, v.matrix()), opts, "neg_generator");
  return cert;
}

LyapunovCertificate check_weak_lyapunov(const ModelSpec& model, const HermitianOperator& v, double c, double d,
                                        const CheckOptions& opts) {
  require_dim(v.matrix(), model.dim(), "check_weak_lyapunov");
  if (!(c > 0.0) || !(d >= 0.0)) throw ValidationError("check_weak_lyapunov: requires c > 0 and d >= 0");
  require_psd_v(v, opts.tol, "check_weak_lyapunov");
  auto cert = make_cert(v, CertificateMode::weak, opts, "Definition 2 (weak form)");
  cert.c = c;
  cert.d = d;
  const Matrix& vm = v.matrix();
  const Matrix slack = -generator_heisenberg(model, vm) - c * vm + d * identity(model.dim());
  apply_psd(cert, slack, opts, "slack");
  return cert;
}

CoercivityReport coercivity_assess(const HermitianOperator& v, double degeneracy_tol) {
  require_psd_v(v, kDefaultTol, "coercivity_assess");
  CoercivityReport r;
  r.spectral = spectral_decompose(v, degeneracy_tol);
  r.eigenvalues = hermitian_eigen(v.matrix()).values;
  const Index n = r.eigenvalues.size();

  Index i0 = n - 1;
  while (i0 > 0 && r.eigenvalues(i0) - r.eigenvalues(i0 - 1) > degeneracy_tol) --i0;
  r.monotone_from = i0;
  r.coercive_pattern = (n - i0) >= 2;
  r.truncated = true;

  if (r.coercive_pattern) {
    double slope = std::numeric_limits<double>::infinity();
    for (Index i = i0 + 1; i < n; ++i) slope = std::min(slope, r.eigenvalues(i) - r.eigenvalues(i - 1));
    double intercept = std::numeric_limits<double>::infinity();
    for (Index i = i0; i < n; ++i) intercept = std::min(intercept, r.eigenvalues(i) - slope * static_cast<double>(i));
    r.envelope_slope = slope;
    r.envelope_intercept = intercept;
  }
  return r;
}

TailBound tightness_tail_bound(const SpectralDecomposition& v, double c, double eps, Index min_index) {
  if (!(eps > 0.0)) throw ValidationError("tightness_tail_bound: eps must be positive");
  if (!(c >= 0.0)) throw ValidationError("tightness_tail_bound: c must be nonnegative");
  if (v.levels() == 0) throw ValidationError("tightness_tail_bound: empty spectral decomposition");
  if (min_index < 0 || min_index > v.levels()) throw ValidationError("tightness_tail_bound: min_index out of range");

  const Index dim = v.projections.front().rows();
  auto partial_sum = [&](Index m) {
    Matrix p = Matrix::Zero(dim, dim);
    for (Index i = 0; i < m; ++i) p += v.projections[static_cast<size_t>(i)];
    return p;
  };

  TailBound out;
  if (eps >= 1.0) {
    out.verdict = Verdict::holds;
    out.m = min_index;
    out.projection = partial_sum(min_index);
    out.explanation = "eps >= 1: the bound tr(rho P) > 1 - eps is vacuous";
    return out;
  }

  const double level = c / eps;
  Index first = -1;
  for (Index i = 0; i < v.levels(); ++i) {
    if (v.eigenvalues(i) >= level && v.eigenvalues(i) > 0.0) {
      first = i;
      break;
    }
  }
  if (first < 0) {
    std::ostringstream os;
    os << "spectrum never reaches c/eps = " << level << " within the available truncation (max eigenvalue "
       << v.eigenvalues(v.levels() - 1) << ")";
    out.verdict = Verdict::inconclusive;
    out.explanation = os.str();
    return out;
  }
  out.m = std::max(min_index, first);
  out.projection = partial_sum(out.m);
  out.verdict = Verdict::holds;
  std::ostringstream os;
  os << "levels below index " << out.m << " carry probability > 1 - " << eps << " for every state with <V> <= " << c;
  out.explanation = os.str();
  return out;
}

LyapunovCertificate check_lasalle_pair(const ModelSpec& model, const HermitianOperator& v,
                                       const HermitianOperator& w, LaSalleTheorem theorem,
                                       const std::optional<HermitianOperator>& u, const CheckOptions& opts) {
  require_dim(v.matrix(), model.dim(), "check_lasalle_pair V");
  require_dim(w.matrix(), model.dim(), "check_lasalle_pair W");
  require_psd_v(v, opts.tol, "check_lasalle_pair");
  if (theorem != LaSalleTheorem::t7 && !psd_check(w, opts.tol).holds()) {
    throw ValidationError("check_lasalle_pair: " + to_string(theorem) + " requires W >= 0");
  }

  const CertificateMode mode = theorem == LaSalleTheorem::t7           ? CertificateMode::equality
                               : theorem == LaSalleTheorem::corollary1 ? CertificateMode::relaxed
                                                                       : CertificateMode::lasalle;
  auto cert = make_cert(v, mode, opts, to_string(theorem));
  cert.w = w;

  const Matrix gv = generator_heisenberg(model, v.matrix());
  const Matrix gw = generator_heisenberg(model, w.matrix());
  cert.metrics["generator_w_norm"] = spectral_norm(restrict_block(gw, opts));

  switch (theorem) {
    case LaSalleTheorem::t5:
      apply_psd(cert, -gv - w.matrix(), opts, "lasalle_slack");
      cert.notes.push_back("||G(W)|| is finite in finite dimension; reported for the record");
      break;
    case LaSalleTheorem::t6:
      apply_psd(cert, -gv - w.matrix(), opts, "lasalle_slack");
      apply_psd(cert, -gw, opts, "neg_generator_w");
      break;
    case LaSalleTheorem::t7: {
      const Matrix diff = restrict_block(gv - w.matrix(), opts);
      const double residual = max_abs(diff);
      const double scale = std::max(1.0, max_abs(restrict_block(gv, opts)));
      cert.metrics["equality_residual"] = residual;
      if (residual > opts.tol * scale) cert.verdict = Verdict::fails;
      apply_psd(cert, -gw, opts, "neg_generator_w");
      cert.notes.push_back("requires <V(t)> bounded; automatic for V >= 0 with G(V) = W when G(W) <= 0 is certified");
      break;
    }
    case LaSalleTheorem::corollary1: {
      if (!u) throw ValidationError("check_lasalle_pair: Corollary 1 requires U");
      require_dim(u->matrix(), model.dim(), "check_lasalle_pair U");
      if (!psd_check(*u, opts.tol).holds()) throw ValidationError("check_lasalle_pair: U must be positive");
      cert.u = *u;
      apply_psd(cert, u->matrix() - w.matrix() - gv, opts, "relaxed_slack");
      cert.notes.push_back("integrability of <U(t)> must be confirmed by simulation");
      break;
    }
  }
  return cert;
}

GroundSetReport check_theorem8(const ModelSpec& model, const HermitianOperator& v, double tol) {
  require_dim(v.matrix(), model.dim(), "check_theorem8");
  require_psd_v(v, tol, "check_theorem8");
  GroundSetReport r;
  r.tolerance = tol;
  const Matrix& vm = v.matrix();
  const Matrix gv = generator_heisenberg(model, vm);

  r.generator_check = psd_check_matrix(-gv, tol);
  r.commutator_norm = max_abs(commutator(gv, vm));
  r.dissipation = dissipation_commutator_form(model, vm);

  const auto veig = hermitian_eigen(vm);
  const double vnorm = std::max(1.0, veig.values.cwiseAbs().maxCoeff());
  const Index n = model.dim();
  std::vector<Index> range_idx;
  for (Index i = 0; i < n; ++i)
    if (veig.values(i) > tol * vnorm) range_idx.push_back(i);
  r.kernel_dim = n - static_cast<Index>(range_idx.size());

  const auto deig = hermitian_eigen(r.dissipation);
  const double dnorm = std::max(1.0, deig.values.cwiseAbs().maxCoeff());
  std::vector<Index> dker_idx;
  for (Index i = 0; i < n; ++i)
    if (deig.values(i) <= tol * dnorm) dker_idx.push_back(i);

  if (!dker_idx.empty()) {
    Matrix q(n, static_cast<Index>(dker_idx.size()));
    for (size_t j = 0; j < dker_idx.size(); ++j) q.col(static_cast<Index>(j)) = deig.vectors.col(dker_idx[j]);
    r.kernel_leak = hermitian_eigen(q.adjoint() * vm * q).values.maxCoeff();
  }
  if (!range_idx.empty()) {
    Matrix q(n, static_cast<Index>(range_idx.size()));
    for (size_t j = 0; j < range_idx.size(); ++j) q.col(static_cast<Index>(j)) = veig.vectors.col(range_idx[j]);
    r.min_dissipation_off_kernel = hermitian_eigen(q.adjoint() * r.dissipation * q).values(0);
  }

  if (!r.generator_check.holds()) {
    r.verdict = Verdict::fails;
    r.notes.push_back("G(V) <= 0 fails");
    return r;
  }
  if (r.commutator_norm > tol * std::max(1.0, max_abs(gv)) * vnorm) {
    r.verdict = Verdict::fails;
    r.notes.push_back("[G(V), V] != 0");
    return r;
  }
  if (r.kernel_leak <= tol * vnorm) {
    r.verdict = Verdict::holds;
    if (range_idx.empty()) r.notes.push_back("V = 0: every state is a zero solution");
  } else {
    r.verdict = Verdict::inconclusive;
    r.notes.push_back("some state outside Z_V has <D(V)> = 0; the sufficient condition does not apply");
  }
  return r;
}

std::optional<LyapunovCertificate> lyapunov_search(const ModelSpec& model,
                                                   const std::vector<HermitianOperator>& basis, double c,
                                                   double d, const SearchOptions& opts) {
  if (basis.empty()) throw ValidationError("lyapunov_search: empty basis");
  if (!(c > 0.0) || !(d >= 0.0)) throw ValidationError("lyapunov_search: requires c > 0 and d >= 0");
  const Index n = model.dim();
  const auto nb = static_cast<Index>(basis.size());
  for (const auto& b : basis) require_dim(b.matrix(), n, "lyapunov_search basis");

  // Linear independence via the real Gram matrix tr(B_i B_j).
  Eigen::MatrixXd gram(nb, nb);
  for (Index i = 0; i < nb; ++i)
    for (Index j = 0; j < nb; ++j)
      gram(i, j) = (basis[static_cast<size_t>(i)].matrix() * basis[static_cast<size_t>(j)].matrix()).trace().real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ges(gram);
  if (ges.eigenvalues()(0) <= 1e-12 * std::max(1.0, ges.eigenvalues().cwiseAbs().maxCoeff())) {
    throw ValidationError("lyapunov_search: basis is linearly dependent");
  }

  const Matrix id = identity(n);
  auto is_identity_like = [&](const Matrix& b) {
    const Complex mean = b.trace() / static_cast<double>(n);
    return max_abs(b - mean * id) <= 1e-12 * std::max(1.0, max_abs(b));
  };

  // Is I in span(basis)? Least squares on the vectorized elements.
  Matrix stacked(n * n, nb);
  for (Index j = 0; j < nb; ++j) stacked.col(j) = vec(basis[static_cast<size_t>(j)].matrix());
  const Vector coeff = stacked.colPivHouseholderQr().solve(vec(id));
  const bool identity_free = (stacked * coeff - vec(id)).norm() <= 1e-10 * std::sqrt(static_cast<double>(n));

  std::vector<Matrix> dirs;  // simplex directions
  for (const auto& b : basis)
    if (!is_identity_like(b.matrix())) dirs.push_back(b.matrix());

  auto certify = [&](const Matrix& v) -> std::optional<LyapunovCertificate> {
    const Matrix herm = 0.5 * (v + v.adjoint());
    if (!psd_check_matrix(herm, opts.check.tol).holds()) return std::nullopt;
    auto cert = check_weak_lyapunov(model, HermitianOperator(herm), c, d, opts.check);
    if (!cert.holds()) return std::nullopt;
    cert.notes.push_back("found by lyapunov_search");
    return cert;
  };

  if (dirs.empty()) return certify(id);

  const auto k = static_cast<Index>(dirs.size());
  std::vector<Matrix> gen_dirs;  // G(B_j) + c B_j, restricted
  for (const auto& b : dirs) gen_dirs.push_back(restrict_block(generator_heisenberg(model, b) + c * b, opts.check));
  const Index block = gen_dirs.front().rows();
  const Matrix id_block = Matrix::Identity(block, block);

  struct Eval {
    double f = 0.0;
    Eigen::VectorXd grad_w;
    double grad_t = 0.0;
  };
  auto evaluate = [&](const Eigen::VectorXd& w, double t) {
    Matrix v = t * id;
    Matrix f = (d - c * t) * id_block;
    for (Index j = 0; j < k; ++j) {
      v += w(j) * dirs[static_cast<size_t>(j)];
      f -= w(j) * gen_dirs[static_cast<size_t>(j)];
    }
    Eval e;
    e.grad_w = Eigen::VectorXd::Zero(k);
    const auto ve = hermitian_eigen(v);
    for (Index i = 0; i < ve.values.size() && ve.values(i) < 0.0; ++i) {
      const double lam = ve.values(i);
      const Vector u = ve.vectors.col(i);
      e.f += lam * lam;
      for (Index j = 0; j < k; ++j)
        e.grad_w(j) += 2.0 * lam * (u.adjoint() * dirs[static_cast<size_t>(j)] * u)(0, 0).real();
      e.grad_t += 2.0 * lam;
    }
    const auto fe = hermitian_eigen(f);
    for (Index i = 0; i < fe.values.size() && fe.values(i) < 0.0; ++i) {
      const double lam = fe.values(i);
      const Vector u = fe.vectors.col(i);
      e.f += lam * lam;
      for (Index j = 0; j < k; ++j)
        e.grad_w(j) -= 2.0 * lam * (u.adjoint() * gen_dirs[static_cast<size_t>(j)] * u)(0, 0).real();
      e.grad_t -= 2.0 * lam * c;
    }
    return e;
  };

  // Euclidean projection onto the probability simplex.
  auto project_simplex = [](Eigen::VectorXd y) {
    Eigen::VectorXd s = y;
    std::sort(s.data(), s.data() + s.size(), std::greater<double>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (Index i = 0; i < s.size(); ++i) {
      cumsum += s(i);
      const double cand = (cumsum - 1.0) / static_cast<double>(i + 1);
      if (s(i) - cand > 0.0) theta = cand;
    }
    return Eigen::VectorXd((y.array() - theta).max(0.0));
  };

  auto assemble = [&](const Eigen::VectorXd& w, double t) {
    Matrix v = t * id;
    for (Index j = 0; j < k; ++j) v += w(j) * dirs[static_cast<size_t>(j)];
    return v;
  };

  std::mt19937_64 rng(opts.seed);
  std::exponential_distribution<double> expo(1.0);
  Eigen::VectorXd w(k);
  for (Index j = 0; j < k; ++j) w(j) = expo(rng);
  w /= w.sum();
  double t = 0.0;
  if (identity_free) t = std::max(0.0, -hermitian_eigen(assemble(w, 0.0)).values(0));

  Eval cur = evaluate(w, t);
  double step = 1.0;
  for (int iter = 0; iter < opts.max_iter && cur.f > 1e-26; ++iter) {
    bool improved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd w_new = project_simplex(w - step * cur.grad_w);
      const double t_new = identity_free ? t - step * cur.grad_t : 0.0;
      const Eval cand = evaluate(w_new, t_new);
      if (cand.f < cur.f) {
        w = w_new;
        t = t_new;
        cur = cand;
        improved = true;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return certify(assemble(w, t));
}

}  // namespace qmstab
