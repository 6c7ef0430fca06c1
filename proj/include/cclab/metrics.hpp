// Copyright 2026 The cclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Distance and fidelity measures.
//
// NOTE: the trace norm here is the unnormalized sum of absolute eigenvalues,
// so trace_distance ranges over [0, 2] and orthogonal pure states are at
// distance 2. Many libraries halve this; we do not.

#include <cclab/qmat.hpp>

#include <string>
#include <vector>

namespace cclab {

inline double trace_norm(const Matrix& m) {
  return eigenvalues_hermitian(m).cwiseAbs().sum();
}

inline void require_same_layout(const Layout& a, const Layout& b, const char* what) {
  if (!(a == b)) throw Error(std::string(what) + ": layout mismatch");
}

inline double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_layout(rho.layout(), sigma.layout(), "trace_distance");
  return trace_norm(rho.matrix() - sigma.matrix());
}

// Blockwise distance of two direct sums; a record value present on one side
// only contributes its full weight.
inline double trace_distance(const MixedBlocks& rho, const MixedBlocks& sigma) {
  require_same_layout(rho.layout(), sigma.layout(), "trace_distance");
  double total = 0.0;
  for (const auto& b : rho.blocks()) {
    if (const auto* o = sigma.find(b.omega)) {
      total += trace_norm(b.prob * b.state.matrix() - o->prob * o->state.matrix());
    } else {
      total += b.prob;
    }
  }
  for (const auto& o : sigma.blocks()) {
    if (!rho.find(o.omega)) total += o.prob;
  }
  return total;
}

namespace detail {
inline Matrix spectral_factor(const Matrix& rho, std::size_t m, double rank_threshold);
}

// sqrt F = ||W_rho^dagger W_sigma||_1 for spectral factors W W^dagger = rho.
// Eigenvalues below kSpectralCut are treated as zero; taking square roots of
// eigensolver noise would otherwise cost about 8 digits on rank-deficient states.
inline double fidelity_matrix(const Matrix& rho, const Matrix& sigma) {
  const Matrix wr = detail::spectral_factor(rho, static_cast<std::size_t>(rho.rows()), kSpectralCut);
  const Matrix ws = detail::spectral_factor(sigma, static_cast<std::size_t>(sigma.rows()), kSpectralCut);
  const Matrix cross = wr.adjoint() * ws;
  const double s = Eigen::JacobiSVD<Matrix>(cross).singularValues().sum();
  return std::min(1.0, s * s);
}

// F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, in [0, 1].
inline double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_layout(rho.layout(), sigma.layout(), "fidelity");
  return fidelity_matrix(rho.matrix(), sigma.matrix());
}

inline double fidelity(const DensityOperator& rho, const PureState& psi) {
  require_same_layout(rho.layout(), psi.layout(), "fidelity");
  const Complex v = psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes();
  return std::clamp(v.real(), 0.0, 1.0);
}

// Fidelity of direct sums: (sum_omega sqrt(p_omega q_omega F_omega))^2.
inline double fidelity(const MixedBlocks& rho, const MixedBlocks& sigma) {
  require_same_layout(rho.layout(), sigma.layout(), "fidelity");
  double s = 0.0;
  for (const auto& b : rho.blocks()) {
    if (const auto* o = sigma.find(b.omega)) {
      s += std::sqrt(b.prob * o->prob * fidelity(b.state, o->state));
    }
  }
  return std::min(1.0, s * s);
}

struct FvdgResult {
  double lower = 0.0;
  double dist = 0.0;
  double upper = 0.0;
  bool ok = false;
};

// 2(1 - sqrt F) <= ||rho - sigma|| <= 2 sqrt(1 - F)
inline FvdgResult fvdg_check(const DensityOperator& rho, const DensityOperator& sigma, double tol = 1e-9) {
  const double f = fidelity(rho, sigma);
  FvdgResult r;
  r.lower = 2.0 * (1.0 - std::sqrt(f));
  r.dist = trace_distance(rho, sigma);
  r.upper = 2.0 * std::sqrt(std::max(0.0, 1.0 - f));
  r.ok = r.lower - tol <= r.dist && r.dist <= r.upper + tol;
  return r;
}

// ---------------------------------------------------------------------------
// purifications

namespace detail {

// n x m matrix W with W W^dagger = rho: columns sqrt(lambda_k) e_k, zero padded.
inline Matrix spectral_factor(const Matrix& rho, std::size_t m, double rank_threshold = kSpectralCut) {
  const auto e = eig_hermitian(rho);
  const auto n = rho.rows();
  Matrix w = Matrix::Zero(n, static_cast<Eigen::Index>(m));
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    const double lam = e.values(k);
    if (lam < -kNonPsdTol) throw Error("purify: state has a negative eigenvalue");
    if (lam <= rank_threshold) continue;
    if (k >= static_cast<Eigen::Index>(m)) throw Error("purify: extension dimension smaller than rank");
    w.col(k) = std::sqrt(lam) * e.vectors.col(k);
  }
  return w;
}

// Splits a pure state into the system/extension matrix W(s, x).
struct SplitState {
  Layout system;
  Layout extension;
  Matrix w;
};

inline SplitState split(const PureState& psi, const std::vector<std::string>& system_labels) {
  Layout system = psi.layout().select(system_labels);
  // keep the caller's ordering for the system part
  system = system.permuted(system_labels);
  std::vector<std::string> ext_labels;
  for (const auto& s : psi.layout().subsystems()) {
    if (!system.contains(s.label)) ext_labels.push_back(s.label);
  }
  Layout extension = psi.layout().select(ext_labels);
  std::vector<std::string> order = system_labels;
  order.insert(order.end(), ext_labels.begin(), ext_labels.end());
  const PureState r = reorder(psi, order);
  const auto n = static_cast<Eigen::Index>(system.total_dim());
  const auto m = static_cast<Eigen::Index>(extension.total_dim());
  Matrix w(n, m);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index x = 0; x < m; ++x) w(s, x) = r.amplitudes()(s * m + x);
  }
  return {std::move(system), std::move(extension), std::move(w)};
}

inline Vector flatten_factor(const Matrix& w) {
  Vector v(w.rows() * w.cols());
  for (Eigen::Index s = 0; s < w.rows(); ++s) {
    for (Eigen::Index x = 0; x < w.cols(); ++x) v(s * w.cols() + x) = w(s, x);
  }
  return v;
}

}  // namespace detail

// Spectral purification sum_k sqrt(lambda_k) |e_k>|k>. ext_dim = 0 picks the
// dimension of rho.
inline PureState purify(const DensityOperator& rho, const std::string& extension_label, std::size_t ext_dim = 0) {
  if (ext_dim == 0) ext_dim = rho.dim();
  const Matrix w = detail::spectral_factor(rho.matrix(), ext_dim);
  Layout layout = rho.layout().concat(Layout{{extension_label, ext_dim}});
  return PureState::normalized(std::move(layout), detail::flatten_factor(w));
}

// Given a purification phi_rho of rho on (system labels of tau) + extension,
// returns the purification of tau on the same space maximizing the overlap:
// |<phi_rho|phi_tau>|^2 = F(rho, tau). The extension is aligned with the
// polar unitary of the cross operator W_rho^dagger W_tau.
inline PureState uhlmann_extension(const PureState& phi_rho, const DensityOperator& tau) {
  const auto labels = tau.layout().labels();
  auto split = detail::split(phi_rho, labels);
  if (!(split.system == tau.layout())) throw Error("uhlmann: system layout mismatch");
  const std::size_t m = split.extension.total_dim();
  if (numerical_rank(tau.matrix()) > m) throw Error("uhlmann: extension dimension smaller than rank");
  const Matrix w_tau0 = detail::spectral_factor(tau.matrix(), m);
  const Matrix cross = split.w.adjoint() * w_tau0;
  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix align = svd.matrixV() * svd.matrixU().adjoint();
  const Matrix w_tau = w_tau0 * align;

  std::vector<std::string> order = labels;
  for (const auto& s : split.extension.subsystems()) order.push_back(s.label);
  Layout stacked = split.system.concat(split.extension);
  PureState out = PureState::normalized(std::move(stacked), detail::flatten_factor(w_tau));
  return reorder(out, phi_rho.layout().labels());
}

struct PurificationPair {
  PureState phi_rho;
  PureState phi_sigma;
  double overlap_sq = 0.0;
};

inline PurificationPair uhlmann_pair(const DensityOperator& rho, const DensityOperator& sigma,
                                     const std::string& extension_label, std::size_t ext_dim = 0) {
  require_same_layout(rho.layout(), sigma.layout(), "uhlmann_pair");
  if (ext_dim == 0) ext_dim = std::max<std::size_t>(1, std::max(numerical_rank(rho.matrix()), numerical_rank(sigma.matrix())));
  PureState phi_rho = purify(rho, extension_label, ext_dim);
  PureState phi_sigma = uhlmann_extension(phi_rho, sigma);
  const double ov = std::norm(phi_rho.amplitudes().dot(phi_sigma.amplitudes()));
  return {std::move(phi_rho), std::move(phi_sigma), std::min(1.0, ov)};
}

}  // namespace cclab
