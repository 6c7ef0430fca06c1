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

// A distilled key yields complementary control with a quantum extra channel:
//   delta_Z <= delta_key / 2,  delta_X <= delta_key - (delta_key / 2)^2.
//
// Construction, per record value omega:
//   1. decohere the reference key over omega;
//   2. extend it to |Phi_tau> on the run's space with maximal overlap;
//   3. split |Phi_tau> = d^{-1/2} sum_i |i>_A |phi_i>, and build unitaries
//      U_i |phi_i> = |phi_0> on everything except A and Eve;
//   4. assemble the controlled unitary sum_i |i><i|_A (x) U_i.

#include <cclab/certificate.hpp>
#include <cclab/channels.hpp>
#include <cclab/metrics.hpp>
#include <cclab/scenarios.hpp>

#include <map>
#include <optional>

namespace cclab {

// Key distillation run coherently: one pure state per record value on
// (A, B, Eve..., auxiliaries...).
struct CoherentKeyRun {
  PureBlocks state;
  std::size_t d = 2;
  std::string alice = "A";
  std::string bob = "B";
  std::vector<std::string> eve{"E"};

  std::vector<std::string> aux_labels() const {
    std::vector<std::string> drop{alice, bob};
    drop.insert(drop.end(), eve.begin(), eve.end());
    return state.layout().without(drop).labels();
  }

  std::vector<std::string> key_labels() const {
    std::vector<std::string> k{alice, bob};
    k.insert(k.end(), eve.begin(), eve.end());
    return k;
  }
};

// Zero-pads `label` to `new_dim` (|psi> embedded in the larger space).
inline PureState pad_subsystem(const PureState& psi, const std::string& label, std::size_t new_dim) {
  std::vector<Subsystem> subs = psi.layout().subsystems();
  const std::size_t pos = psi.layout().position(label);
  if (new_dim < subs[pos].dim) throw Error("pad_subsystem: cannot shrink");
  subs[pos].dim = new_dim;
  Layout padded(subs);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(padded.total_dim()));
  for (std::size_t n = 0; n < psi.dim(); ++n) {
    v(static_cast<Eigen::Index>(padded.index(psi.layout().digits(n)))) = psi.amplitudes()(static_cast<Eigen::Index>(n));
  }
  return PureState(std::move(padded), std::move(v));
}

namespace detail {

// Modified Gram-Schmidt (two passes) over `candidates`, skipping vectors
// whose residual is below `skip`. Deterministic: candidates are used in order.
inline Matrix gram_schmidt_basis(const std::vector<Vector>& candidates, Eigen::Index n, double skip = 1e-8) {
  std::vector<Vector> basis;
  for (const auto& c : candidates) {
    if (static_cast<Eigen::Index>(basis.size()) == n) break;
    Vector v = c;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) v -= b * b.dot(v);
    }
    const double nv = v.norm();
    if (nv < skip) continue;
    basis.push_back(v / nv);
  }
  if (static_cast<Eigen::Index>(basis.size()) != n) throw Error("gram_schmidt: could not complete basis");
  Matrix m(n, n);
  for (Eigen::Index k = 0; k < n; ++k) m.col(k) = basis[static_cast<std::size_t>(k)];
  return m;
}

// Orthonormal basis whose leading vectors span `leading`, completed with
// standard basis vectors in index order.
inline Matrix completed_basis(const std::vector<Vector>& leading, Eigen::Index n) {
  std::vector<Vector> cands = leading;
  for (Eigen::Index k = 0; k < n; ++k) cands.push_back(Vector::Unit(n, k));
  return gram_schmidt_basis(cands, n);
}

}  // namespace detail

// Unitaries U_i on Y with U_i |phi_i> = |phi_0>, where |Phi> on (A, Y, E) is
// d^{-1/2} sum_i |i>_A |phi_i>_{YE} and every |phi_i> has E-marginal rho_E.
// Works in the eigenbasis {e_k} of rho_E: |phi_i> = sum_k |w_k^(i)>|e_k> with
// <w_k^(i)|w_l^(i)> = lambda_k delta_kl.
inline std::vector<Matrix> key_alignment_unitaries(const PureState& phi, const std::string& a, std::size_t d,
                                                   const std::vector<std::string>& y_labels,
                                                   const std::vector<std::string>& e_labels,
                                                   const DensityOperator& rho_e, double rank_threshold = 1e-12) {
  std::vector<std::string> order{a};
  order.insert(order.end(), y_labels.begin(), y_labels.end());
  order.insert(order.end(), e_labels.begin(), e_labels.end());
  const PureState r = reorder(phi, order);
  const Layout y = r.layout().select(y_labels).permuted(y_labels);
  const Layout e = r.layout().select(e_labels).permuted(e_labels);
  const auto ny = static_cast<Eigen::Index>(y.total_dim());
  const auto ne = static_cast<Eigen::Index>(e.total_dim());
  if (!(rho_e.layout() == e)) throw Error("key_alignment: Eve layout mismatch");

  const auto spec = eig_hermitian(rho_e.matrix());
  std::vector<std::vector<Vector>> u(d);
  for (std::size_t i = 0; i < d; ++i) {
    // W_i(y, e) = sqrt(d) <i|_A Phi
    Matrix w(ny, ne);
    const Eigen::Index base = static_cast<Eigen::Index>(i) * ny * ne;
    for (Eigen::Index yy = 0; yy < ny; ++yy) {
      for (Eigen::Index ee = 0; ee < ne; ++ee) w(yy, ee) = std::sqrt(static_cast<double>(d)) * r.amplitudes()(base + yy * ne + ee);
    }
    for (Eigen::Index k = 0; k < spec.values.size(); ++k) {
      const double lam = spec.values(k);
      if (lam <= rank_threshold) break;
      u[i].push_back(w * spec.vectors.col(k).conjugate() / std::sqrt(lam));
    }
  }
  const Matrix b0 = detail::completed_basis(u[0], ny);
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < d; ++i) {
    const Matrix bi = detail::completed_basis(u[i], ny);
    out.push_back(b0 * bi.adjoint());
  }
  return out;
}

struct Theorem2Result {
  std::map<int, KrausChannel> secondary;  // one controlled unitary per record value
  CoherentKeyRun run;                     // padded if the extension space was too small
  MixedBlocks tau_decohered;
  PureBlocks tau_extension;
  TheoremCertificate cert;
};

inline Theorem2Result thm2_build_secondary(const CoherentKeyRun& input_run,
                                           const std::optional<TripartiteKeyState>& tau_ref = std::nullopt,
                                           double tol = kBoundTol, double identity_tol = kIdentityTol) {
  const std::size_t d = input_run.d;
  const std::string& a = input_run.alice;
  const std::string& b = input_run.bob;
  const auto key_labels = input_run.key_labels();

  // Drop negligible blocks.
  std::vector<Block<PureState>> kept;
  for (const auto& blk : input_run.state.blocks()) {
    if (blk.prob >= 1e-12) kept.push_back(blk);
  }
  double kept_total = 0.0;
  for (const auto& blk : kept) kept_total += blk.prob;
  for (auto& blk : kept) blk.prob /= kept_total;
  CoherentKeyRun run{PureBlocks(std::move(kept)), d, a, b, input_run.eve};
  if (run.state.layout().dim(a) != d || run.state.layout().dim(b) != d) throw Error("thm2: key subsystems must have dim d");

  TheoremCertificate cert;
  cert.theorem = 2;
  cert.d = d;
  cert.tol = tol;

  // rho_ABE and the reference
  const MixedBlocks rho = map_blocks(run.state, [&](const PureState& psi) {
    return reorder(partial_trace(psi, key_labels), key_labels);
  });
  const TripartiteKeyState rho_key{rho, d, a, b};
  const TripartiteKeyState tau = tau_ref ? *tau_ref : TripartiteKeyState{canonical_key_reference(rho, d, a, b), d, a, b};
  const double dkey = delta_key(rho_key, tau);

  // 1. decoherence over the record
  MixedBlocks tau_dec = std::visit(
      [&](const auto& t) -> MixedBlocks {
        if constexpr (std::is_same_v<std::decay_t<decltype(t)>, MixedBlocks>) {
          return t;
        } else {
          if (!t.layout().contains("W")) return MixedBlocks({{0, 1.0, t}});
          return decohere_record(t, "W");
        }
      },
      tau.state);
  tau_dec = map_blocks(tau_dec, [&](const DensityOperator& r) { return reorder(r, key_labels); });
  const double dkey_dec = trace_distance(rho, tau_dec);
  cert.bound("decohered_reference_distance", dkey_dec, dkey);
  const double f_target = std::pow(std::max(0.0, 1.0 - dkey / 2.0), 2);
  const double f_dec = fidelity(rho, tau_dec);
  cert.bound("fidelity_after_decoherence", -f_dec, -f_target);

  // every decohered block must be an ideal key
  for (const auto& blk : tau_dec.blocks()) {
    const auto eve_part = partial_trace(blk.state, run.eve);
    const auto ideal = reorder(ideal_key(d, reorder(eve_part, run.eve), a, b), key_labels);
    if (trace_distance(blk.state, ideal) > 1e-8) throw Error("thm2: reference is not an ideal key");
  }

  // extension space sizing
  auto aux = run.aux_labels();
  std::size_t ext_dim = 1;
  for (const auto& l : aux) ext_dim *= run.state.layout().dim(l);
  std::size_t need = 1;
  for (const auto& blk : tau_dec.blocks()) need = std::max(need, numerical_rank(blk.state.matrix()));
  std::size_t padded_to = 0;
  if (need > ext_dim) {
    const std::string pad_label = run.state.layout().contains("B'") ? "B'" : (aux.empty() ? "B'" : aux.back());
    const std::size_t other = run.state.layout().contains(pad_label) ? ext_dim / run.state.layout().dim(pad_label) : ext_dim;
    padded_to = (need + other - 1) / other;
    run.state = map_blocks(run.state, [&](const PureState& psi) {
      if (psi.layout().contains(pad_label)) return pad_subsystem(psi, pad_label, padded_to);
      return tensor(psi, ket(pad_label, padded_to, 0));
    });
    aux = run.aux_labels();
  }
  cert.quantities["padded_dim"] = static_cast<double>(padded_to);

  // 2. blockwise extensions
  std::vector<std::string> y_labels{b};
  y_labels.insert(y_labels.end(), aux.begin(), aux.end());
  std::vector<Block<PureState>> ext_blocks;
  double overlap_sum = 0.0;
  for (const auto& tb : tau_dec.blocks()) {
    if (const auto* rb = run.state.find(tb.omega)) {
      PureState ext = uhlmann_extension(rb->state, tb.state);
      overlap_sum += std::sqrt(rb->prob * tb.prob) * std::abs(rb->state.amplitudes().dot(ext.amplitudes()));
      ext_blocks.push_back({tb.omega, tb.prob, std::move(ext)});
    } else {
      // record value never produced by the run: any purification on the same space
      const std::size_t naux = run.state.layout().total_dim() / tb.state.dim();
      const Matrix w = detail::spectral_factor(tb.state.matrix(), naux);
      Layout stacked = tb.state.layout().concat(run.state.layout().select(aux).permuted(aux));
      PureState ext = PureState::normalized(stacked, detail::flatten_factor(w));
      ext_blocks.push_back({tb.omega, tb.prob, reorder(ext, run.state.layout().labels())});
    }
  }
  PureBlocks tau_ext(std::move(ext_blocks));
  const double f_ext = std::min(1.0, overlap_sum * overlap_sum);
  cert.identity("extension_overlap_equals_fidelity", f_ext, f_dec, identity_tol);
  cert.bound("extension_fidelity", -f_ext, -f_target);

  // 3, 4. controlled unitaries
  Theorem2Result result{{}, run, tau_dec, tau_ext, {}};
  double nd_residual = 0.0;
  Layout y_layout = run.state.layout().select(y_labels).permuted(y_labels);
  for (const auto& eb : tau_ext.blocks()) {
    const auto rho_e = reorder(partial_trace(eb.state, run.eve), run.eve);
    const auto branches = key_alignment_unitaries(eb.state, a, d, y_labels, run.eve, rho_e);
    KrausChannel u = controlled_unitary(a, branches, y_layout);
    nd_residual = std::max(nd_residual, is_nondisturbing(u, a, d).residual);
    result.secondary.emplace(eb.omega, std::move(u));
  }
  for (const auto& rb : run.state.blocks()) {
    if (!result.secondary.count(rb.omega)) {
      result.secondary.emplace(rb.omega, KrausChannel::identity(Layout{{a, d}}.concat(y_layout)));
    }
  }
  cert.identity("nondisturbing_residual", nd_residual, 0.0, identity_tol);

  auto sigma_a_of = [&](const PureBlocks& s) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (const auto& blk : s.blocks()) {
      const auto out = apply(result.secondary.at(blk.omega), blk.state);
      m += blk.prob * partial_trace(out, {a}).matrix();
    }
    return DensityOperator(Layout{{a, d}}, std::move(m));
  };

  // exactness on the ideal extension
  const double dx_ideal = delta_x(sigma_a_of(tau_ext), d);
  cert.identity("delta_x_on_ideal_extension", dx_ideal, 0.0, identity_tol);

  // the real run
  const double dx = std::max(0.0, delta_x(sigma_a_of(run.state), d));
  const auto rho_ab = average(partial_trace(rho, {a, b}));
  double agree = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    agree += rho_ab.matrix()(static_cast<Eigen::Index>(i * d + i), static_cast<Eigen::Index>(i * d + i)).real();
  }
  const double dz = 1.0 - agree;
  cert.bound("delta_z", dz, dkey / 2.0);
  const double bound_x = dkey - dkey * dkey / 4.0;
  cert.bound("delta_x", dx, bound_x);

  cert.quantities["delta_key"] = dkey;
  cert.quantities["delta_key_decohered"] = dkey_dec;
  cert.quantities["delta_z"] = dz;
  cert.quantities["delta_x"] = dx;
  cert.quantities["delta_x_ideal"] = dx_ideal;
  cert.quantities["fidelity"] = f_dec;
  cert.quantities["nondisturbing_residual"] = nd_residual;
  cert.finalize("delta_x");
  result.cert = std::move(cert);
  return result;
}

// The secondary as a control instance (quantum extra channel) on the padded
// run, with Bob's guess reading B in the standard basis.
inline ControlInstance thm2_instance(const Theorem2Result& r) {
  const std::size_t d = r.run.d;
  const auto n = static_cast<Eigen::Index>(d);
  std::vector<Matrix> ks;
  for (Eigen::Index j = 0; j < n; ++j) {
    Matrix k = Matrix::Zero(n, n);
    k(j, j) = 1.0;
    ks.push_back(std::move(k));
  }
  KrausChannel guess(Layout{{r.run.bob, d}}, Layout{{"G", d}}, std::move(ks));
  ControlInstance inst{r.run.state, guess, r.secondary.begin()->second, {}, ExtraChannel::Quantum, d, r.run.alice, r.run.eve};
  for (const auto& [omega, ch] : r.secondary) inst.secondary_by_omega.emplace(omega, ch);
  return inst;
}

}  // namespace cclab
