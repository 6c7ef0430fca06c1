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

// Complementary control with a quantum extra channel yields a key:
//   delta_key <= 2 delta_Z + 2 sqrt(delta_X).
//
// The certificate rebuilds the intermediate state sigma'_ABE (measure A of the
// secondary's output in Z, copy the outcome to Bob's register) and checks
// every link of the chain rho -- sigma' -- tau.

#include <cclab/certificate.hpp>
#include <cclab/channels.hpp>
#include <cclab/metrics.hpp>
#include <cclab/scenarios.hpp>

namespace cclab {

// Steps (a)+(b): Z-measure `key` and copy the outcome into a fresh register
// `copy` of dim d. Output layout: key, copy, then the remaining subsystems.
inline MixedBlocks measure_and_copy(const MixedBlocks& s, const std::string& key, const std::string& copy, std::size_t d) {
  const auto pinch = z_pinch(key, d);
  const auto cpy = copy_unitary(key, copy, d);
  std::vector<std::string> order{key, copy};
  for (const auto& l : s.layout().labels()) {
    if (l != key) order.push_back(l);
  }
  return map_blocks(s, [&](const DensityOperator& r) {
    auto with_copy = tensor(r, DensityOperator(ket(copy, d, 0)));
    return reorder(apply(cpy, apply(pinch, with_copy)), order);
  });
}

// sum_ij p_ij |ii><ii| (x) rho_E^(ij), built from the primary branch by
// overwriting the guess with the key value.
inline MixedBlocks align_guess(const MixedBlocks& joint, const std::string& key, const std::string& guess, std::size_t d) {
  const Layout scope{{key, d}, {guess, d}};
  const auto n = static_cast<Eigen::Index>(d * d);
  std::vector<Matrix> ks;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      Matrix k = Matrix::Zero(n, n);
      k(static_cast<Eigen::Index>(i * d + i), static_cast<Eigen::Index>(i * d + j)) = 1.0;
      ks.push_back(std::move(k));
    }
  }
  return apply(KrausChannel::in_place(scope, std::move(ks)), joint);
}

struct Theorem1Result {
  MixedBlocks rho_abe;      // primary output on (key, guess, Eve)
  MixedBlocks sigma_prime;  // secondary output, measured and copied
  MixedBlocks tau_abe;      // ideal key of the proof
  TheoremCertificate cert;
};

inline Theorem1Result thm1_run(const ControlInstance& inst, double tol = kBoundTol, double identity_tol = kIdentityTol) {
  const auto diag = check_instance(inst);
  if (!diag.ok) throw Error("thm1: " + diag.problems.front());
  const std::size_t d = inst.d;
  const std::string& a = inst.key_label;
  const std::string& g = inst.guess_label();

  TheoremCertificate cert;
  cert.theorem = 1;
  cert.d = d;
  cert.tol = tol;

  // primary branch
  const PrimaryOutcome primary = run_primary(inst);
  const double dz = delta_z(primary);
  const MixedBlocks& rho = primary.joint;

  // secondary branch, restricted to A and Eve
  std::vector<std::string> ae{a};
  ae.insert(ae.end(), inst.eve_labels.begin(), inst.eve_labels.end());
  const MixedBlocks sigma_ae = map_blocks(partial_trace(secondary_output(inst), ae),
                                          [&](const DensityOperator& r) { return reorder(r, ae); });
  const DensityOperator sigma_a = average(partial_trace(sigma_ae, {a}));
  const double dx = std::clamp(delta_x(sigma_a, d), 0.0, 1.0);

  // tau_AE = |0_X><0_X| (x) rho_E with rho_E proportional to <0_X|sigma_AE|0_X>
  const Layout eve_layout = sigma_ae.layout().without({a});
  const auto ne = static_cast<Eigen::Index>(eve_layout.total_dim());
  const Vector x = fourier_vector(d, 0);
  std::vector<std::pair<int, Matrix>> weighted;
  double total = 0.0;
  for (const auto& b : sigma_ae.blocks()) {
    Matrix xe = Matrix::Zero(ne, ne);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(d); ++i) {
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j) {
        xe += std::conj(x(i)) * x(j) * b.state.matrix().block(i * ne, j * ne, ne, ne);
      }
    }
    xe *= b.prob;
    total += xe.trace().real();
    weighted.emplace_back(b.omega, std::move(xe));
  }
  std::vector<Block<DensityOperator>> tau_blocks;
  for (std::size_t k = 0; k < weighted.size(); ++k) {
    auto& [omega, xe] = weighted[k];
    const double w = xe.trace().real();
    Matrix state = w > 1e-15 ? Matrix(xe / w) : partial_trace(sigma_ae.blocks()[k].state, eve_layout.labels()).matrix();
    state = (state + state.adjoint()).eval() / 2.0;
    const double prob = total > 1e-15 ? w / total : sigma_ae.blocks()[k].prob;
    tau_blocks.push_back({omega, prob, tensor(DensityOperator(x_plus(d, a)), DensityOperator(eve_layout, std::move(state)))});
  }
  const MixedBlocks tau_ae(std::move(tau_blocks));

  cert.identity("fidelity_sigma_tau_equals_1_minus_delta_x", fidelity(sigma_ae, tau_ae), 1.0 - dx, tol);
  const double bound_x = 2.0 * std::sqrt(dx);
  cert.bound("sigma_ae_vs_tau_ae", trace_distance(sigma_ae, tau_ae), bound_x);

  // steps (a), (b) on both states
  const MixedBlocks sigma_prime = measure_and_copy(sigma_ae, a, g, d);
  const MixedBlocks tau_abe = measure_and_copy(tau_ae, a, g, d);
  {
    const auto eve_part = partial_trace(tau_ae, eve_layout.labels());
    const auto ideal = map_blocks(ideal_key(d, eve_part, a, g), [&](const DensityOperator& r) {
      return reorder(r, tau_abe.layout().labels());
    });
    cert.identity("tau_abe_is_ideal_key", trace_distance(tau_abe, ideal), 0.0, identity_tol);
  }
  cert.bound("sigma_prime_vs_tau", trace_distance(sigma_prime, tau_abe), bound_x);

  // nondisturbing consistency: sigma'_AE = Tr_B rho_ABE, so sigma' is also
  // sum_ij p_ij |ii><ii| (x) rho_E^(ij)
  const MixedBlocks sigma_prime_primary = align_guess(rho, a, g, d);
  cert.identity("sigma_prime_consistency", trace_distance(sigma_prime, sigma_prime_primary), 0.0, identity_tol);

  cert.identity("sigma_prime_vs_rho_equals_2_delta_z", trace_distance(sigma_prime, rho), 2.0 * dz, identity_tol);

  const double dkey = trace_distance(rho, tau_abe);
  cert.bound("delta_key", dkey, 2.0 * dz + bound_x);

  const auto canonical = canonical_key_reference(rho, d, a, g);
  cert.quantities["delta_key_canonical"] = trace_distance(rho, canonical);
  cert.quantities["delta_z"] = dz;
  cert.quantities["delta_x"] = dx;
  cert.quantities["delta_key"] = dkey;
  cert.quantities["nondisturbing_residual"] = diag.nondisturbing_residual;
  cert.finalize("delta_key");
  return {rho, sigma_prime, tau_abe, std::move(cert)};
}

inline TheoremCertificate thm1_certificate(const ControlInstance& inst, double tol = kBoundTol) {
  return thm1_run(inst, tol).cert;
}

}  // namespace cclab
