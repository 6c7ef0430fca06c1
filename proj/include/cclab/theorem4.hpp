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

// Entanglement yields complementary control with a classical extra channel:
//   delta_Z <= delta_ent / 2,  delta_X <= delta_ent - (delta_ent / 2)^2.
//
// Primary: both parties measure Z, Bob's guess is his outcome.
// Secondary: Bob measures the Fourier basis and announces k, Alice applies
// sum_j w^{jk} |j><j| with w = exp(2 pi i / d). On the maximally entangled
// state this leaves A in |0_X> exactly; the bounds then follow from
// monotonicity of fidelity and trace distance under the protocol.

#include <cclab/certificate.hpp>
#include <cclab/channels.hpp>
#include <cclab/metrics.hpp>
#include <cclab/scenarios.hpp>
#include <cclab/theorem3.hpp>

#include <numbers>

namespace cclab {

inline LoccProtocol thm4_secondary(std::size_t d, const std::string& a = "A", const std::string& b = "B") {
  const Layout la{{a, d}};
  const Layout lb{{b, d}};
  LoccProtocol p{la, lb, {}};
  p.rounds.push_back(measurement_round(Party::Bob, lb, fourier_basis(d)));
  LoccRound corr{Party::Alice, la, 0, {}};
  const auto n = static_cast<Eigen::Index>(d);
  for (std::size_t k = 0; k < d; ++k) {
    Matrix ph = Matrix::Zero(n, n);
    for (std::size_t j = 0; j < d; ++j) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % d) / static_cast<double>(d);
      ph(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = std::polar(1.0, angle);
    }
    corr.instruments.push_back(Instrument{{{std::move(ph)}}});
  }
  p.rounds.push_back(std::move(corr));
  return p;
}

// Z measurement of `b` relabelled to the guess register.
inline KrausChannel standard_guess(std::size_t d, const std::string& b = "B", const std::string& g = "G") {
  const auto n = static_cast<Eigen::Index>(d);
  std::vector<Matrix> ks;
  for (Eigen::Index j = 0; j < n; ++j) {
    Matrix k = Matrix::Zero(n, n);
    k(j, j) = 1.0;
    ks.push_back(std::move(k));
  }
  return KrausChannel(Layout{{b, d}}, Layout{{g, d}}, std::move(ks));
}

struct Theorem4Result {
  ControlInstance instance;
  TheoremCertificate cert;
};

inline Theorem4Result thm4_run(const DensityOperator& rho_ab_in, std::size_t d, double tol = kBoundTol,
                               double identity_tol = kIdentityTol) {
  const Layout& l = rho_ab_in.layout();
  if (l.size() != 2 || l.subsystems()[0].dim != d || l.subsystems()[1].dim != d) {
    throw Error("thm4: state must be two subsystems of dim d");
  }
  const std::string a = l.subsystems()[0].label;
  const std::string b = l.subsystems()[1].label;
  const auto diag = validate_density(rho_ab_in);
  if (!diag.ok) throw Error("thm4: input is not a density operator");

  // Eve holds a purification
  const PureState psi = purify(rho_ab_in, "E", d * d);
  ControlInstance inst{PureBlocks({{0, 1.0, psi}}), standard_guess(d, b, "G"), thm4_secondary(d, a, b), {},
                       ExtraChannel::Classical, d, a, {"E"}};

  TheoremCertificate cert;
  cert.theorem = 4;
  cert.d = d;
  cert.tol = tol;

  const double dent = delta_ent(rho_ab_in, d);
  const double dz = std::max(0.0, delta_z(run_primary(inst)));
  const double dx = std::clamp(delta_x(run_secondary(inst), d), 0.0, 1.0);

  const KrausChannel sec = compiled(inst.secondary);
  const double dx_mes = delta_x(partial_trace(apply(sec, DensityOperator(mes(d, a, b))), {a}), d);
  cert.identity("secondary_exact_on_mes", dx_mes, 0.0, identity_tol);
  cert.identity("nondisturbing_residual", is_nondisturbing(sec, a, d).residual, 0.0, identity_tol);
  cert.bound("delta_z", dz, dent / 2.0);
  cert.bound("delta_x", dx, dent - dent * dent / 4.0);

  cert.quantities["delta_ent"] = dent;
  cert.quantities["delta_z"] = dz;
  cert.quantities["delta_x"] = dx;
  cert.finalize("delta_x");
  return {std::move(inst), std::move(cert)};
}

inline std::pair<ControlInstance, TheoremCertificate> thm4_build_control(const DensityOperator& rho_ab, std::size_t d,
                                                                        double tol = kBoundTol) {
  auto r = thm4_run(rho_ab, d, tol);
  return {std::move(r.instance), std::move(r.cert)};
}

// thm4 on rho_AB, then thm3 on the resulting classical-channel control
// (V = identity, Lambda = the Fourier secondary). Certifies the distilled
// imperfection against the classical-control errors and checks that both
// constructions see the same delta_Z and delta_X.
inline TheoremCertificate control_roundtrip(const DensityOperator& rho_ab, std::size_t d, double tol = kBoundTol,
                                            double identity_tol = kIdentityTol) {
  const auto t4 = thm4_run(rho_ab, d, tol, identity_tol);
  const std::string a = rho_ab.layout().subsystems()[0].label;
  const std::string b = rho_ab.layout().subsystems()[1].label;
  const CoherentPrimary primary{MixedBlocks({{0, 1.0, rho_ab}}), KrausChannel::identity(Layout{{a, d}}),
                                KrausChannel::identity(Layout{{b, d}}), d, a, b};
  const auto t3 = thm3_run(primary, std::get<LoccProtocol>(t4.instance.secondary), tol, identity_tol);

  const double dz = t4.cert.quantities.at("delta_z");
  const double dx = t4.cert.quantities.at("delta_x");
  TheoremCertificate cert;
  cert.theorem = 3;
  cert.d = d;
  cert.tol = tol;
  for (const auto* c : {&t4.cert, &t3.cert}) {
    for (const auto& chk : c->checks) {
      Check copy = chk;
      copy.name = "thm" + std::to_string(c->theorem) + "." + chk.name;
      cert.checks.push_back(std::move(copy));
    }
  }
  cert.identity("delta_z_consistent", t3.cert.quantities.at("delta_z"), dz, identity_tol);
  cert.identity("delta_x_consistent", t3.cert.quantities.at("delta_x"), dx, identity_tol);
  const double dent = t3.cert.quantities.at("delta_ent");
  cert.bound("delta_ent_roundtrip", dent, copy_lemma_bound(dz) + 2.0 * std::sqrt(dx));
  cert.quantities["delta_ent_input"] = t4.cert.quantities.at("delta_ent");
  cert.quantities["delta_ent"] = dent;
  cert.quantities["delta_z"] = dz;
  cert.quantities["delta_x"] = dx;
  cert.finalize("delta_ent_roundtrip");
  return cert;
}

}  // namespace cclab
