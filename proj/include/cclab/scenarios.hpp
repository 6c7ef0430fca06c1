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

// Protocol-level objects: ideal keys, maximally entangled states, the error
// functionals of complementary control, and instances binding a primary
// (agree on Z) and a secondary (steer A into |0_X>) protocol to one
// post-communication state.

#include <cclab/certificate.hpp>
#include <cclab/channels.hpp>
#include <cclab/metrics.hpp>
#include <cclab/qmat.hpp>

#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cclab {

// |k_X> = d^{-1/2} sum_j exp(2 pi i j k / d) |j>
inline Vector fourier_vector(std::size_t d, std::size_t k) {
  Vector v(static_cast<Eigen::Index>(d));
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t j = 0; j < d; ++j) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>((j * k) % d) / static_cast<double>(d);
    v(static_cast<Eigen::Index>(j)) = norm * Complex(std::cos(phase), std::sin(phase));
  }
  return v;
}

// Columns are |0_X>, ..., |(d-1)_X>.
inline Matrix fourier_basis(std::size_t d) {
  Matrix f(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < d; ++k) f.col(static_cast<Eigen::Index>(k)) = fourier_vector(d, k);
  return f;
}

// |0_X> = d^{-1/2} sum_i |i>, no phases.
inline PureState x_plus(std::size_t d, const std::string& label = "A") {
  return PureState(Layout{{label, d}}, fourier_vector(d, 0));
}

inline PureState mes(std::size_t d, const std::string& a = "A", const std::string& b = "B") {
  if (d < 2) throw Error("mes: d must be at least 2");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(d * d));
  for (std::size_t i = 0; i < d; ++i) v(static_cast<Eigen::Index>(i * d + i)) = 1.0 / std::sqrt(static_cast<double>(d));
  return PureState(Layout{{a, d}, {b, d}}, std::move(v));
}

// d^{-1} sum_i |ii><ii| (x) rho_E
inline DensityOperator ideal_key(std::size_t d, const DensityOperator& rho_e, const std::string& a = "A",
                                 const std::string& b = "B") {
  if (d < 2) throw Error("ideal_key: d must be at least 2");
  const auto n = static_cast<Eigen::Index>(d * d);
  Matrix key = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < d; ++i) {
    key(static_cast<Eigen::Index>(i * d + i), static_cast<Eigen::Index>(i * d + i)) = 1.0 / static_cast<double>(d);
  }
  return tensor(DensityOperator(Layout{{a, d}, {b, d}}, std::move(key)), rho_e);
}

inline MixedBlocks ideal_key(std::size_t d, const MixedBlocks& rho_e, const std::string& a = "A",
                             const std::string& b = "B") {
  return map_blocks(rho_e, [&](const DensityOperator& r) { return ideal_key(d, r, a, b); });
}

// ---------------------------------------------------------------------------
// key states and delta_key

struct TripartiteKeyState {
  // A flat operator may carry the record as an explicit subsystem (see flatten()).
  std::variant<DensityOperator, MixedBlocks> state;
  std::size_t d = 2;
  std::string alice = "A";
  std::string bob = "B";
};

inline std::vector<std::string> labels_except(const Layout& layout, const std::vector<std::string>& drop) {
  return layout.without(drop).labels();
}

// Reference key with rho_E^(omega) the non-AB marginal of each block.
inline MixedBlocks canonical_key_reference(const MixedBlocks& rho, std::size_t d, const std::string& a = "A",
                                           const std::string& b = "B") {
  const auto eve = labels_except(rho.layout(), {a, b});
  if (eve.empty()) throw Error("canonical_key_reference: no Eve subsystem");
  auto ref = ideal_key(d, partial_trace(rho, eve), a, b);
  return map_blocks(ref, [&](const DensityOperator& r) { return reorder(r, rho.layout().labels()); });
}

// ||rho_ABE - tau_ABE||, blockwise for direct sums. A direct sum compared to a
// flat operator is flattened onto the flat operator's record register "W".
inline double delta_key(const TripartiteKeyState& rho, const TripartiteKeyState& tau) {
  if (rho.d != tau.d) throw Error("delta_key: key dimension mismatch");
  return std::visit(
      [](const auto& r, const auto& t) -> double {
        using R = std::decay_t<decltype(r)>;
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<R, T>) {
          return trace_distance(r, t);
        } else if constexpr (std::is_same_v<R, MixedBlocks>) {
          const auto flat = flatten(r, "W");
          return trace_distance(flat, reorder(t, flat.layout().labels()));
        } else {
          const auto flat = flatten(t, "W");
          return trace_distance(reorder(r, flat.layout().labels()), flat);
        }
      },
      rho.state, tau.state);
}

// ---------------------------------------------------------------------------
// error functionals

inline double delta_z(const Eigen::MatrixXd& p) { return 1.0 - p.trace(); }

inline double delta_x(const DensityOperator& sigma_a, std::size_t d) {
  if (sigma_a.layout().size() != 1 || sigma_a.dim() != d) throw Error("delta_x: expected a single subsystem of dim d");
  const Vector x = fourier_vector(d, 0);
  const Complex v = x.adjoint() * sigma_a.matrix() * x;
  return 1.0 - v.real();
}

// Same quantity through the general fidelity routine.
inline double delta_x_via_fidelity(const DensityOperator& sigma_a, std::size_t d) {
  const auto label = sigma_a.layout().subsystems().front().label;
  return 1.0 - fidelity(sigma_a, DensityOperator(x_plus(d, label)));
}

inline double delta_ent(const DensityOperator& rho_ab, std::size_t d) {
  const auto& subs = rho_ab.layout().subsystems();
  if (subs.size() != 2 || subs[0].dim != d || subs[1].dim != d) throw Error("delta_ent: expected two subsystems of dim d");
  return trace_distance(rho_ab, DensityOperator(mes(d, subs[0].label, subs[1].label)));
}

// ---------------------------------------------------------------------------
// control instances

enum class ExtraChannel { Quantum, Classical };

inline const char* to_string(ExtraChannel c) { return c == ExtraChannel::Quantum ? "quantum" : "classical"; }

using SecondaryProtocol = std::variant<KrausChannel, LoccProtocol>;

inline KrausChannel compiled(const SecondaryProtocol& p) {
  if (const auto* k = std::get_if<KrausChannel>(&p)) return *k;
  return compile_locc(std::get<LoccProtocol>(p));
}

struct ControlInstance {
  PureBlocks post_comm;
  // Bob's labels -> a single guess register of dim d
  KrausChannel bob_guess;
  SecondaryProtocol secondary;
  // record-dependent secondaries; record values not listed use `secondary`
  std::map<int, SecondaryProtocol> secondary_by_omega;
  ExtraChannel extra_channel = ExtraChannel::Quantum;
  std::size_t d = 2;
  std::string key_label = "A";
  std::vector<std::string> eve_labels{"E"};

  const SecondaryProtocol& secondary_for(int omega) const {
    const auto it = secondary_by_omega.find(omega);
    return it == secondary_by_omega.end() ? secondary : it->second;
  }

  const std::string& guess_label() const { return bob_guess.output().subsystems().front().label; }
};

struct InstanceDiagnostics {
  bool ok = true;
  double nondisturbing_residual = 0.0;
  std::vector<std::string> problems;
};

inline InstanceDiagnostics check_instance(const ControlInstance& inst) {
  InstanceDiagnostics diag;
  auto fail = [&](std::string msg) {
    diag.ok = false;
    diag.problems.push_back(std::move(msg));
  };
  const Layout& layout = inst.post_comm.layout();
  if (!layout.contains(inst.key_label) || layout.dim(inst.key_label) != inst.d) fail("key subsystem missing or wrong dim");
  for (const auto& e : inst.eve_labels) {
    if (!layout.contains(e)) fail("Eve subsystem '" + e + "' missing");
  }
  const auto& guess_out = inst.bob_guess.output();
  if (guess_out.size() != 1 || guess_out.total_dim() != inst.d) fail("Bob's guess must output one register of dim d");
  for (const auto& l : inst.bob_guess.input().labels()) {
    if (l == inst.key_label) fail("Bob's guess acts on the key subsystem");
    if (std::find(inst.eve_labels.begin(), inst.eve_labels.end(), l) != inst.eve_labels.end()) {
      fail("Bob's guess acts on Eve's subsystem");
    }
  }
  if (guess_out.size() == 1 && layout.without(inst.bob_guess.input().labels()).contains(inst.guess_label())) {
    fail("guess register label collides with a post-communication subsystem");
  }

  std::vector<const SecondaryProtocol*> all{&inst.secondary};
  for (const auto& [omega, p] : inst.secondary_by_omega) all.push_back(&p);
  for (const auto* p : all) {
    if (inst.extra_channel == ExtraChannel::Classical) {
      const auto* locc = std::get_if<LoccProtocol>(p);
      if (!locc) {
        fail("classical extra channel requires an LOCC secondary");
      } else {
        if (!locc->alice.contains(inst.key_label)) fail("LOCC secondary: key subsystem not on Alice's side");
        for (const auto& l : locc->alice.labels()) {
          if (inst.bob_guess.input().contains(l)) fail("LOCC secondary: Alice holds Bob's subsystem '" + l + "'");
        }
      }
    }
    KrausChannel ch = [&] {
      try {
        return compiled(*p);
      } catch (const Error& e) {
        fail(std::string("secondary: ") + e.what());
        return KrausChannel::identity(Layout{{inst.key_label, inst.d}});
      }
    }();
    if (!ch.is_in_place()) fail("secondary must act in place");
    for (const auto& e : inst.eve_labels) {
      if (ch.input().contains(e)) fail("secondary touches Eve's subsystem '" + e + "'");
    }
    for (const auto& s : ch.input().subsystems()) {
      if (!layout.contains(s.label) || layout.dim(s.label) != s.dim) fail("secondary acts on unknown subsystem '" + s.label + "'");
    }
    const auto nd = is_nondisturbing(ch, inst.key_label, inst.d);
    diag.nondisturbing_residual = std::max(diag.nondisturbing_residual, nd.residual);
    if (!nd.ok) fail("secondary is disturbing on the key subsystem");
  }
  return diag;
}

inline void require_valid(const ControlInstance& inst) {
  const auto diag = check_instance(inst);
  if (!diag.ok) throw Error("invalid control instance: " + diag.problems.front());
}

// p_ij together with Eve's conditional states, and the joint key state
// rho_ABE on (key, guess, Eve...) as a direct sum over the record.
struct PrimaryOutcome {
  std::size_t d = 2;
  Eigen::MatrixXd p;
  std::vector<std::optional<MixedBlocks>> eve;  // index i * d + j; empty when p_ij = 0
  MixedBlocks joint;
  std::string key_a;
  std::string key_b;

  const std::optional<MixedBlocks>& eve_state(std::size_t i, std::size_t j) const { return eve[i * d + j]; }
};

inline double delta_z(const PrimaryOutcome& o) { return delta_z(o.p); }

inline PrimaryOutcome run_primary(const ControlInstance& inst) {
  require_valid(inst);
  const std::size_t d = inst.d;
  const std::string& a = inst.key_label;
  const std::string& g = inst.guess_label();
  std::vector<std::string> order{a, g};
  order.insert(order.end(), inst.eve_labels.begin(), inst.eve_labels.end());

  const auto pinch_a = z_pinch(a, d);
  const auto pinch_g = z_pinch(g, d);
  const MixedBlocks joint = map_blocks(inst.post_comm, [&](const PureState& psi) {
    auto r = apply(pinch_a, DensityOperator(psi));
    r = apply(pinch_g, apply(inst.bob_guess, r));
    return reorder(partial_trace(r, order), order);
  });

  const Layout eve_layout = joint.layout().select(inst.eve_labels).permuted(inst.eve_labels);
  const auto ne = static_cast<Eigen::Index>(eve_layout.total_dim());
  PrimaryOutcome out{d, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)), {}, joint, a, g};
  out.eve.resize(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto off = static_cast<Eigen::Index>(i * d + j) * ne;
      std::vector<std::pair<int, std::pair<double, Matrix>>> parts;
      double pij = 0.0;
      for (const auto& b : joint.blocks()) {
        Matrix blk = b.state.matrix().block(off, off, ne, ne);
        const double w = b.prob * blk.trace().real();
        parts.push_back({b.omega, {w, std::move(blk)}});
        pij += w;
      }
      out.p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pij;
      if (pij <= 1e-15) continue;
      std::vector<Block<DensityOperator>> blocks;
      for (auto& [omega, wm] : parts) {
        auto& [w, m] = wm;
        const double tr = m.trace().real();
        Matrix state = tr > 1e-15 ? Matrix(m / tr) : Matrix(Matrix::Identity(ne, ne) / static_cast<double>(ne));
        state = (state + state.adjoint()).eval() / 2.0;
        blocks.push_back({omega, w / pij, DensityOperator(eve_layout, std::move(state))});
      }
      out.eve[i * d + j] = MixedBlocks(std::move(blocks));
    }
  }
  return out;
}

// Post-secondary state on all subsystems, blockwise over the record.
inline MixedBlocks secondary_output(const ControlInstance& inst) {
  require_valid(inst);
  std::map<int, KrausChannel> cache;
  std::vector<Block<DensityOperator>> out;
  for (const auto& b : inst.post_comm.blocks()) {
    auto it = cache.find(b.omega);
    if (it == cache.end()) it = cache.emplace(b.omega, compiled(inst.secondary_for(b.omega))).first;
    out.push_back({b.omega, b.prob, apply(it->second, DensityOperator(b.state))});
  }
  return MixedBlocks(std::move(out));
}

// sigma_A after the secondary protocol.
inline DensityOperator run_secondary(const ControlInstance& inst) {
  return average(partial_trace(secondary_output(inst), {inst.key_label}));
}

}  // namespace cclab
