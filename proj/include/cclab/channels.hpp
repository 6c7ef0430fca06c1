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

// Quantum operations as Kraus families acting on named subsystems.
//
// A channel acts on its input labels and the identity elsewhere. An in-place
// channel (input layout == output layout) keeps the state's layout. Otherwise
// the input subsystems are removed and the output subsystems are appended
// after the untouched ones.

#include <cclab/metrics.hpp>
#include <cclab/qmat.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cclab {

inline constexpr double kTraceTol = 1e-9;
inline constexpr double kNondisturbTol = 1e-9;

class KrausChannel {
 public:
  KrausChannel(Layout input, Layout output, std::vector<Matrix> kraus)
      : input_(std::move(input)), output_(std::move(output)), kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw Error("channel: empty Kraus family");
    const auto ni = static_cast<Eigen::Index>(input_.total_dim());
    const auto no = static_cast<Eigen::Index>(output_.total_dim());
    for (const auto& k : kraus_) {
      if (k.rows() != no || k.cols() != ni) throw Error("channel: Kraus operator shape does not match layouts");
    }
    if (tp_residual() > kTraceTol) throw Error("channel: not trace preserving");
  }

  static KrausChannel in_place(const Layout& scope, std::vector<Matrix> kraus) {
    return KrausChannel(scope, scope, std::move(kraus));
  }

  static KrausChannel unitary(const Layout& scope, Matrix u) { return in_place(scope, {std::move(u)}); }

  static KrausChannel identity(const Layout& scope) {
    const auto n = static_cast<Eigen::Index>(scope.total_dim());
    return unitary(scope, Matrix::Identity(n, n));
  }

  const Layout& input() const { return input_; }
  const Layout& output() const { return output_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }
  bool is_in_place() const { return input_ == output_; }

  // max |sum K^dagger K - I|
  double tp_residual() const {
    const auto n = static_cast<Eigen::Index>(input_.total_dim());
    Matrix s = Matrix::Zero(n, n);
    for (const auto& k : kraus_) s += k.adjoint() * k;
    return (s - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  }

 private:
  Layout input_;
  Layout output_;
  std::vector<Matrix> kraus_;
};

// Composition: `second` after `first`. Both in place on the same scope.
inline KrausChannel compose(const KrausChannel& second, const KrausChannel& first) {
  if (!first.is_in_place() || !second.is_in_place() || !(first.input() == second.input())) {
    throw Error("compose: channels must act in place on the same scope");
  }
  std::vector<Matrix> ks;
  for (const auto& b : second.kraus()) {
    for (const auto& a : first.kraus()) ks.push_back(b * a);
  }
  return KrausChannel::in_place(first.input(), std::move(ks));
}

// Lifts an operator on `scope` to `full` (identity on the other subsystems).
inline Matrix embed_operator(const Matrix& op, const Layout& scope, const Layout& full) {
  for (const auto& s : scope.subsystems()) {
    if (!full.contains(s.label) || full.dim(s.label) != s.dim) throw Error("embed: scope not contained in layout");
  }
  const Layout rest = full.without(scope.labels());
  const auto smap = detail::sub_index_map(full, scope);
  const auto rmap = detail::sub_index_map(full, rest);
  const std::size_t n = full.total_dim();
  std::vector<std::size_t> back(n);
  for (std::size_t i = 0; i < n; ++i) back[smap[i] * rest.total_dim() + rmap[i]] = i;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t a = 0; a < scope.total_dim(); ++a) {
      const Complex v = op(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(smap[j]));
      if (v == Complex(0.0)) continue;
      out(static_cast<Eigen::Index>(back[a * rest.total_dim() + rmap[j]]), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return out;
}

namespace detail {

inline void check_scope(const KrausChannel& ch, const Layout& layout) {
  for (const auto& s : ch.input().subsystems()) {
    if (!layout.contains(s.label)) throw Error("apply: channel label '" + s.label + "' not in state");
    if (layout.dim(s.label) != s.dim) throw Error("apply: dimension mismatch on '" + s.label + "'");
  }
}

inline Layout output_layout(const KrausChannel& ch, const Layout& layout) {
  if (ch.is_in_place()) return layout;
  return layout.without(ch.input().labels()).concat(ch.output());
}

}  // namespace detail

inline DensityOperator apply(const KrausChannel& ch, const DensityOperator& rho) {
  detail::check_scope(ch, rho.layout());
  const Layout rest = rho.layout().without(ch.input().labels());
  std::vector<std::string> order = ch.input().labels();
  for (const auto& l : rest.labels()) order.push_back(l);
  // scope first, rest second: the channel becomes K (x) I_rest
  const DensityOperator r = reorder(rho, order);
  const auto a = static_cast<Eigen::Index>(ch.input().total_dim());
  const auto b = static_cast<Eigen::Index>(ch.output().total_dim());
  const auto nr = static_cast<Eigen::Index>(rest.total_dim());
  const auto n = a * nr;
  const Matrix& m = r.matrix();

  Matrix out = Matrix::Zero(b * nr, b * nr);
  Matrix left(b * nr, n);
  for (const auto& k : ch.kraus()) {
    left.setZero();
    for (Eigen::Index s2 = 0; s2 < b; ++s2) {
      for (Eigen::Index s = 0; s < a; ++s) {
        const Complex v = k(s2, s);
        if (v == Complex(0.0)) continue;
        left.middleRows(s2 * nr, nr) += v * m.middleRows(s * nr, nr);
      }
    }
    for (Eigen::Index s2 = 0; s2 < b; ++s2) {
      for (Eigen::Index s = 0; s < a; ++s) {
        const Complex v = std::conj(k(s2, s));
        if (v == Complex(0.0)) continue;
        out.middleCols(s2 * nr, nr) += v * left.middleCols(s * nr, nr);
      }
    }
  }
  out = (out + out.adjoint()).eval() / 2.0;
  Layout stacked = ch.output().concat(rest);
  DensityOperator result(stacked, std::move(out));
  return reorder(result, detail::output_layout(ch, rho.layout()).labels());
}

// Single-Kraus (isometric) channels map pure states to pure states.
inline PureState apply(const KrausChannel& ch, const PureState& psi) {
  if (ch.kraus().size() != 1) throw Error("apply: pure-state application needs a single Kraus operator");
  detail::check_scope(ch, psi.layout());
  const Layout rest = psi.layout().without(ch.input().labels());
  std::vector<std::string> order = ch.input().labels();
  for (const auto& l : rest.labels()) order.push_back(l);
  const PureState r = reorder(psi, order);
  const auto nr = static_cast<Eigen::Index>(rest.total_dim());
  const Matrix& k = ch.kraus().front();
  // reshape as (scope) x (rest), act from the left
  Matrix w(k.cols(), nr);
  for (Eigen::Index s = 0; s < k.cols(); ++s) w.row(s) = r.amplitudes().segment(s * nr, nr).transpose();
  const Matrix w2 = k * w;
  Vector v(w2.rows() * nr);
  for (Eigen::Index s = 0; s < w2.rows(); ++s) v.segment(s * nr, nr) = w2.row(s).transpose();
  PureState result(ch.output().concat(rest), std::move(v));
  return reorder(result, detail::output_layout(ch, psi.layout()).labels());
}

inline MixedBlocks apply(const KrausChannel& ch, const MixedBlocks& s) {
  return map_blocks(s, [&](const DensityOperator& r) { return apply(ch, r); });
}

inline PureBlocks apply(const KrausChannel& ch, const PureBlocks& s) {
  return map_blocks(s, [&](const PureState& r) { return apply(ch, r); });
}

// ---------------------------------------------------------------------------
// standard channels

// Dephasing in the standard basis: Kraus {|i><i|}.
inline KrausChannel z_pinch(const std::string& label, std::size_t d) {
  const Layout scope{{label, d}};
  std::vector<Matrix> ks;
  for (std::size_t i = 0; i < d; ++i) {
    Matrix k = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    ks.push_back(std::move(k));
  }
  return KrausChannel::in_place(scope, std::move(ks));
}

// |j>|k> -> |j>|k + j mod d>; on |j>|0> this is the copy |j>|j>.
inline KrausChannel copy_unitary(const std::string& src, const std::string& dst, std::size_t d) {
  const Layout scope{{src, d}, {dst, d}};
  const auto n = static_cast<Eigen::Index>(d * d);
  Matrix u = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      u(static_cast<Eigen::Index>(j * d + (k + j) % d), static_cast<Eigen::Index>(j * d + k)) = 1.0;
    }
  }
  return KrausChannel::unitary(scope, std::move(u));
}

// Traces out `scope`.
inline KrausChannel discard(const Layout& scope) {
  std::vector<Matrix> ks;
  const auto n = static_cast<Eigen::Index>(scope.total_dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    Matrix k = Matrix::Zero(1, n);
    k(0, i) = 1.0;
    ks.push_back(std::move(k));
  }
  return KrausChannel(scope, Layout{}, std::move(ks));
}

// Fully depolarizing channel on one subsystem (Kraus: all |i><j| / sqrt(d)).
inline KrausChannel depolarize(const std::string& label, std::size_t d) {
  const Layout scope{{label, d}};
  const auto n = static_cast<Eigen::Index>(d);
  std::vector<Matrix> ks;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Matrix k = Matrix::Zero(n, n);
      k(i, j) = 1.0 / std::sqrt(static_cast<double>(d));
      ks.push_back(std::move(k));
    }
  }
  return KrausChannel::in_place(scope, std::move(ks));
}

// Controlled-in-Z operator sum_i |i><i|_z (x) U_i, with the control first.
inline KrausChannel controlled_unitary(const std::string& control, const std::vector<Matrix>& branches,
                                       const Layout& target) {
  const std::size_t d = branches.size();
  const Layout scope = Layout{{control, d}}.concat(target);
  const auto nt = static_cast<Eigen::Index>(target.total_dim());
  Matrix u = Matrix::Zero(static_cast<Eigen::Index>(scope.total_dim()), static_cast<Eigen::Index>(scope.total_dim()));
  for (std::size_t i = 0; i < d; ++i) {
    if (branches[i].rows() != nt || branches[i].cols() != nt) throw Error("controlled_unitary: branch shape mismatch");
    u.block(static_cast<Eigen::Index>(i) * nt, static_cast<Eigen::Index>(i) * nt, nt, nt) = branches[i];
  }
  return KrausChannel::unitary(scope, std::move(u));
}

// Decoheres `s` across an orthogonal, complete projector family: the block
// for projector w is P_w s P_w / p_w. Blocks with p_w <= 1e-15 are dropped
// (they cannot be normalized); the block's record value is w.
inline MixedBlocks pinch_blocks(const DensityOperator& s, const std::vector<Matrix>& projectors) {
  const auto n = static_cast<Eigen::Index>(s.dim());
  if (projectors.empty()) throw Error("pinch_blocks: empty projector family");
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t a = 0; a < projectors.size(); ++a) {
    const auto& p = projectors[a];
    if (p.rows() != n || p.cols() != n) throw Error("pinch_blocks: projector shape mismatch");
    if ((p * p - p).cwiseAbs().maxCoeff() > kTraceTol) throw Error("pinch_blocks: not a projector");
    for (std::size_t b = a + 1; b < projectors.size(); ++b) {
      if ((p * projectors[b]).cwiseAbs().maxCoeff() > kTraceTol) throw Error("pinch_blocks: projectors not orthogonal");
    }
    sum += p;
  }
  if ((sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > kTraceTol) {
    throw Error("pinch_blocks: incomplete projector family");
  }
  std::vector<Block<DensityOperator>> blocks;
  double total = 0.0;
  std::vector<std::pair<double, Matrix>> parts;
  for (const auto& p : projectors) {
    Matrix q = p * s.matrix() * p;
    parts.emplace_back(q.trace().real(), std::move(q));
    total += parts.back().first;
  }
  for (std::size_t w = 0; w < parts.size(); ++w) {
    auto& [pw, q] = parts[w];
    if (pw <= 1e-15) continue;
    Matrix normalized = q / pw;
    normalized = (normalized + normalized.adjoint()).eval() / 2.0;
    blocks.push_back({static_cast<int>(w), pw / total, DensityOperator(s.layout(), std::move(normalized))});
  }
  return MixedBlocks(std::move(blocks));
}

// Decoheres an explicit record register and removes it: the inverse of flatten().
inline MixedBlocks decohere_record(const DensityOperator& s, const std::string& record_label) {
  const std::size_t nw = s.layout().dim(record_label);
  std::vector<Matrix> projectors;
  for (std::size_t w = 0; w < nw; ++w) {
    Matrix pw = Matrix::Zero(static_cast<Eigen::Index>(nw), static_cast<Eigen::Index>(nw));
    pw(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(w)) = 1.0;
    projectors.push_back(embed_operator(pw, Layout{{record_label, nw}}, s.layout()));
  }
  const auto pinched = pinch_blocks(s, projectors);
  const auto rest = s.layout().without({record_label}).labels();
  return partial_trace(pinched, rest);
}

// ---------------------------------------------------------------------------
// nondisturbing condition

struct NondisturbingReport {
  bool ok = false;
  double residual = 0.0;
};

// Block-diagonal (controlled-in-Z) Kraus structure on `z_label`:
// (<i| (x) I) K (|j> (x) I) = 0 for all i != j and every Kraus operator K.
// residual = largest spectral norm among the off-diagonal blocks.
inline NondisturbingReport is_nondisturbing(const KrausChannel& ch, const std::string& z_label, std::size_t d,
                                            double tol = kNondisturbTol) {
  const bool in_in = ch.input().contains(z_label);
  const bool in_out = ch.output().contains(z_label);
  if (!in_in && !in_out) return {true, 0.0};
  if (in_in != in_out || ch.input().dim(z_label) != d || ch.output().dim(z_label) != d) {
    return {false, std::numeric_limits<double>::infinity()};
  }
  const auto zin = detail::sub_index_map(ch.input(), Layout{{z_label, d}});
  const auto zout = detail::sub_index_map(ch.output(), Layout{{z_label, d}});
  double residual = 0.0;
  for (const auto& k : ch.kraus()) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (i == j) continue;
        std::vector<Eigen::Index> rows;
        std::vector<Eigen::Index> cols;
        for (std::size_t r = 0; r < zout.size(); ++r) {
          if (zout[r] == i) rows.push_back(static_cast<Eigen::Index>(r));
        }
        for (std::size_t c = 0; c < zin.size(); ++c) {
          if (zin[c] == j) cols.push_back(static_cast<Eigen::Index>(c));
        }
        Matrix block(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
          for (std::size_t c = 0; c < cols.size(); ++c) {
            block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = k(rows[r], cols[c]);
          }
        }
        if (block.size() == 0) continue;
        Eigen::JacobiSVD<Matrix> svd(block);
        residual = std::max(residual, svd.singularValues()(0));
      }
    }
  }
  return {residual <= tol, residual};
}

// Weaker diagnostic: each |j><j| on z_label, together with the maximally mixed
// state on the rest of the scope, keeps all of its z_label population on j.
// residual = max_j (1 - <j| marginal |j>).
inline NondisturbingReport preserves_z_eigenstates(const KrausChannel& ch, const std::string& z_label, std::size_t d,
                                                   double tol = kNondisturbTol) {
  if (!ch.input().contains(z_label)) return {true, 0.0};
  if (!ch.output().contains(z_label)) return {false, std::numeric_limits<double>::infinity()};
  const Layout rest = ch.input().without({z_label});
  double residual = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    DensityOperator in = DensityOperator(ket(z_label, d, j));
    if (!rest.empty()) in = tensor(in, maximally_mixed(rest));
    const auto out = partial_trace(apply(ch, reorder(in, ch.input().labels())), {z_label});
    residual = std::max(residual, 1.0 - out.matrix()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real());
  }
  return {residual <= tol, residual};
}

// ---------------------------------------------------------------------------
// LOCC protocols

enum class Party { Alice, Bob };

inline const char* party_name(Party p) { return p == Party::Alice ? "alice" : "bob"; }

// An instrument: for each outcome, the Kraus operators producing it.
struct Instrument {
  std::vector<std::vector<Matrix>> outcomes;

  std::size_t outcome_count() const { return outcomes.size(); }
};

// One broadcast round. If `depends_on` names an earlier round, the instrument
// used is instruments[outcome of that round]; otherwise there is exactly one.
struct LoccRound {
  Party party = Party::Alice;
  Layout scope;
  std::optional<std::size_t> depends_on;
  std::vector<Instrument> instruments;
};

struct LoccProtocol {
  Layout alice;
  Layout bob;
  std::vector<LoccRound> rounds;

  Layout joint() const { return alice.concat(bob); }
};

inline void validate_locc(const LoccProtocol& p) {
  const Layout joint = p.joint();
  for (std::size_t r = 0; r < p.rounds.size(); ++r) {
    const auto& round = p.rounds[r];
    const Layout& owner = round.party == Party::Alice ? p.alice : p.bob;
    for (const auto& s : round.scope.subsystems()) {
      if (!owner.contains(s.label) || owner.dim(s.label) != s.dim) {
        throw Error("locc: round " + std::to_string(r) + " acts on '" + s.label + "' not held by " +
                    party_name(round.party));
      }
    }
    if (round.instruments.empty()) throw Error("locc: round without instrument");
    if (round.depends_on) {
      const std::size_t dep = *round.depends_on;
      if (dep >= r) throw Error("locc: round depends on a later round");
      const std::size_t n_out = p.rounds[dep].instruments.front().outcome_count();
      if (round.instruments.size() != n_out) throw Error("locc: instrument count does not match outcomes");
    } else if (round.instruments.size() != 1) {
      throw Error("locc: unconditioned round needs exactly one instrument");
    }
    std::size_t outcomes = round.instruments.front().outcome_count();
    const auto n = static_cast<Eigen::Index>(round.scope.total_dim());
    for (const auto& inst : round.instruments) {
      if (inst.outcome_count() != outcomes) throw Error("locc: instruments of one round differ in outcome count");
      Matrix s = Matrix::Zero(n, n);
      for (const auto& ks : inst.outcomes) {
        for (const auto& k : ks) {
          if (k.rows() != n || k.cols() != n) throw Error("locc: Kraus shape does not match round scope");
          s += k.adjoint() * k;
        }
      }
      if ((s - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > kTraceTol) {
        throw Error("locc: instrument in round " + std::to_string(r) + " is not trace preserving");
      }
    }
  }
}

// One Kraus operator per outcome sequence and Kraus choice: the product of the
// embedded round operators.
inline KrausChannel compile_locc(const LoccProtocol& p) {
  validate_locc(p);
  const Layout joint = p.joint();
  const auto n = static_cast<Eigen::Index>(joint.total_dim());

  struct Branch {
    Matrix op;
    std::vector<std::size_t> outcomes;
  };
  std::vector<Branch> branches{{Matrix::Identity(n, n), {}}};
  for (const auto& round : p.rounds) {
    std::vector<Branch> next;
    for (const auto& br : branches) {
      const std::size_t which = round.depends_on ? br.outcomes[*round.depends_on] : 0;
      const auto& inst = round.instruments[which];
      for (std::size_t o = 0; o < inst.outcome_count(); ++o) {
        for (const auto& k : inst.outcomes[o]) {
          Branch b{embed_operator(k, round.scope, joint) * br.op, br.outcomes};
          b.outcomes.push_back(o);
          next.push_back(std::move(b));
        }
      }
    }
    branches = std::move(next);
  }
  std::vector<Matrix> ks;
  for (auto& b : branches) {
    if (b.op.cwiseAbs().maxCoeff() == 0.0) continue;
    ks.push_back(std::move(b.op));
  }
  return KrausChannel::in_place(joint, std::move(ks));
}

// Single-outcome round applying a local unitary.
inline LoccRound local_unitary_round(Party party, const Layout& scope, Matrix u) {
  return LoccRound{party, scope, std::nullopt, {Instrument{{{std::move(u)}}}}};
}

// Projective measurement round in the basis given by the columns of `basis`.
inline LoccRound measurement_round(Party party, const Layout& scope, const Matrix& basis) {
  Instrument inst;
  for (Eigen::Index k = 0; k < basis.cols(); ++k) inst.outcomes.push_back({basis.col(k) * basis.col(k).adjoint()});
  return LoccRound{party, scope, std::nullopt, {std::move(inst)}};
}

}  // namespace cclab
