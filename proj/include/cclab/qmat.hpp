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

// Dense complex linear algebra over labeled tensor-product Hilbert spaces.
//
// Basis ordering is lexicographic over subsystem indices in layout order:
// the first subsystem is the most significant digit of the flat index.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace cclab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr std::size_t kMaxTotalDim = 256;
inline constexpr double kStateTol = 1e-10;
inline constexpr double kNormTol = 1e-10;
// Eigenvalues in [-kClipTol, 0) are round-off; below -kNonPsdTol the input is invalid.
inline constexpr double kClipTol = 1e-10;
inline constexpr double kNonPsdTol = 1e-8;
// eigenvalues at or below this are numerically zero for ranks and purifications
inline constexpr double kSpectralCut = 1e-14;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Subsystem {
  std::string label;
  std::size_t dim = 1;

  friend bool operator==(const Subsystem&, const Subsystem&) = default;
};

class Layout {
 public:
  Layout() = default;

  explicit Layout(std::vector<Subsystem> subsystems) : subsystems_(std::move(subsystems)) {
    std::set<std::string> seen;
    total_ = 1;
    for (const auto& s : subsystems_) {
      if (s.label.empty()) throw Error("layout: empty subsystem label");
      if (s.dim < 1) throw Error("layout: subsystem '" + s.label + "' has dim 0");
      if (!seen.insert(s.label).second) throw Error("layout: duplicate label '" + s.label + "'");
      total_ *= s.dim;
      if (total_ > kMaxTotalDim) {
        throw Error("layout: total dimension exceeds cap of " + std::to_string(kMaxTotalDim));
      }
    }
  }

  Layout(std::initializer_list<Subsystem> subsystems)
      : Layout(std::vector<Subsystem>(subsystems)) {}

  const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  std::size_t size() const { return subsystems_.size(); }
  std::size_t total_dim() const { return total_; }
  bool empty() const { return subsystems_.empty(); }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(subsystems_.size());
    for (const auto& s : subsystems_) out.push_back(s.label);
    return out;
  }

  bool contains(const std::string& label) const {
    return std::any_of(subsystems_.begin(), subsystems_.end(),
                       [&](const Subsystem& s) { return s.label == label; });
  }

  std::size_t position(const std::string& label) const {
    for (std::size_t k = 0; k < subsystems_.size(); ++k) {
      if (subsystems_[k].label == label) return k;
    }
    throw Error("layout: unknown label '" + label + "'");
  }

  std::size_t dim(const std::string& label) const { return subsystems_[position(label)].dim; }

  // Product of dims to the right of position k.
  std::size_t stride(std::size_t k) const {
    std::size_t s = 1;
    for (std::size_t j = k + 1; j < subsystems_.size(); ++j) s *= subsystems_[j].dim;
    return s;
  }

  Layout concat(const Layout& other) const {
    std::vector<Subsystem> all = subsystems_;
    all.insert(all.end(), other.subsystems_.begin(), other.subsystems_.end());
    return Layout(std::move(all));
  }

  // Subsystems whose labels are in `keep`, in this layout's order.
  Layout select(const std::vector<std::string>& keep) const {
    for (const auto& l : keep) position(l);
    std::vector<Subsystem> out;
    for (const auto& s : subsystems_) {
      if (std::find(keep.begin(), keep.end(), s.label) != keep.end()) out.push_back(s);
    }
    return Layout(std::move(out));
  }

  Layout without(const std::vector<std::string>& drop) const {
    std::vector<Subsystem> out;
    for (const auto& s : subsystems_) {
      if (std::find(drop.begin(), drop.end(), s.label) == drop.end()) out.push_back(s);
    }
    return Layout(std::move(out));
  }

  // Same subsystems, reordered to the given label order.
  Layout permuted(const std::vector<std::string>& order) const {
    if (order.size() != subsystems_.size()) throw Error("layout: permutation size mismatch");
    std::vector<Subsystem> out;
    for (const auto& l : order) out.push_back(subsystems_[position(l)]);
    return Layout(std::move(out));
  }

  bool same_labels(const Layout& other) const {
    if (size() != other.size()) return false;
    for (const auto& s : subsystems_) {
      if (!other.contains(s.label) || other.dim(s.label) != s.dim) return false;
    }
    return true;
  }

  std::vector<std::size_t> digits(std::size_t index) const {
    std::vector<std::size_t> d(subsystems_.size());
    for (std::size_t k = subsystems_.size(); k-- > 0;) {
      d[k] = index % subsystems_[k].dim;
      index /= subsystems_[k].dim;
    }
    return d;
  }

  std::size_t index(std::span<const std::size_t> digits) const {
    if (digits.size() != subsystems_.size()) throw Error("layout: digit count mismatch");
    std::size_t n = 0;
    for (std::size_t k = 0; k < subsystems_.size(); ++k) {
      if (digits[k] >= subsystems_[k].dim) throw Error("layout: digit out of range");
      n = n * subsystems_[k].dim + digits[k];
    }
    return n;
  }

  friend bool operator==(const Layout& a, const Layout& b) { return a.subsystems_ == b.subsystems_; }

 private:
  std::vector<Subsystem> subsystems_;
  std::size_t total_ = 1;
};

namespace detail {

// For every flat index of `full`, the flat index within the sub-layout `part`
// (subsystems of `full` restricted to `part`'s labels, in `part`'s order).
inline std::vector<std::size_t> sub_index_map(const Layout& full, const Layout& part) {
  std::vector<std::size_t> pos(part.size());
  for (std::size_t k = 0; k < part.size(); ++k) pos[k] = full.position(part.subsystems()[k].label);
  std::vector<std::size_t> out(full.total_dim());
  for (std::size_t n = 0; n < full.total_dim(); ++n) {
    const auto d = full.digits(n);
    std::size_t m = 0;
    for (std::size_t k = 0; k < part.size(); ++k) m = m * part.subsystems()[k].dim + d[pos[k]];
    out[n] = m;
  }
  return out;
}

inline double hermiticity_residual(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  double r = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j) - std::conj(m(j, i))));
  }
  return r;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace detail

class PureState {
 public:
  PureState(Layout layout, Vector amplitudes) : layout_(std::move(layout)), amp_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amp_.size()) != layout_.total_dim()) {
      throw Error("pure state: amplitude count does not match layout");
    }
    if (std::abs(amp_.norm() - 1.0) > kNormTol) throw Error("pure state: not normalized");
  }

  // Normalizes before validating; rejects the zero vector.
  static PureState normalized(Layout layout, Vector v) {
    const double n = v.norm();
    if (n < 1e-300) throw Error("pure state: zero vector");
    return PureState(std::move(layout), v / n);
  }

  const Layout& layout() const { return layout_; }
  const Vector& amplitudes() const { return amp_; }
  std::size_t dim() const { return layout_.total_dim(); }

 private:
  Layout layout_;
  Vector amp_;
};

class DensityOperator {
 public:
  DensityOperator(Layout layout, Matrix matrix) : layout_(std::move(layout)), m_(std::move(matrix)) {
    const auto n = static_cast<Eigen::Index>(layout_.total_dim());
    if (m_.rows() != n || m_.cols() != n) throw Error("density operator: matrix shape does not match layout");
    if (detail::hermiticity_residual(m_) > kStateTol) throw Error("density operator: not Hermitian");
    if (std::abs(m_.trace().real() - 1.0) > kStateTol) throw Error("density operator: trace is not 1");
  }

  explicit DensityOperator(const PureState& psi)
      : layout_(psi.layout()), m_(psi.amplitudes() * psi.amplitudes().adjoint()) {}

  const Layout& layout() const { return layout_; }
  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return layout_.total_dim(); }

 private:
  Layout layout_;
  Matrix m_;
};

inline DensityOperator to_density(const PureState& psi) { return DensityOperator(psi); }
inline const DensityOperator& to_density(const DensityOperator& rho) { return rho; }

// ---------------------------------------------------------------------------
// constructors

inline PureState basis_state(const Layout& layout, const std::vector<std::size_t>& digits) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  v(static_cast<Eigen::Index>(layout.index(digits))) = 1.0;
  return PureState(layout, std::move(v));
}

inline PureState ket(const std::string& label, std::size_t dim, std::size_t i) {
  return basis_state(Layout{{label, dim}}, {i});
}

inline DensityOperator maximally_mixed(const Layout& layout) {
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  return DensityOperator(layout, Matrix::Identity(n, n) / static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// tensor product

inline PureState tensor(const PureState& a, const PureState& b) {
  Layout layout = a.layout().concat(b.layout());
  Vector v(static_cast<Eigen::Index>(layout.total_dim()));
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
    v.segment(i * b.amplitudes().size(), b.amplitudes().size()) = a.amplitudes()(i) * b.amplitudes();
  }
  return PureState(std::move(layout), std::move(v));
}

inline DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  Layout layout = a.layout().concat(b.layout());
  return DensityOperator(std::move(layout), detail::kron(a.matrix(), b.matrix()));
}

// ---------------------------------------------------------------------------
// permutation and partial trace

inline PureState reorder(const PureState& psi, const std::vector<std::string>& order) {
  Layout target = psi.layout().permuted(order);
  const auto map = detail::sub_index_map(psi.layout(), target);
  Vector v(psi.amplitudes().size());
  for (std::size_t n = 0; n < map.size(); ++n) v(static_cast<Eigen::Index>(map[n])) = psi.amplitudes()(static_cast<Eigen::Index>(n));
  return PureState(std::move(target), std::move(v));
}

inline DensityOperator reorder(const DensityOperator& rho, const std::vector<std::string>& order) {
  Layout target = rho.layout().permuted(order);
  const auto map = detail::sub_index_map(rho.layout(), target);
  const auto n = rho.matrix().rows();
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(static_cast<Eigen::Index>(map[static_cast<std::size_t>(i)]),
        static_cast<Eigen::Index>(map[static_cast<std::size_t>(j)])) = rho.matrix()(i, j);
    }
  }
  return DensityOperator(std::move(target), std::move(m));
}

// Reduced operator on the subsystems named in `keep`, in layout order.
inline Matrix partial_trace_matrix(const Layout& layout, const Matrix& m, const std::vector<std::string>& keep) {
  const Layout kept = layout.select(keep);
  std::vector<std::string> traced_labels;
  for (const auto& s : layout.subsystems()) {
    if (!kept.contains(s.label)) traced_labels.push_back(s.label);
  }
  const Layout traced = layout.select(traced_labels);
  const auto kmap = detail::sub_index_map(layout, kept);
  const auto tmap = detail::sub_index_map(layout, traced);

  // full index from (kept, traced) pair
  std::vector<std::size_t> full(kept.total_dim() * traced.total_dim());
  for (std::size_t n = 0; n < layout.total_dim(); ++n) full[kmap[n] * traced.total_dim() + tmap[n]] = n;

  const auto nk = static_cast<Eigen::Index>(kept.total_dim());
  const std::size_t nt = traced.total_dim();
  Matrix out = Matrix::Zero(nk, nk);
  for (Eigen::Index i = 0; i < nk; ++i) {
    for (Eigen::Index j = 0; j < nk; ++j) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < nt; ++t) {
        acc += m(static_cast<Eigen::Index>(full[static_cast<std::size_t>(i) * nt + t]),
                 static_cast<Eigen::Index>(full[static_cast<std::size_t>(j) * nt + t]));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

inline DensityOperator partial_trace(const DensityOperator& rho, const std::vector<std::string>& keep) {
  if (keep.empty()) throw Error("partial_trace: keep set is empty");
  Layout kept = rho.layout().select(keep);
  return DensityOperator(std::move(kept), partial_trace_matrix(rho.layout(), rho.matrix(), keep));
}

inline DensityOperator partial_trace(const PureState& psi, const std::vector<std::string>& keep) {
  return partial_trace(DensityOperator(psi), keep);
}

// ---------------------------------------------------------------------------
// spectral tools

struct EigenDecomposition {
  RealVector values;  // descending
  Matrix vectors;     // columns, unitary
};

inline EigenDecomposition eig_hermitian(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error("eig_hermitian: matrix is not square");
  if (detail::hermiticity_residual(m) > kStateTol) throw Error("eig_hermitian: matrix is not Hermitian");
  const Matrix h = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw Error("eig_hermitian: eigensolver did not converge");
  // Eigen returns ascending order; flip to descending.
  const auto n = h.rows();
  EigenDecomposition out{RealVector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = solver.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

inline RealVector eigenvalues_hermitian(const Matrix& m) { return eig_hermitian(m).values; }

inline Matrix psd_sqrt(const Matrix& m) {
  const auto e = eig_hermitian(m);
  RealVector root(e.values.size());
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    const double lam = e.values(k);
    if (lam < -kNonPsdTol) throw Error("psd_sqrt: matrix has a negative eigenvalue");
    root(k) = lam > 0.0 ? std::sqrt(lam) : 0.0;
  }
  return e.vectors * root.asDiagonal() * e.vectors.adjoint();
}

// Number of eigenvalues strictly above `threshold`.
inline std::size_t numerical_rank(const Matrix& m, double threshold = kSpectralCut) {
  const auto vals = eigenvalues_hermitian(m);
  return static_cast<std::size_t>((vals.array() > threshold).count());
}

struct DensityDiagnostics {
  double hermiticity_residual = 0.0;
  double min_eigenvalue = 0.0;
  double trace_deviation = 0.0;
  bool ok = false;
};

inline DensityDiagnostics validate_density(const Matrix& m) {
  DensityDiagnostics d;
  if (m.rows() != m.cols() || m.rows() == 0) {
    d.hermiticity_residual = std::numeric_limits<double>::infinity();
    return d;
  }
  d.hermiticity_residual = detail::hermiticity_residual(m);
  d.trace_deviation = std::abs(m.trace() - Complex(1.0, 0.0));
  const Matrix h = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues().minCoeff();
  d.ok = d.hermiticity_residual <= kStateTol && d.min_eigenvalue >= -kClipTol && d.trace_deviation <= kStateTol;
  return d;
}

inline DensityDiagnostics validate_density(const DensityOperator& rho) { return validate_density(rho.matrix()); }

// ---------------------------------------------------------------------------
// states indexed by a classical record omega

template <class State>
struct Block {
  int omega = 0;
  double prob = 0.0;
  State state;
};

// Direct sum over a classical record: sum_omega p_omega state_omega.
// Probabilities are stored separately; each block is individually normalized.
template <class State>
class BlockState {
 public:
  explicit BlockState(std::vector<Block<State>> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw Error("block state: no blocks");
    double total = 0.0;
    std::set<int> seen;
    for (const auto& b : blocks_) {
      if (b.omega < 0) throw Error("block state: negative record value");
      if (!seen.insert(b.omega).second) throw Error("block state: duplicate record value");
      if (!(b.prob >= 0.0)) throw Error("block state: negative probability");
      if (!(b.state.layout() == blocks_.front().state.layout())) throw Error("block state: blocks do not share a layout");
      total += b.prob;
    }
    if (std::abs(total - 1.0) > kStateTol) throw Error("block state: probabilities do not sum to 1");
    std::sort(blocks_.begin(), blocks_.end(), [](const auto& a, const auto& b) { return a.omega < b.omega; });
  }

  static BlockState single(State s) { return BlockState({Block<State>{0, 1.0, std::move(s)}}); }

  const std::vector<Block<State>>& blocks() const { return blocks_; }
  const Layout& layout() const { return blocks_.front().state.layout(); }
  std::size_t size() const { return blocks_.size(); }

  const Block<State>* find(int omega) const {
    for (const auto& b : blocks_) {
      if (b.omega == omega) return &b;
    }
    return nullptr;
  }

  int max_omega() const { return blocks_.back().omega; }

 private:
  std::vector<Block<State>> blocks_;
};

using MixedBlocks = BlockState<DensityOperator>;
using PureBlocks = BlockState<PureState>;

inline MixedBlocks to_mixed(const PureBlocks& s) {
  std::vector<Block<DensityOperator>> out;
  for (const auto& b : s.blocks()) out.push_back({b.omega, b.prob, DensityOperator(b.state)});
  return MixedBlocks(std::move(out));
}

inline MixedBlocks to_mixed(const MixedBlocks& s) { return s; }

// Applies `f` to every block state, keeping record values and probabilities.
template <class State, class F>
auto map_blocks(const BlockState<State>& s, F&& f) {
  using Out = std::decay_t<decltype(f(s.blocks().front().state))>;
  std::vector<Block<Out>> out;
  out.reserve(s.size());
  for (const auto& b : s.blocks()) out.push_back({b.omega, b.prob, f(b.state)});
  return BlockState<Out>(std::move(out));
}

inline MixedBlocks partial_trace(const MixedBlocks& s, const std::vector<std::string>& keep) {
  return map_blocks(s, [&](const DensityOperator& r) { return partial_trace(r, keep); });
}

// Weighted average of the blocks, forgetting the record.
inline DensityOperator average(const MixedBlocks& s) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(s.layout().total_dim()),
                          static_cast<Eigen::Index>(s.layout().total_dim()));
  for (const auto& b : s.blocks()) m += b.prob * b.state.matrix();
  return DensityOperator(s.layout(), std::move(m));
}

// Realizes the direct sum on an explicit record register `record_label`
// (dim = max omega + 1), placed first: sum_omega p_omega |omega><omega| (x) rho_omega.
inline DensityOperator flatten(const MixedBlocks& s, const std::string& record_label = "W") {
  const std::size_t nw = static_cast<std::size_t>(s.max_omega()) + 1;
  Layout layout = Layout{{record_label, nw}}.concat(s.layout());
  const auto n = static_cast<Eigen::Index>(s.layout().total_dim());
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(layout.total_dim()), static_cast<Eigen::Index>(layout.total_dim()));
  for (const auto& b : s.blocks()) m.block(b.omega * n, b.omega * n, n, n) = b.prob * b.state.matrix();
  return DensityOperator(std::move(layout), std::move(m));
}

}  // namespace cclab
