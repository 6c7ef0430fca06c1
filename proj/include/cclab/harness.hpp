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

// Random instances, noise families, suites and sweeps.
//
// Each trial t of theorem k draws from Rng::stream(seed, k, t), so a trial's
// instance does not depend on which other trials run or in what order.

#include <cclab/random.hpp>
#include <cclab/theorems.hpp>

#include <chrono>
#include <cstdio>
#include <sstream>

namespace cclab {

struct SuiteConfig {
  std::uint64_t seed = 0;
  std::size_t trials = 200;
  std::vector<int> theorems{1, 2, 3, 4};
  std::size_t d = 2;
  std::size_t dim_e = 3;
  std::size_t dim_aux = 2;
  double tol = kBoundTol;

  void validate() const {
    if (trials == 0) throw Error("suite: trials must be positive");
    if (theorems.empty()) throw Error("suite: no theorems selected");
    for (int t : theorems) {
      if (t < 1 || t > 4) throw Error("suite: unknown theorem " + std::to_string(t));
    }
    if (d < 2) throw Error("suite: d must be at least 2");
    if (dim_e < 1 || dim_aux < 1) throw Error("suite: dims must be positive");
    if (d * d * dim_aux * dim_aux * dim_e > kMaxTotalDim) throw Error("suite: total dimension exceeds 256");
    if (!(tol > 0.0)) throw Error("suite: tol must be positive");
  }
};

namespace detail {

inline Matrix shift(std::size_t d, std::ptrdiff_t by) {
  const auto n = static_cast<Eigen::Index>(d);
  Matrix x = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < d; ++j) {
    const auto to = static_cast<Eigen::Index>((static_cast<std::ptrdiff_t>(j + d) + by % static_cast<std::ptrdiff_t>(d)) %
                                              static_cast<std::ptrdiff_t>(d));
    x(to, static_cast<Eigen::Index>(j)) = 1.0;
  }
  return x;
}

inline std::vector<double> random_probs(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& x : p) {
    x = 0.2 + rng.uniform();
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

inline Vector perturb(Rng& rng, const Vector& ideal, double strength) {
  if (strength == 0.0) return ideal;
  Vector g = gaussian_vector(rng, static_cast<std::size_t>(ideal.size()));
  g /= g.norm();
  Vector v = ideal + strength * g;
  return v / v.norm();
}

}  // namespace detail

// Perturbation strengths for control instances; infinity means a Haar block.
inline constexpr double kHaarStrength = std::numeric_limits<double>::infinity();

// Bob's guess: measure `scope` in a random basis near the standard one, then
// relabel outcome m to the key digit of m, flipped uniformly with probability `flip`.
inline KrausChannel random_guess(Rng& rng, const Layout& scope, const std::string& key_label, std::size_t d,
                                 double basis_strength, double flip, const std::string& guess_label = "G") {
  const std::size_t n = scope.total_dim();
  const auto nn = static_cast<Eigen::Index>(n);
  const Matrix basis = basis_strength == 0.0            ? Matrix(Matrix::Identity(nn, nn))
                       : basis_strength == kHaarStrength ? haar_unitary(rng, n)
                                                         : unitary_near_identity(rng, n, basis_strength);
  const auto key_pos = scope.position(key_label);
  std::vector<Matrix> ks;
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t digit = scope.digits(m)[key_pos];
    for (std::size_t g = 0; g < d; ++g) {
      const double t = g == digit ? 1.0 - flip : flip / static_cast<double>(d - 1);
      if (t <= 0.0) continue;
      Matrix k = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
      k.row(static_cast<Eigen::Index>(g)) = std::sqrt(t) * basis.col(static_cast<Eigen::Index>(m)).adjoint();
      ks.push_back(std::move(k));
    }
  }
  return KrausChannel(scope, Layout{{guess_label, d}}, std::move(ks));
}

// Random nondisturbing control instance (quantum extra channel) on
// A (d), A' (aux), B (d), B' (aux), E (dim_e).
inline ControlInstance gen_random_instance(const SuiteConfig& cfg, Rng& rng) {
  const std::size_t d = cfg.d;
  const std::size_t aux = cfg.dim_aux;
  const std::size_t e = cfg.dim_e;
  const Layout layout{{"A", d}, {"A'", aux}, {"B", d}, {"B'", aux}, {"E", e}};
  if (layout.total_dim() > kMaxTotalDim) throw Error("gen_random_instance: total dimension exceeds 256");

  static constexpr double kStrengths[] = {0.0, 0.05, 0.1, 0.3, kHaarStrength};
  const std::size_t n_blocks = 1 + rng.below(3);
  const auto probs = detail::random_probs(rng, n_blocks);
  const Layout eb{{"E", e}, {"B'", aux}};
  std::vector<Block<PureState>> blocks;
  for (std::size_t w = 0; w < n_blocks; ++w) {
    const double s = kStrengths[rng.below(std::size(kStrengths))];
    const Vector xi = haar_vector(rng, eb.total_dim());
    Vector ideal = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t ee = 0; ee < e; ++ee) {
        for (std::size_t bb = 0; bb < aux; ++bb) {
          const std::size_t digits[] = {i, 0, i, bb, ee};
          ideal(static_cast<Eigen::Index>(layout.index(digits))) =
              xi(static_cast<Eigen::Index>(ee * aux + bb)) / std::sqrt(static_cast<double>(d));
        }
      }
    }
    const Vector v = s == kHaarStrength ? haar_vector(rng, layout.total_dim()) : detail::perturb(rng, ideal, s);
    blocks.push_back({static_cast<int>(w), probs[w], PureState::normalized(layout, v)});
  }

  const double basis_s = kStrengths[rng.below(std::size(kStrengths))];
  const double flip = rng.below(2) == 0 ? 0.0 : 0.2 * rng.uniform();
  KrausChannel guess = random_guess(rng, Layout{{"B", d}, {"B'", aux}}, "B", d, basis_s, flip);

  // sum_i |i><i|_A (x) W_i X_B^{-i}, with W_i near identity on A'BB'
  const Layout target{{"A'", aux}, {"B", d}, {"B'", aux}};
  const double sec_s = kStrengths[rng.below(std::size(kStrengths))];
  const Matrix id_a = Matrix::Identity(static_cast<Eigen::Index>(aux), static_cast<Eigen::Index>(aux));
  std::vector<Matrix> branches;
  for (std::size_t i = 0; i < d; ++i) {
    const Matrix w = sec_s == kHaarStrength ? haar_unitary(rng, target.total_dim())
                                            : unitary_near_identity(rng, target.total_dim(), sec_s);
    branches.push_back(w * detail::kron(detail::kron(id_a, detail::shift(d, -static_cast<std::ptrdiff_t>(i))), id_a));
  }
  KrausChannel secondary = controlled_unitary("A", branches, target);

  return ControlInstance{PureBlocks(std::move(blocks)), std::move(guess), std::move(secondary), {},
                         ExtraChannel::Quantum, d, "A", {"E"}};
}

// Coherent key run on A, B, E, A' (d), B' (Eve's purifying dim):
// d^-1/2 sum_i |i>_A |i>_B |i>_A' |xi>_EB' per block, then perturbed.
// With `phase_noise` the A' copy carries random phases (a pure Z-phase on A').
inline CoherentKeyRun gen_key_run(const SuiteConfig& cfg, Rng& rng, double strength, bool phase_noise = false) {
  const std::size_t d = cfg.d;
  std::size_t e = cfg.dim_e;
  while (e > 1 && d * d * d * e * e > kMaxTotalDim) --e;
  const Layout layout{{"A", d}, {"B", d}, {"E", e}, {"A'", d}, {"B'", e}};
  const std::size_t n_blocks = 1 + rng.below(3);
  const auto probs = detail::random_probs(rng, n_blocks);
  std::vector<Block<PureState>> blocks;
  for (std::size_t w = 0; w < n_blocks; ++w) {
    const Vector xi = haar_vector(rng, e * e);
    std::vector<Complex> phase(d, Complex(1.0, 0.0));
    if (phase_noise) {
      for (auto& p : phase) p = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
    }
    Vector ideal = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t ee = 0; ee < e; ++ee) {
        for (std::size_t bb = 0; bb < e; ++bb) {
          const std::size_t digits[] = {i, i, ee, i, bb};
          ideal(static_cast<Eigen::Index>(layout.index(digits))) =
              phase[i] * xi(static_cast<Eigen::Index>(ee * e + bb)) / std::sqrt(static_cast<double>(d));
        }
      }
    }
    blocks.push_back({static_cast<int>(w), probs[w], PureState::normalized(layout, detail::perturb(rng, ideal, strength))});
  }
  return CoherentKeyRun{PureBlocks(std::move(blocks)), d, "A", "B", {"E"}};
}

struct DistillerCase {
  CoherentPrimary primary;
  LoccProtocol lambda;
};

// Coherent primary near MES (x) |00>_A'B' with controlled-in-Z V_AA' and a
// V_BB' that is controlled-in-Z up to a small perturbation; Lambda undoes V,
// then runs the Fourier measure-and-correct secondary. With `no_error` the
// state stays inside span{|ii>_AB} and V_BB' is exactly controlled, so no
// Z disagreement arises.
inline DistillerCase gen_distiller(const SuiteConfig& cfg, Rng& rng, bool no_error) {
  const std::size_t d = cfg.d;
  const std::size_t aux = cfg.dim_aux;
  const Layout layout{{"A", d}, {"A'", aux}, {"B", d}, {"B'", aux}};
  const auto n = layout.total_dim();
  static constexpr double kStrengths[] = {0.0, 0.05, 0.1, 0.2};
  const double s = kStrengths[rng.below(std::size(kStrengths))];
  const double mix = rng.below(2) == 0 ? 0.0 : 0.1 * rng.uniform();

  Vector ideal = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t digits[] = {i, 0, i, 0};
    ideal(static_cast<Eigen::Index>(layout.index(digits))) = 1.0 / std::sqrt(static_cast<double>(d));
  }
  // support: everything, or the no-error subspace span{|i, a', i, b'>}
  std::vector<Eigen::Index> support;
  for (std::size_t k = 0; k < n; ++k) {
    const auto dg = layout.digits(k);
    if (!no_error || dg[0] == dg[2]) support.push_back(static_cast<Eigen::Index>(k));
  }
  auto restricted = [&](const Vector& v) {
    Vector r = Vector::Zero(v.size());
    for (auto k : support) r(k) = v(k);
    return r;
  };
  const Vector psi = restricted(detail::perturb(rng, ideal, s));
  Matrix pre = psi * psi.adjoint() / psi.squaredNorm();
  if (mix > 0.0) {
    const Matrix noise = random_density_matrix(rng, n, 2);
    Matrix r = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (auto i : support) {
      for (auto j : support) r(i, j) = noise(i, j);
    }
    r /= r.trace().real();
    pre = (1.0 - mix) * pre + mix * r;
  }
  pre = (pre + pre.adjoint()).eval() / 2.0;

  const Layout la{{"A", d}, {"A'", aux}};
  const Layout lb{{"B", d}, {"B'", aux}};
  std::vector<Matrix> ra, rb;
  for (std::size_t i = 0; i < d; ++i) {
    ra.push_back(haar_unitary(rng, aux));
    rb.push_back(haar_unitary(rng, aux));
  }
  const Matrix va = controlled_unitary("A", ra, Layout{{"A'", aux}}).kraus().front();
  Matrix vb = controlled_unitary("B", rb, Layout{{"B'", aux}}).kraus().front();
  if (!no_error) vb = unitary_near_identity(rng, d * aux, kStrengths[rng.below(std::size(kStrengths))]) * vb;

  LoccProtocol lambda{la, lb, {}};
  lambda.rounds.push_back(local_unitary_round(Party::Alice, la, va.adjoint()));
  lambda.rounds.push_back(local_unitary_round(Party::Bob, lb, vb.adjoint()));
  const auto fourier = thm4_secondary(d, "A", "B");
  lambda.rounds.push_back(measurement_round(Party::Bob, Layout{{"B", d}}, fourier_basis(d)));
  LoccRound corr = fourier.rounds[1];
  corr.depends_on = 2;
  lambda.rounds.push_back(std::move(corr));

  CoherentPrimary primary{MixedBlocks({{0, 1.0, DensityOperator(layout, std::move(pre))}}), KrausChannel::unitary(la, va),
                          KrausChannel::unitary(lb, vb), d, "A", "B"};
  return {std::move(primary), std::move(lambda)};
}

// Two-qudit states for the classical-control certifier: half near MES, half Ginibre.
inline DensityOperator gen_two_qudit_state(std::size_t d, Rng& rng) {
  const Layout l{{"A", d}, {"B", d}};
  if (rng.below(2) == 0) return random_density(rng, l, 1 + rng.below(d * d));
  const double p = 0.3 * rng.uniform();
  const Matrix m = (1.0 - p) * DensityOperator(mes(d)).matrix() + p * random_density_matrix(rng, d * d);
  return DensityOperator(l, (m + m.adjoint()) / 2.0);
}

// rho'_AC of a random distiller, relabelled to (A, B).
inline DensityOperator gen_distiller_output(const SuiteConfig& cfg, Rng& rng) {
  const auto c = gen_distiller(cfg, rng, false);
  const auto r = thm3_run(c.primary, c.lambda, cfg.tol);
  return DensityOperator(Layout{{"A", cfg.d}, {"B", cfg.d}}, r.rho_ac.matrix());
}

// ---------------------------------------------------------------------------
// noise families

inline const std::vector<std::string>& noise_family_names() {
  static const std::vector<std::string> names{"depolarize-mes", "dephase-mes", "classical-flip"};
  return names;
}

// (1 - p) MES + p I/d^2
inline DensityOperator depolarized_mes(double p, std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d * d);
  Matrix m = (1.0 - p) * DensityOperator(mes(d)).matrix() + p * Matrix::Identity(n, n) / static_cast<double>(n);
  return DensityOperator(Layout{{"A", d}, {"B", d}}, std::move(m));
}

// MES with coherences scaled by (1 - p)
inline DensityOperator dephased_mes(double p, std::size_t d) {
  Matrix m = DensityOperator(mes(d)).matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j) m(i, j) *= (1.0 - p);
    }
  }
  return DensityOperator(Layout{{"A", d}, {"B", d}}, std::move(m));
}

// Ideal key instance (MES purified by nothing, Eve trivial) with Bob's guess
// flipped uniformly to a wrong value with probability p; the secondary is the
// exact controlled shift, so delta_X = 0 and delta_Z = p.
inline ControlInstance classical_flip_instance(double p, std::size_t d) {
  const PureState psi = tensor(mes(d), ket("E", 2, 0));
  Rng unused(0);  // identity basis draws nothing
  KrausChannel guess = random_guess(unused, Layout{{"B", d}}, "B", d, 0.0, p);
  std::vector<Matrix> branches;
  for (std::size_t i = 0; i < d; ++i) branches.push_back(detail::shift(d, -static_cast<std::ptrdiff_t>(i)));
  return ControlInstance{PureBlocks({{0, 1.0, psi}}), std::move(guess), controlled_unitary("A", branches, Layout{{"B", d}}),
                         {}, ExtraChannel::Quantum, d, "A", {"E"}};
}

using NoiseSample = std::variant<DensityOperator, ControlInstance>;

inline NoiseSample noise_family(const std::string& name, double p, std::size_t d) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error("noise_family: parameter must lie in [0, 1]");
  if (name == "depolarize-mes") return depolarized_mes(p, d);
  if (name == "dephase-mes") return dephased_mes(p, d);
  if (name == "classical-flip") return classical_flip_instance(p, d);
  throw Error("noise_family: unknown family '" + name + "'");
}

// ---------------------------------------------------------------------------
// suites

struct TrialResult {
  std::size_t trial = 0;
  int theorem = 0;
  std::string family;
  TheoremCertificate cert;
};

struct TheoremAggregate {
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
};

struct Report {
  SuiteConfig config;
  std::vector<TrialResult> trials;
  std::map<int, TheoremAggregate> aggregate;
  std::size_t failures = 0;
  double wall_time_s = 0.0;

  bool ok() const { return failures == 0; }
};

inline TrialResult run_trial(const SuiteConfig& cfg, int theorem, std::size_t t) {
  Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(theorem), t);
  TrialResult r{t, theorem, {}, {}};
  switch (theorem) {
    case 1:
      r.family = "random-control";
      r.cert = thm1_run(gen_random_instance(cfg, rng), cfg.tol).cert;
      break;
    case 2: {
      static constexpr double kStrengths[] = {0.0, 0.05, 0.1};
      const double s = kStrengths[rng.below(std::size(kStrengths))];
      const bool phase = rng.below(4) == 0;
      r.family = phase ? "key-run-phase" : "key-run";
      r.cert = thm2_build_secondary(gen_key_run(cfg, rng, s, phase), std::nullopt, cfg.tol).cert;
      break;
    }
    case 3: {
      const bool no_error = rng.below(4) == 0;
      const auto c = gen_distiller(cfg, rng, no_error);
      r.family = no_error ? "distiller-no-error" : "distiller";
      r.cert = thm3_run(c.primary, c.lambda, cfg.tol).cert;
      break;
    }
    case 4:
      if (rng.below(2) == 0) {
        r.family = "two-qudit";
        r.cert = thm4_run(gen_two_qudit_state(cfg.d, rng), cfg.d, cfg.tol).cert;
      } else {
        r.family = "roundtrip";
        r.cert = control_roundtrip(gen_distiller_output(cfg, rng), cfg.d, cfg.tol);
      }
      break;
    default:
      throw Error("run_trial: unknown theorem");
  }
  r.cert.seed = cfg.seed;
  return r;
}

// Trial t certifies theorem theorems[t % theorems.size()].
inline Report run_suite(const SuiteConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  Report rep{cfg, {}, {}, 0, 0.0};
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const int th = cfg.theorems[t % cfg.theorems.size()];
    rep.trials.push_back(run_trial(cfg, th, t));
    const auto& c = rep.trials.back().cert;
    auto& agg = rep.aggregate[th];
    ++agg.trials;
    agg.worst_slack = std::min(agg.worst_slack, c.worst_slack());
    if (!c.ok) {
      ++agg.failures;
      ++rep.failures;
    }
  }
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

// ---------------------------------------------------------------------------
// sweeps

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 1;

  // "lo:hi:n", n points including both ends
  static Grid parse(const std::string& s) {
    Grid g;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    in.imbue(std::locale::classic());
    long long n = 0;
    if (!(in >> g.lo >> c1 >> g.hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 || !in.eof()) {
      throw Error("grid: expected lo:hi:n, got '" + s + "'");
    }
    g.n = static_cast<std::size_t>(n);
    return g;
  }

  std::vector<double> points() const {
    std::vector<double> p;
    for (std::size_t k = 0; k < n; ++k) {
      p.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
    }
    return p;
  }
};

struct SweepRow {
  double param = 0.0;
  TheoremCertificate cert;
};

inline TheoremCertificate certify_family(const std::string& family, double p, int theorem, std::size_t d, double tol) {
  const NoiseSample sample = noise_family(family, p, d);
  if (const auto* rho = std::get_if<DensityOperator>(&sample)) {
    if (theorem == 4) return thm4_run(*rho, d, tol).cert;
    if (theorem == 3) return control_roundtrip(*rho, d, tol);
    if (theorem == 1) return thm1_run(thm4_run(*rho, d, tol).instance, tol).cert;
    throw Error("sweep: theorem " + std::to_string(theorem) + " does not apply to family '" + family + "'");
  }
  const auto& inst = std::get<ControlInstance>(sample);
  if (theorem == 1) return thm1_run(inst, tol).cert;
  throw Error("sweep: theorem " + std::to_string(theorem) + " does not apply to family '" + family + "'");
}

inline std::vector<SweepRow> sweep(const std::string& family, const Grid& grid, int theorem, std::size_t d,
                                   double tol = kBoundTol) {
  std::vector<SweepRow> rows;
  for (double p : grid.points()) rows.push_back({p, certify_family(family, p, theorem, d, tol)});
  return rows;
}

inline std::string format_double(double x) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  out << x;
  return out.str();
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string s = "param,delta_z,delta_x,achieved,bound,slack\n";
  for (const auto& r : rows) {
    const auto& q = r.cert.quantities;
    s += format_double(r.param) + "," + format_double(q.at("delta_z")) + "," + format_double(q.at("delta_x")) + "," +
         format_double(q.at("achieved")) + "," + format_double(q.at("bound")) + "," + format_double(q.at("slack")) + "\n";
  }
  return s;
}

}  // namespace cclab
