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

// Reproducible sampling. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard. Distributions are implemented here (the standard
// library's are implementation-defined):
//   uniform  = (x >> 11) * 2^-53
//   normal   = Box-Muller on two uniforms, both outputs used
// Stream rule: the generator for (seed, stream, index) is seeded with
//   splitmix64(seed ^ splitmix64(stream * 0x9E3779B97F4A7C15 + index)).

#include <cclab/qmat.hpp>

#include <cstdint>
#include <numbers>
#include <random>

namespace cclab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return Rng(splitmix64(seed ^ splitmix64(stream * 0x9E3779B97F4A7C15ULL + index)));
  }

  std::uint64_t next() { return engine_(); }

  // in [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // in [0, n)
  std::size_t below(std::size_t n) {
    if (n == 0) throw Error("Rng::below: empty range");
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  double normal() {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    cached_ = true;
    return r * std::cos(t);
  }

  // standard complex Gaussian, E|z|^2 = 1
  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool cached_ = false;
};

inline Vector gaussian_vector(Rng& rng, std::size_t n) {
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
  return v;
}

inline Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.complex_normal();
  }
  return m;
}

inline Vector haar_vector(Rng& rng, std::size_t n) {
  Vector v = gaussian_vector(rng, n);
  return v / v.norm();
}

inline PureState haar_state(Rng& rng, const Layout& layout) {
  return PureState::normalized(layout, gaussian_vector(rng, layout.total_dim()));
}

// Gram-Schmidt of Gaussian columns, left to right.
inline Matrix haar_unitary(Rng& rng, std::size_t n) {
  const Matrix g = gaussian_matrix(rng, n, n);
  Matrix q(g.rows(), g.cols());
  for (Eigen::Index k = 0; k < g.cols(); ++k) {
    Vector v = g.col(k);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < k; ++j) v -= q.col(j) * q.col(j).dot(v);
    }
    q.col(k) = v / v.norm();
  }
  return q;
}

// exp(i s H) for a GUE-like Hermitian H normalized to unit spectral scale.
inline Matrix unitary_near_identity(Rng& rng, std::size_t n, double strength) {
  const Matrix g = gaussian_matrix(rng, n, n);
  const Matrix h = (g + g.adjoint()) / 2.0;
  const auto e = eig_hermitian(h);
  const double scale = std::max(1e-300, e.values.cwiseAbs().maxCoeff());
  Vector phases(e.values.size());
  for (Eigen::Index k = 0; k < e.values.size(); ++k) phases(k) = std::polar(1.0, strength * e.values(k) / scale);
  return e.vectors * phases.asDiagonal() * e.vectors.adjoint();
}

// Ginibre ensemble of the given rank (rank = 0 means full rank).
inline Matrix random_density_matrix(Rng& rng, std::size_t n, std::size_t rank = 0) {
  const Matrix g = gaussian_matrix(rng, n, rank == 0 ? n : rank);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return (rho + rho.adjoint()) / 2.0;
}

inline DensityOperator random_density(Rng& rng, const Layout& layout, std::size_t rank = 0) {
  return DensityOperator(layout, random_density_matrix(rng, layout.total_dim(), rank));
}

}  // namespace cclab
