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

// Reference implementations used only by the tests. They share no code with
// the library beyond the Eigen matrix containers: eigenvalues come from a
// cyclic Jacobi sweep on the real embedding [[Re, -Im], [Im, Re]], and index
// manipulations are plain digit loops.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

struct RealEigen {
  std::vector<double> values;
  RMat vectors;  // columns
};

// Cyclic Jacobi for a real symmetric matrix.
inline RealEigen jacobi(RMat a) {
  const Eigen::Index n = a.rows();
  RMat v = RMat::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  RealEigen out;
  for (Eigen::Index k = 0; k < n; ++k) out.values.push_back(a(k, k));
  out.vectors = v;
  return out;
}

inline RMat embed(const CMat& h) {
  const Eigen::Index n = h.rows();
  RMat r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = h.real();
  r.topRightCorner(n, n) = -h.imag();
  r.bottomLeftCorner(n, n) = h.imag();
  r.bottomRightCorner(n, n) = h.real();
  return r;
}

inline CMat unembed(const RMat& r) {
  const Eigen::Index n = r.rows() / 2;
  CMat h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) h(i, j) = Complex(r(i, j), r(n + i, j));
  }
  return h;
}

// Eigenvalues of a Hermitian matrix, descending.
inline std::vector<double> eigenvalues(const CMat& h) {
  auto e = jacobi(embed((h + h.adjoint()) / 2.0));
  std::sort(e.values.begin(), e.values.end(), std::greater<>());
  std::vector<double> out;
  for (std::size_t k = 0; k < e.values.size(); k += 2) out.push_back((e.values[k] + e.values[k + 1]) / 2.0);
  return out;
}

inline double trace_norm(const CMat& h) {
  double s = 0.0;
  for (double v : eigenvalues(h)) s += std::abs(v);
  return s;
}

// Apply f to the spectrum of a Hermitian matrix (via the real embedding, which
// commutes with functional calculus).
template <class F>
CMat spectral_map(const CMat& h, F f) {
  const auto e = jacobi(embed((h + h.adjoint()) / 2.0));
  RMat d = RMat::Zero(e.vectors.rows(), e.vectors.cols());
  for (std::size_t k = 0; k < e.values.size(); ++k) d(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = f(e.values[k]);
  return unembed(e.vectors * d * e.vectors.transpose());
}

inline CMat sqrt_psd(const CMat& h) {
  return spectral_map(h, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

inline double fidelity(const CMat& rho, const CMat& sigma) {
  const CMat r = sqrt_psd(rho);
  double s = 0.0;
  for (double v : eigenvalues(r * sigma * r)) s += v > 0.0 ? std::sqrt(v) : 0.0;
  return s * s;
}

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      for (Eigen::Index k = 0; k < b.rows(); ++k) {
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
      }
    }
  }
  return out;
}

inline std::vector<std::size_t> digits(std::size_t n, const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> d(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    d[k] = n % dims[k];
    n /= dims[k];
  }
  return d;
}

inline std::size_t index(const std::vector<std::size_t>& d, const std::vector<std::size_t>& dims) {
  std::size_t n = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) n = n * dims[k] + d[k];
  return n;
}

inline std::size_t product(const std::vector<std::size_t>& dims) {
  std::size_t p = 1;
  for (auto d : dims) p *= d;
  return p;
}

// Keeps the positions flagged in `keep` (in their original order).
inline CMat partial_trace(const CMat& m, const std::vector<std::size_t>& dims, const std::vector<bool>& keep) {
  std::vector<std::size_t> kd;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (keep[k]) kd.push_back(dims[k]);
  }
  const std::size_t nk = product(kd), n = product(dims);
  CMat out = CMat::Zero(static_cast<Eigen::Index>(nk), static_cast<Eigen::Index>(nk));
  for (std::size_t r = 0; r < n; ++r) {
    const auto dr = digits(r, dims);
    for (std::size_t c = 0; c < n; ++c) {
      const auto dc = digits(c, dims);
      bool traced_equal = true;
      std::vector<std::size_t> kr, kc;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (keep[k]) {
          kr.push_back(dr[k]);
          kc.push_back(dc[k]);
        } else if (dr[k] != dc[k]) {
          traced_equal = false;
        }
      }
      if (!traced_equal) continue;
      out(static_cast<Eigen::Index>(index(kr, kd)), static_cast<Eigen::Index>(index(kc, kd))) +=
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

// In-place channel on the positions `scope` (in that order), applied through
// its Choi tensor J(i, o; i', o') = sum_k K(o, i) conj(K(o', i')).
inline CMat apply_choi(const std::vector<CMat>& kraus, const std::vector<std::size_t>& scope,
                       const std::vector<std::size_t>& dims, const CMat& rho) {
  std::vector<std::size_t> sd;
  for (auto p : scope) sd.push_back(dims[p]);
  const std::size_t ns = product(sd), n = product(dims);
  CMat choi = CMat::Zero(static_cast<Eigen::Index>(ns * ns), static_cast<Eigen::Index>(ns * ns));
  for (const auto& k : kraus) {
    for (std::size_t i = 0; i < ns; ++i) {
      for (std::size_t o = 0; o < ns; ++o) {
        for (std::size_t ip = 0; ip < ns; ++ip) {
          for (std::size_t op = 0; op < ns; ++op) {
            choi(static_cast<Eigen::Index>(i * ns + o), static_cast<Eigen::Index>(ip * ns + op)) +=
                k(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)) *
                std::conj(k(static_cast<Eigen::Index>(op), static_cast<Eigen::Index>(ip)));
          }
        }
      }
    }
  }
  auto scope_index = [&](const std::vector<std::size_t>& d) {
    std::vector<std::size_t> s;
    for (auto p : scope) s.push_back(d[p]);
    return index(s, sd);
  };
  auto replace = [&](std::vector<std::size_t> d, std::size_t s_idx) {
    const auto sdig = digits(s_idx, sd);
    for (std::size_t k = 0; k < scope.size(); ++k) d[scope[k]] = sdig[k];
    return index(d, dims);
  };
  CMat out = CMat::Zero(rho.rows(), rho.cols());
  for (std::size_t r = 0; r < n; ++r) {
    const auto dr = digits(r, dims);
    const std::size_t i = scope_index(dr);
    for (std::size_t c = 0; c < n; ++c) {
      const auto dc = digits(c, dims);
      const std::size_t ip = scope_index(dc);
      const Complex v = rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      if (v == Complex(0.0, 0.0)) continue;
      for (std::size_t o = 0; o < ns; ++o) {
        for (std::size_t op = 0; op < ns; ++op) {
          const Complex j = choi(static_cast<Eigen::Index>(i * ns + o), static_cast<Eigen::Index>(ip * ns + op));
          if (j == Complex(0.0, 0.0)) continue;
          out(static_cast<Eigen::Index>(replace(dr, o)), static_cast<Eigen::Index>(replace(dc, op))) += j * v;
        }
      }
    }
  }
  return out;
}

inline double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace oracle
