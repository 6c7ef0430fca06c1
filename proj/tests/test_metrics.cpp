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

#include "oracles.hpp"

#include <cclab/channels.hpp>
#include <cclab/metrics.hpp>
#include <cclab/random.hpp>
#include <cclab/scenarios.hpp>

#include <gtest/gtest.h>

namespace cclab {
namespace {

const Layout kQubit{{"A", 2}};

DensityOperator plus_state() { return DensityOperator(PureState(kQubit, Vector::Constant(2, 1.0 / std::sqrt(2.0)))); }

// Random channel on `scope`: a Haar isometry into scope (x) env, cut into Kraus blocks.
KrausChannel random_channel(Rng& rng, const Layout& scope, std::size_t n_kraus) {
  const std::size_t n = scope.total_dim();
  const Matrix u = haar_unitary(rng, n * n_kraus);
  std::vector<Matrix> ks;
  for (std::size_t k = 0; k < n_kraus; ++k) {
    ks.push_back(u.block(static_cast<Eigen::Index>(k * n), 0, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  }
  return KrausChannel::in_place(scope, std::move(ks));
}

TEST(TraceDistance, Examples) {
  const auto z0 = DensityOperator(ket("A", 2, 0));
  const auto z1 = DensityOperator(ket("A", 2, 1));
  EXPECT_NEAR(trace_distance(z0, z0), 0.0, 1e-15);
  EXPECT_NEAR(trace_distance(z0, z1), 2.0, 1e-15);
  EXPECT_NEAR(trace_distance(z0, plus_state()), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(oracle::trace_norm(z0.matrix() - plus_state().matrix()), std::sqrt(2.0), 1e-12);
}

TEST(TraceDistance, LayoutMismatchThrows) {
  EXPECT_THROW(trace_distance(DensityOperator(ket("A", 2, 0)), DensityOperator(ket("B", 2, 0))), Error);
}

TEST(TraceDistance, RandomMatchesOracleSymmetricAndTriangle) {
  Rng rng(21);
  for (int t = 0; t < 50; ++t) {
    const Layout l{{"A", 2 + rng.below(7)}};
    const auto a = random_density(rng, l, 1 + rng.below(3));
    const auto b = random_density(rng, l);
    const auto c = random_density(rng, l);
    const double ab = trace_distance(a, b);
    EXPECT_NEAR(ab, oracle::trace_norm(a.matrix() - b.matrix()), 1e-10);
    EXPECT_NEAR(ab, trace_distance(b, a), 1e-12);
    EXPECT_LE(ab, trace_distance(a, c) + trace_distance(c, b) + 1e-9);
    EXPECT_LE(ab, 2.0 + 1e-12);
  }
}

TEST(TraceDistance, BlockStatesCountMissingRecordsAtFullWeight) {
  const auto z0 = DensityOperator(ket("A", 2, 0));
  const auto z1 = DensityOperator(ket("A", 2, 1));
  const MixedBlocks r({{0, 0.5, z0}, {1, 0.5, z1}});
  const MixedBlocks s({{0, 0.5, z0}, {2, 0.5, z1}});
  EXPECT_NEAR(trace_distance(r, s), 1.0, 1e-15);
  // blockwise equals the flattened distance on a common record register
  const MixedBlocks r3({{0, 0.5, z0}, {2, 0.5, plus_state()}});
  const MixedBlocks s3({{0, 0.25, plus_state()}, {2, 0.75, z1}});
  EXPECT_NEAR(trace_distance(r3, s3), trace_distance(flatten(r3), flatten(s3)), 1e-12);
}

TEST(Fidelity, Examples) {
  const auto z0 = DensityOperator(ket("A", 2, 0));
  EXPECT_NEAR(fidelity(z0, z0), 1.0, 1e-14);
  EXPECT_NEAR(fidelity(z0, plus_state()), 0.5, 1e-14);
  EXPECT_NEAR(fidelity(maximally_mixed(kQubit), z0), 0.5, 1e-14);
  EXPECT_NEAR(fidelity(maximally_mixed(kQubit), ket("A", 2, 0)), 0.5, 1e-15);
}

TEST(Fidelity, RandomMatchesJacobiOracleAndPureShortcut) {
  Rng rng(22);
  for (int t = 0; t < 50; ++t) {
    const Layout l{{"A", 2 + rng.below(5)}};
    const auto a = random_density(rng, l);
    const auto b = random_density(rng, l);
    const double f = fidelity(a, b);
    EXPECT_NEAR(f, oracle::fidelity(a.matrix(), b.matrix()), 1e-9);
    EXPECT_NEAR(f, fidelity(b, a), 1e-12);
    const auto psi = haar_state(rng, l);
    EXPECT_NEAR(fidelity(a, DensityOperator(psi)), fidelity(a, psi), 1e-10);
  }
}

TEST(Fidelity, RankDeficientStatesKeepFullPrecision) {
  Rng rng(23);
  const Layout l{{"A", 6}};
  const auto psi = haar_state(rng, l);
  const auto rho = random_density(rng, l, 2);
  // pure reference: exact value is <psi|rho|psi>
  EXPECT_NEAR(fidelity(rho, DensityOperator(psi)), fidelity(rho, psi), 1e-13);
}

TEST(Fidelity, BlockStates) {
  const auto z0 = DensityOperator(ket("A", 2, 0));
  const MixedBlocks r({{0, 0.5, z0}, {1, 0.5, plus_state()}});
  const MixedBlocks s({{0, 0.5, z0}, {1, 0.5, z0}});
  const double expect = std::pow(0.5 + 0.5 * std::sqrt(0.5), 2);
  EXPECT_NEAR(fidelity(r, s), expect, 1e-14);
  EXPECT_NEAR(fidelity(r, s), fidelity(flatten(r), flatten(s)), 1e-12);
}

TEST(Fvdg, Examples) {
  const auto z0 = DensityOperator(ket("A", 2, 0));
  const auto z1 = DensityOperator(ket("A", 2, 1));
  auto r = fvdg_check(z0, z0);
  EXPECT_TRUE(r.ok);
  EXPECT_NEAR(r.lower, 0.0, 1e-14);
  EXPECT_NEAR(r.dist, 0.0, 1e-14);
  EXPECT_NEAR(r.upper, 0.0, 1e-6);
  r = fvdg_check(z0, z1);
  EXPECT_TRUE(r.ok);
  EXPECT_NEAR(r.lower, 2.0, 1e-14);
  EXPECT_NEAR(r.dist, 2.0, 1e-14);
  EXPECT_NEAR(r.upper, 2.0, 1e-14);
}

TEST(Fvdg, HoldsOnRandomPairs) {
  Rng rng(24);
  for (int t = 0; t < 200; ++t) {
    const Layout l{{"A", 2 + rng.below(7)}};
    const auto r = fvdg_check(random_density(rng, l, 1 + rng.below(l.total_dim())), random_density(rng, l, 1 + rng.below(2)));
    EXPECT_TRUE(r.ok) << r.lower << " " << r.dist << " " << r.upper;
  }
}

TEST(Monotonicity, RandomChannelsContractDistanceAndRaiseFidelity) {
  Rng rng(25);
  for (int t = 0; t < 30; ++t) {
    const Layout l{{"A", 2}, {"B", 2}};
    const auto a = random_density(rng, l);
    const auto b = random_density(rng, l, 1);
    const auto ch = random_channel(rng, Layout{{"B", 2}}, 1 + rng.below(3));
    EXPECT_LE(trace_distance(apply(ch, a), apply(ch, b)), trace_distance(a, b) + 1e-9);
    EXPECT_GE(fidelity(apply(ch, a), apply(ch, b)), fidelity(a, b) - 1e-9);
  }
}

TEST(Purify, MaximallyMixedGivesMaximallyEntangledVector) {
  const auto psi = purify(maximally_mixed(kQubit), "R");
  EXPECT_EQ(psi.layout().labels(), (std::vector<std::string>{"A", "R"}));
  EXPECT_LE((partial_trace(psi, {"A"}).matrix() - Matrix::Identity(2, 2) / 2.0).norm(), 1e-14);
  EXPECT_LE((partial_trace(psi, {"R"}).matrix() - Matrix::Identity(2, 2) / 2.0).norm(), 1e-14);
}

TEST(Purify, PureInputIsProductWithExtension) {
  const auto psi = purify(plus_state(), "R");
  const auto r = partial_trace(psi, {"R"});
  EXPECT_NEAR(std::abs(r.matrix()(0, 0)), 1.0, 1e-14);
}

TEST(Purify, RandomRankThreeRoundTripAndTooSmallThrows) {
  Rng rng(26);
  const auto rho = random_density(rng, Layout{{"A", 4}}, 3);
  const auto psi = purify(rho, "R", 3);
  EXPECT_LE((partial_trace(psi, {"A"}).matrix() - rho.matrix()).norm(), 1e-9);
  EXPECT_THROW(purify(rho, "R", 2), Error);
}

TEST(Uhlmann, EqualStatesAndOrthogonalPureStates) {
  Rng rng(27);
  const auto rho = random_density(rng, Layout{{"A", 3}});
  EXPECT_NEAR(uhlmann_pair(rho, rho, "R").overlap_sq, 1.0, 1e-12);
  const auto z0 = DensityOperator(ket("A", 2, 0));
  const auto z1 = DensityOperator(ket("A", 2, 1));
  EXPECT_NEAR(uhlmann_pair(z0, z1, "R").overlap_sq, 0.0, 1e-15);
}

TEST(Uhlmann, RandomPairsAttainFidelityAndPurifyTheInputs) {
  Rng rng(28);
  for (int t = 0; t < 50; ++t) {
    const Layout l{{"A", 4}};
    const auto a = random_density(rng, l, 1 + rng.below(4));
    const auto b = random_density(rng, l, 1 + rng.below(4));
    const auto p = uhlmann_pair(a, b, "R");
    EXPECT_NEAR(p.overlap_sq, fidelity(a, b), 1e-8);
    EXPECT_NEAR(std::norm(p.phi_rho.amplitudes().dot(p.phi_sigma.amplitudes())), p.overlap_sq, 1e-12);
    EXPECT_LE((partial_trace(p.phi_rho, {"A"}).matrix() - a.matrix()).norm(), 1e-9);
    EXPECT_LE((partial_trace(p.phi_sigma, {"A"}).matrix() - b.matrix()).norm(), 1e-9);
  }
}

TEST(Uhlmann, ExtensionOfGivenPurificationKeepsItsLayout) {
  Rng rng(29);
  const Layout l{{"A", 2}, {"B", 3}};
  const auto phi = haar_state(rng, l);
  const auto tau = random_density(rng, Layout{{"A", 2}});
  const auto ext = uhlmann_extension(phi, tau);
  EXPECT_EQ(ext.layout().labels(), phi.layout().labels());
  EXPECT_LE((partial_trace(ext, {"A"}).matrix() - tau.matrix()).norm(), 1e-9);
  EXPECT_NEAR(std::norm(phi.amplitudes().dot(ext.amplitudes())), fidelity(partial_trace(phi, {"A"}), tau), 1e-9);
}

}  // namespace
}  // namespace cclab
