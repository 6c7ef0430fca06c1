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

#include <cclab/harness.hpp>
#include <cclab/theorems.hpp>

#include <gtest/gtest.h>

namespace cclab {
namespace {

void expect_all_ok(const TheoremCertificate& c) {
  EXPECT_TRUE(c.ok);
  for (const auto& chk : c.checks) EXPECT_TRUE(chk.ok) << chk.name << " achieved " << chk.achieved << " bound " << chk.bound;
}

CoherentPrimary plain_primary(const DensityOperator& rho_ab) {
  return CoherentPrimary{MixedBlocks({{0, 1.0, rho_ab}}), KrausChannel::identity(Layout{{"A", 2}}),
                         KrausChannel::identity(Layout{{"B", 2}}), 2, "A", "B"};
}

// --- key from complementary control ---------------------------------------

TEST(KeyFromControl, IdealInstanceHasZeroKeyError) {
  for (std::size_t d : {2u, 3u}) {
    const auto r = thm1_run(classical_flip_instance(0.0, d));
    expect_all_ok(r.cert);
    EXPECT_NEAR(r.cert.quantities.at("delta_key"), 0.0, 1e-12);
    EXPECT_NEAR(r.cert.quantities.at("delta_z"), 0.0, 1e-15);
    EXPECT_NEAR(r.cert.quantities.at("delta_x"), 0.0, 1e-14);
    // the bound carries 2 sqrt(delta_x), so round-off in delta_x shows up magnified
    const auto& q = r.cert.quantities;
    EXPECT_NEAR(q.at("slack"), 2.0 * q.at("delta_z") + 2.0 * std::sqrt(q.at("delta_x")) - q.at("delta_key"), 1e-12);
    EXPECT_LE(q.at("slack"), 2e-7);
  }
}

TEST(KeyFromControl, GuessFlipGivesTwiceTheDisagreement) {
  for (double eps : {0.05, 0.1, 0.3}) {
    const auto r = thm1_run(classical_flip_instance(eps, 2));
    expect_all_ok(r.cert);
    EXPECT_NEAR(r.cert.quantities.at("delta_z"), eps, 1e-14);
    // explicit states on (A, G, E): rho = sum p_ij |ij><ij| (x) |0><0|, sigma' = sum 1/2 |ii><ii| (x) |0><0|
    oracle::CMat rho = oracle::CMat::Zero(8, 8), sigma = oracle::CMat::Zero(8, 8);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        const auto k = static_cast<Eigen::Index>(oracle::index({i, j, 0}, {2, 2, 2}));
        rho(k, k) = i == j ? (1.0 - eps) / 2.0 : eps / 2.0;
        if (i == j) sigma(k, k) = 0.5;
      }
    }
    EXPECT_NEAR(oracle::trace_norm(sigma - rho), 2.0 * eps, 1e-12);
    EXPECT_NEAR(trace_distance(r.sigma_prime, r.rho_abe), 2.0 * eps, 1e-9);
    EXPECT_LE(oracle::max_abs(average(r.rho_abe).matrix() - rho), 1e-14);
    EXPECT_LE(oracle::max_abs(average(r.sigma_prime).matrix() - sigma), 1e-14);
  }
}

TEST(KeyFromControl, RandomInstancesCertify) {
  for (std::size_t d : {2u, 3u}) {
    SuiteConfig cfg;
    cfg.d = d;
    cfg.dim_e = 4;
    Rng rng(51 + d);
    for (int t = 0; t < 20; ++t) {
      const auto r = thm1_run(gen_random_instance(cfg, rng));
      expect_all_ok(r.cert);
      const auto* id = r.cert.find("sigma_prime_vs_rho_equals_2_delta_z");
      ASSERT_NE(id, nullptr);
      EXPECT_LE(std::abs(id->achieved - id->bound), 1e-9);
    }
  }
}

TEST(KeyFromControl, RejectsDisturbingSecondary) {
  auto inst = classical_flip_instance(0.0, 2);
  Matrix h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  inst.secondary = KrausChannel::unitary(Layout{{"A", 2}}, h / std::sqrt(2.0));
  EXPECT_THROW(thm1_run(inst), Error);
}

// --- secondary from a coherent key run ------------------------------------

TEST(SecondaryFromKey, ExactKeyRunSteersPerfectly) {
  SuiteConfig cfg;
  Rng rng(61);
  for (int t = 0; t < 5; ++t) {
    const auto r = thm2_build_secondary(gen_key_run(cfg, rng, 0.0));
    expect_all_ok(r.cert);
    EXPECT_LE(r.cert.quantities.at("delta_key"), 1e-9);
    EXPECT_LE(r.cert.quantities.at("delta_x"), 1e-9);
  }
}

TEST(SecondaryFromKey, PhaseNoiseOnCopyIsAbsorbed) {
  SuiteConfig cfg;
  Rng rng(62);
  for (int t = 0; t < 5; ++t) {
    const auto r = thm2_build_secondary(gen_key_run(cfg, rng, 0.0, true));
    expect_all_ok(r.cert);
    EXPECT_LE(r.cert.quantities.at("delta_key"), 1e-9);
    EXPECT_LE(r.cert.quantities.at("delta_x"), 1e-9);
  }
}

TEST(SecondaryFromKey, PerturbedRunsCertify) {
  SuiteConfig cfg;
  Rng rng(63);
  for (double s : {0.05, 0.1}) {
    for (int t = 0; t < 10; ++t) {
      const auto r = thm2_build_secondary(gen_key_run(cfg, rng, s, t % 3 == 0));
      expect_all_ok(r.cert);
      EXPECT_LE(r.cert.quantities.at("nondisturbing_residual"), 1e-9);
      EXPECT_LE(r.cert.quantities.at("delta_x_ideal"), 1e-9);
      for (const auto& [omega, ch] : r.secondary) EXPECT_TRUE(is_nondisturbing(ch, "A", 2).ok);
    }
  }
}

TEST(SecondaryFromKey, FlatReferenceWithRecordRegister) {
  SuiteConfig cfg;
  Rng rng(64);
  const auto run = gen_key_run(cfg, rng, 0.1);
  const auto base = thm2_build_secondary(run);
  const MixedBlocks rho = map_blocks(run.state, [&](const PureState& psi) {
    return reorder(partial_trace(psi, run.key_labels()), run.key_labels());
  });
  const TripartiteKeyState flat{flatten(canonical_key_reference(rho, 2)), 2};
  const auto r = thm2_build_secondary(run, flat);
  expect_all_ok(r.cert);
  EXPECT_NEAR(r.cert.quantities.at("delta_key"), base.cert.quantities.at("delta_key"), 1e-12);
  EXPECT_NEAR(r.cert.quantities.at("delta_x"), base.cert.quantities.at("delta_x"), 1e-9);
}

TEST(SecondaryFromKey, PadsWhenNoRoomForExtension) {
  // pure entangled AB, no auxiliaries: the classical reference has rank 2
  const CoherentKeyRun run{PureBlocks({{0, 1.0, tensor(mes(2), ket("E", 2, 0))}}), 2, "A", "B", {"E"}};
  const auto r = thm2_build_secondary(run);
  expect_all_ok(r.cert);
  EXPECT_EQ(r.cert.quantities.at("padded_dim"), 2.0);
  EXPECT_NEAR(r.cert.quantities.at("delta_key"), 1.0, 1e-12);
  EXPECT_TRUE(r.run.state.layout().contains("B'"));
}

TEST(SecondaryFromKey, InstanceFeedsKeyTheorem) {
  SuiteConfig cfg;
  Rng rng(65);
  const auto r = thm2_build_secondary(gen_key_run(cfg, rng, 0.05));
  const auto t1 = thm1_run(thm2_instance(r));
  expect_all_ok(t1.cert);
  EXPECT_NEAR(t1.cert.quantities.at("delta_x"), r.cert.quantities.at("delta_x"), 1e-9);
  EXPECT_NEAR(t1.cert.quantities.at("delta_z"), r.cert.quantities.at("delta_z"), 1e-9);
}

// --- distiller from a coherent primary -------------------------------------

TEST(Distiller, PerfectCase) {
  const auto r = thm3_run(plain_primary(DensityOperator(mes(2))), thm4_secondary(2));
  expect_all_ok(r.cert);
  EXPECT_NEAR(r.cert.quantities.at("delta_z"), 0.0, 1e-15);
  EXPECT_NEAR(r.cert.quantities.at("delta_x"), 0.0, 1e-14);
  EXPECT_LE(r.cert.quantities.at("delta_ent"), 1e-8);
}

TEST(Distiller, NoErrorInputsGiveCoincidingCopies) {
  SuiteConfig cfg;
  Rng rng(71);
  for (int t = 0; t < 10; ++t) {
    const auto c = gen_distiller(cfg, rng, true);
    const auto r = thm3_run(c.primary, c.lambda);
    expect_all_ok(r.cert);
    EXPECT_LE(r.cert.quantities.at("delta_z"), 1e-12);
    EXPECT_LE(trace_distance(r.sigma_prime, r.sigma_double), 1e-10);
  }
}

TEST(Distiller, RandomCasesCertify) {
  SuiteConfig cfg;
  Rng rng(72);
  for (int t = 0; t < 20; ++t) {
    const auto c = gen_distiller(cfg, rng, false);
    expect_all_ok(thm3_run(c.primary, c.lambda).cert);
  }
}

TEST(Distiller, DepolarizedFamily) {
  for (double p : {0.05, 0.1, 0.2}) {
    const auto r = thm3_run(plain_primary(depolarized_mes(p, 2)), thm4_secondary(2));
    expect_all_ok(r.cert);
    // Fourier measure-and-correct on the depolarized state: delta_ent of the output equals the input's
    EXPECT_NEAR(r.cert.quantities.at("delta_ent"), 1.5 * p, 1e-9);
  }
}

TEST(Distiller, CopyLemmaFailsBeyondTwoThirdsButTightFormHolds) {
  // (|01> + |10>)/sqrt2: the guess always disagrees, delta_Z = 1, the copies are orthogonal
  Vector v = Vector::Zero(4);
  v(1) = v(2) = 1.0 / std::sqrt(2.0);
  const auto r = thm3_run(plain_primary(DensityOperator(PureState(Layout{{"A", 2}, {"B", 2}}, v))), thm4_secondary(2));
  EXPECT_NEAR(r.cert.quantities.at("delta_z"), 1.0, 1e-15);
  EXPECT_NEAR(r.cert.quantities.at("copy_distance"), 2.0, 1e-12);
  EXPECT_FALSE(r.cert.find("copy_distance")->ok);
  EXPECT_TRUE(r.cert.find("copy_distance_tight")->ok);
  EXPECT_FALSE(r.cert.ok);
}

TEST(Distiller, TightCopyBoundNeverExceedsTheStatedOneBelowTwoThirds) {
  for (double dz = 0.0; dz <= 2.0 / 3.0; dz += 0.01) EXPECT_LE(copy_lemma_tight(dz), copy_lemma_bound(dz) + 1e-15);
  EXPECT_GT(copy_lemma_tight(0.8), copy_lemma_bound(0.8));
}

TEST(Distiller, RejectsBadInputs) {
  Matrix h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  LoccProtocol disturbing{Layout{{"A", 2}}, Layout{{"B", 2}},
                          {local_unitary_round(Party::Alice, Layout{{"A", 2}}, h / std::sqrt(2.0))}};
  EXPECT_THROW(thm3_run(plain_primary(DensityOperator(mes(2))), disturbing), Error);
  auto p = plain_primary(DensityOperator(mes(2)));
  p.v_alice = z_pinch("A", 2);
  EXPECT_THROW(thm3_run(p, thm4_secondary(2)), Error);
}

// --- classical-channel control from a two-qudit state ----------------------

TEST(ClassicalControl, MaximallyEntangledInput) {
  for (std::size_t d : {2u, 3u}) {
    const auto r = thm4_run(DensityOperator(mes(d)), d);
    expect_all_ok(r.cert);
    EXPECT_NEAR(r.cert.quantities.at("delta_z"), 0.0, 1e-14);
    EXPECT_NEAR(r.cert.quantities.at("delta_x"), 0.0, 1e-14);
  }
}

TEST(ClassicalControl, OrthogonalInputIsVacuous) {
  const auto r = thm4_run(DensityOperator(basis_state(Layout{{"A", 2}, {"B", 2}}, {0, 1})), 2);
  expect_all_ok(r.cert);
  EXPECT_NEAR(r.cert.quantities.at("delta_ent"), 2.0, 1e-14);
  EXPECT_LE(r.cert.quantities.at("delta_z"), 1.0);
  EXPECT_LE(r.cert.quantities.at("delta_x"), 1.0);
}

TEST(ClassicalControl, DepolarizedTwentyPercent) {
  const double p = 0.2;
  const auto rho = depolarized_mes(p, 2);
  const auto r = thm4_run(rho, 2);
  expect_all_ok(r.cert);
  EXPECT_NEAR(r.cert.quantities.at("delta_ent"), 0.3, 1e-12);
  // disagreement by the direct formula 1 - sum_i <ii|rho|ii>
  const double dz = 1.0 - rho.matrix()(0, 0).real() - rho.matrix()(3, 3).real();
  EXPECT_NEAR(dz, p / 2.0, 1e-15);
  EXPECT_NEAR(r.cert.quantities.at("delta_z"), dz, 1e-12);
  // steering by the explicit two-round Kraus product
  std::vector<oracle::CMat> ks;
  for (std::size_t k = 0; k < 2; ++k) {
    oracle::CMat ph = oracle::CMat::Identity(2, 2);
    ph(1, 1) = k == 0 ? 1.0 : -1.0;
    const Vector f = fourier_vector(2, k);
    ks.push_back(oracle::kron(ph, f * f.adjoint()));
  }
  const auto out = oracle::apply_choi(ks, {0, 1}, {2, 2}, rho.matrix());
  const oracle::CMat sa = oracle::partial_trace(out, {2, 2}, {true, false});
  const Vector x = fourier_vector(2, 0);
  const double dx = 1.0 - (x.adjoint() * sa * x)(0, 0).real();
  EXPECT_NEAR(dx, p / 2.0, 1e-12);
  EXPECT_NEAR(r.cert.quantities.at("delta_x"), dx, 1e-12);
  EXPECT_LE(r.cert.quantities.at("delta_x"), 0.3 - 0.0225 + 1e-8);
}

TEST(ClassicalControl, RandomStatesCertify) {
  for (std::size_t d : {2u, 3u}) {
    Rng rng(81 + d);
    for (int t = 0; t < 15; ++t) expect_all_ok(thm4_run(gen_two_qudit_state(d, rng), d).cert);
  }
}

TEST(ClassicalControl, SecondaryIsLoccAndNondisturbing) {
  const auto r = thm4_run(DensityOperator(mes(3)), 3);
  EXPECT_EQ(r.instance.extra_channel, ExtraChannel::Classical);
  EXPECT_TRUE(check_instance(r.instance).ok);
  EXPECT_THROW(thm4_run(DensityOperator(mes(2)), 3), Error);
}

TEST(Roundtrip, DistillerOutputsCloseTheLoop) {
  SuiteConfig cfg;
  Rng rng(91);
  for (int t = 0; t < 15; ++t) {
    const auto c = control_roundtrip(gen_distiller_output(cfg, rng), 2);
    expect_all_ok(c);
    EXPECT_LE(c.find("delta_z_consistent")->slack, 0.0);
    EXPECT_GE(c.find("delta_z_consistent")->slack, -1e-9);
  }
}

TEST(Roundtrip, ShiftedEntangledStateBreaksTheStatedChain) {
  Vector v = Vector::Zero(4);
  v(1) = v(2) = 1.0 / std::sqrt(2.0);
  const auto c = control_roundtrip(DensityOperator(PureState(Layout{{"A", 2}, {"B", 2}}, v)), 2);
  EXPECT_NEAR(c.quantities.at("delta_ent"), 2.0, 1e-12);
  EXPECT_FALSE(c.find("delta_ent_roundtrip")->ok);
  EXPECT_TRUE(c.find("thm4.delta_x")->ok);
}

}  // namespace
}  // namespace cclab
