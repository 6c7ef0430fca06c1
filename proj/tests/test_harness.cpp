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

#include <cclab/io.hpp>

#include <gtest/gtest.h>

namespace cclab {
namespace {

TEST(Rng, SplitmixKnownValues) {
  // reference outputs of the splitmix64 finalizer for inputs 0 and 1
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(splitmix64(1), 0x910A2DEC89025CC1ULL);
}

TEST(Rng, Mt19937KnownValue) {
  // the 10000th output of a default-seeded mt19937_64 is fixed by the standard
  Rng rng(5489u);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next();
  EXPECT_EQ(x, 9981545732273789042ULL);
}

TEST(Rng, StreamsAreDistinctAndReproducible) {
  auto a = Rng::stream(7, 1, 0), b = Rng::stream(7, 1, 0), c = Rng::stream(7, 1, 1), e = Rng::stream(7, 2, 0);
  const auto va = a.next();
  EXPECT_EQ(va, b.next());
  EXPECT_NE(va, c.next());
  EXPECT_NE(va, e.next());
}

TEST(Rng, UniformAndNormalMoments) {
  Rng rng(11);
  double s = 0.0, s2 = 0.0, z2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double g = rng.normal();
    s += g;
    s2 += g * g;
    z2 += std::norm(rng.complex_normal());
  }
  EXPECT_NEAR(s / n, 0.0, 0.05);
  EXPECT_NEAR(s2 / n, 1.0, 0.05);
  EXPECT_NEAR(z2 / n, 1.0, 0.05);
  EXPECT_THROW(rng.below(0), Error);
}

TEST(Sampling, HaarUnitaryAndDensities) {
  Rng rng(12);
  for (std::size_t n : {2u, 5u, 16u}) {
    const Matrix u = haar_unitary(rng, n);
    EXPECT_LE((u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm(), 1e-12);
    const Matrix v = unitary_near_identity(rng, n, 0.1);
    EXPECT_LE((v.adjoint() * v - Matrix::Identity(v.rows(), v.cols())).norm(), 1e-12);
    EXPECT_LE((v - Matrix::Identity(v.rows(), v.cols())).norm(), 0.1 * std::sqrt(double(n)) + 1e-12);
    const auto rho = random_density_matrix(rng, n, 2);
    EXPECT_TRUE(validate_density(rho).ok);
    EXPECT_EQ(numerical_rank(rho, 1e-12), 2u);
  }
}

TEST(Generators, SameSeedSameInstance) {
  SuiteConfig cfg;
  Rng a(42), b(42);
  EXPECT_EQ(to_json(gen_random_instance(cfg, a)).dump(), to_json(gen_random_instance(cfg, b)).dump());
  EXPECT_EQ(to_json(gen_key_run(cfg, a, 0.1)).dump(), to_json(gen_key_run(cfg, b, 0.1)).dump());
  EXPECT_EQ(to_json(gen_distiller(cfg, a, false)).dump(), to_json(gen_distiller(cfg, b, false)).dump());
}

TEST(Generators, InstancesAreValidNormalizedAndNondisturbing) {
  for (std::size_t d : {2u, 3u}) {
    SuiteConfig cfg;
    cfg.d = d;
    Rng rng(13 + d);
    for (int t = 0; t < 30; ++t) {
      const auto inst = gen_random_instance(cfg, rng);
      const auto diag = check_instance(inst);
      EXPECT_TRUE(diag.ok);
      EXPECT_LE(diag.nondisturbing_residual, 1e-12);
      for (const auto& b : inst.post_comm.blocks()) EXPECT_NEAR(b.state.amplitudes().norm(), 1.0, 1e-10);
      EXPECT_LE(inst.bob_guess.tp_residual(), 1e-9);
    }
  }
}

TEST(Generators, KeyRunsDistillersAndStatesAreValid) {
  SuiteConfig cfg;
  Rng rng(14);
  for (int t = 0; t < 10; ++t) {
    const auto run = gen_key_run(cfg, rng, 0.1, t % 2 == 0);
    for (const auto& b : run.state.blocks()) EXPECT_NEAR(b.state.amplitudes().norm(), 1.0, 1e-10);
    const auto c = gen_distiller(cfg, rng, t % 2 == 0);
    for (const auto& b : c.primary.pre_state.blocks()) EXPECT_TRUE(validate_density(b.state).ok);
    EXPECT_TRUE(is_nondisturbing(compile_locc(c.lambda), "A", 2).ok);
    EXPECT_TRUE(validate_density(gen_two_qudit_state(2, rng)).ok);
  }
}

TEST(SuiteConfig, Validation) {
  SuiteConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.d = 1;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = SuiteConfig{};
  cfg.theorems = {};
  EXPECT_THROW(cfg.validate(), Error);
  cfg = SuiteConfig{};
  cfg.theorems = {5};
  EXPECT_THROW(cfg.validate(), Error);
  cfg = SuiteConfig{};
  cfg.dim_e = 100;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(NoiseFamilies, Endpoints) {
  EXPECT_NEAR(trace_distance(depolarized_mes(0.0, 2), DensityOperator(mes(2))), 0.0, 0.0);
  EXPECT_LE((depolarized_mes(1.0, 2).matrix() - Matrix::Identity(4, 4) / 4.0).norm(), 1e-15);
  EXPECT_NEAR(delta_ent(depolarized_mes(0.2, 2), 2), 0.3, 1e-14);
  EXPECT_NEAR(oracle::trace_norm(depolarized_mes(0.2, 2).matrix() - DensityOperator(mes(2)).matrix()), 0.3, 1e-12);
  EXPECT_NEAR(delta_ent(dephased_mes(0.4, 2), 2), 0.4, 1e-14);
  EXPECT_THROW(noise_family("nope", 0.1, 2), Error);
  EXPECT_THROW(noise_family("depolarize-mes", 1.5, 2), Error);
  const auto flip = std::get<ControlInstance>(noise_family("classical-flip", 0.25, 2));
  EXPECT_NEAR(delta_z(run_primary(flip)), 0.25, 1e-14);
  EXPECT_NEAR(delta_x(run_secondary(flip), 2), 0.0, 1e-14);
}

TEST(Suite, InjectedIdealTrialPasses) {
  const auto c = thm1_run(classical_flip_instance(0.0, 2)).cert;
  EXPECT_TRUE(c.ok);
  SuiteConfig cfg;
  cfg.trials = 1;
  cfg.theorems = {1};
  const auto rep = run_suite(cfg);
  EXPECT_EQ(rep.trials.size(), 1u);
  EXPECT_EQ(rep.failures, 0u);
}

TEST(Suite, DeterministicAcrossRunsAndTrialSlicing) {
  SuiteConfig cfg;
  cfg.seed = 7;
  cfg.trials = 12;
  auto a = to_json(run_suite(cfg));
  auto b = to_json(run_suite(cfg));
  a.erase("wall_time_s");
  b.erase("wall_time_s");
  EXPECT_EQ(a.dump(), b.dump());
  // trial t does not depend on the others
  const auto single = run_trial(cfg, 3, 6);
  EXPECT_EQ(to_json(single.cert).dump(), a["trials"][6]["certificate"].dump());
}

TEST(Suite, MixedRunCoversAllTheoremsWithoutFailures) {
  SuiteConfig cfg;
  cfg.seed = 3;
  cfg.trials = 40;
  const auto rep = run_suite(cfg);
  EXPECT_EQ(rep.failures, 0u);
  ASSERT_EQ(rep.aggregate.size(), 4u);
  for (const auto& [th, a] : rep.aggregate) {
    EXPECT_EQ(a.trials, 10u);
    EXPECT_GE(a.worst_slack, -1e-8) << "theorem " << th;
  }
}

TEST(Sweep, GridParsing) {
  const auto g = Grid::parse("0:0.5:6");
  const auto p = g.points();
  ASSERT_EQ(p.size(), 6u);
  EXPECT_DOUBLE_EQ(p[0], 0.0);
  EXPECT_DOUBLE_EQ(p[5], 0.5);
  EXPECT_NEAR(p[2], 0.2, 1e-15);
  EXPECT_EQ(Grid::parse("0.3:0.3:1").points().size(), 1u);
  EXPECT_THROW(Grid::parse("0:1"), Error);
  EXPECT_THROW(Grid::parse("0:1:0"), Error);
  EXPECT_THROW(Grid::parse("0;1;3"), Error);
  EXPECT_THROW(Grid::parse("0:1:3x"), Error);
}

TEST(Sweep, DepolarizedCurve) {
  const auto rows = sweep("depolarize-mes", Grid::parse("0:0.5:6"), 4, 2);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.cert.ok);
    EXPECT_GE(r.cert.quantities.at("slack"), -1e-8);
  }
  EXPECT_LE(rows[0].cert.quantities.at("delta_z"), 1e-10);
  EXPECT_LE(rows[0].cert.quantities.at("delta_x"), 1e-10);
  EXPECT_LE(rows[0].cert.quantities.at("delta_ent"), 1e-10);
  const std::string csv = sweep_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "param,delta_z,delta_x,achieved,bound,slack");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(Sweep, OtherFamiliesAndTheorems) {
  for (const auto& r : sweep("dephase-mes", Grid::parse("0:1:5"), 3, 2)) EXPECT_TRUE(r.cert.ok);
  for (const auto& r : sweep("classical-flip", Grid::parse("0:0.4:5"), 1, 3)) {
    EXPECT_TRUE(r.cert.ok);
    EXPECT_NEAR(r.cert.quantities.at("delta_z"), r.param, 1e-12);
  }
  EXPECT_THROW(sweep("classical-flip", Grid::parse("0:1:2"), 4, 2), Error);
  EXPECT_THROW(sweep("depolarize-mes", Grid::parse("0:1:2"), 2, 2), Error);
}

TEST(Sweep, NumbersAreLocaleFreeAndRoundTrip) {
  const double x = 0.1 + 0.2;
  const std::string s = format_double(x);
  EXPECT_EQ(s.find(','), std::string::npos);
  EXPECT_EQ(std::stod(s), x);
}

}  // namespace
}  // namespace cclab
