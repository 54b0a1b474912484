// Copyright 2026 The charb Authors
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


#include <gtest/gtest.h>

#include "charb/experiment.hpp"
#include "charb/noise.hpp"
#include "oracles.hpp"

namespace charb {
namespace {

double dist(const RMatrix& a, const RMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

void expect_cptp(const Ptm& e) {
  const auto r = cptp_check(e);
  EXPECT_TRUE(r.trace_preserving);
  EXPECT_GE(r.choi_min_eigenvalue, -1e-9);
}

TEST(CalibratedUnitary, HitsTargetFidelity) {
  for (std::uint64_t seed : {1ull, 2ull, 1001ull, 1002ull}) {
    const auto u1 = calibrated_random_unitary(1, 0.013, seed);
    EXPECT_NEAR(oracle::unitary_fidelity(u1.unitary), 0.987, 1e-6);
    EXPECT_NEAR(avg_fidelity(ptm_of_unitary(u1.unitary)), 0.987, 1e-6);
    const auto u2 = calibrated_random_unitary(2, 0.102, seed);
    EXPECT_NEAR(oracle::unitary_fidelity(u2.unitary), 0.898, 1e-6);
    EXPECT_NEAR(avg_fidelity(random_unitary_noise(2, 0.102, seed).channel()), 0.898, 1e-6);
  }
  EXPECT_THROW(calibrated_random_unitary(1, 0.0, 1), ConfigError);
  EXPECT_THROW(calibrated_random_unitary(1, 0.6, 1), ConfigError);
}

TEST(CalibratedUnitary, VanishingInfidelityApproachesIdentity) {
  double prev = 1e9;
  std::vector<double> ratios;
  for (double r : {1e-2, 1e-4, 1e-6}) {
    const auto u = calibrated_random_unitary(2, r, 5);
    const double d = (ptm_of_unitary(u.unitary).matrix() - RMatrix::Identity(16, 16)).norm();
    EXPECT_LT(d, prev);
    prev = d;
    ratios.push_back(d / u.theta);  // linear in the rotation angle
  }
  EXPECT_LT(prev, 1e-2);
  EXPECT_NEAR(ratios[1] / ratios[2], 1.0, 1e-2);
  EXPECT_NEAR(ratios[0] / ratios[2], 1.0, 5e-2);
}

TEST(NoiseModel, IdentityLeavesGatesUnchanged) {
  GroupCatalog cat;
  const auto g = cat.get("clifford1", 1);
  const auto n = NoiseModel::identity(1);
  for (std::size_t i = 0; i < g->order(); ++i) EXPECT_EQ(n.noisy_gate(*g, i).matrix(), g->element(i).matrix());
}

TEST(NoiseModel, DepolarizedGatesArePhysical) {
  GroupCatalog cat;
  const auto g = cat.get("clifford1", 1);
  const auto n = NoiseModel::gate_independent(depolarizing(1, 0.9));
  for (const auto& e : n.noisy_gates(*g)) expect_cptp(e);
  EXPECT_THROW(n.noisy_gate(*cat.get("pauli", 2), 0), DimensionError);
}

TEST(NoiseModel, GateDependentDeterministicAndPhysical) {
  GroupCatalog cat;
  const auto g = cat.get("clifford1", 1);
  const auto a = NoiseModel::gate_dependent(1, 0.013, 77);
  const auto b = NoiseModel::gate_dependent(1, 0.013, 77);
  const auto c = NoiseModel::gate_dependent(1, 0.013, 78);
  EXPECT_THROW(a.channel(), ConfigError);
  for (std::size_t i = 0; i < g->order(); ++i) {
    EXPECT_EQ(a.noisy_gate(*g, i).matrix(), b.noisy_gate(*g, i).matrix());
    EXPECT_GT(dist(a.error_of(*g, i).matrix(), c.error_of(*g, i).matrix()), 1e-6);
    EXPECT_NEAR(avg_fidelity(a.error_of(*g, i)), 0.987, 1e-6);
  }
  EXPECT_GT(dist(a.error_of(*g, 1).matrix(), a.error_of(*g, 2).matrix()), 1e-6);
}

TEST(NoiseModel, HundredDrawsAreCptp) {
  GroupCatalog cat;
  const auto g = cat.get("clifford1_tensor2", 2);
  NoiseSpec base{"depolarizing", 0.97, 0.0, false, std::nullopt, {}};
  NoiseSpec ru{"random_unitary", std::nullopt, 0.02, true, std::nullopt, {}};
  NoiseSpec spec{"gate_dependent", std::nullopt, 0.0, false, 3, {NoiseSpec{"composite", std::nullopt, 0.0, false, std::nullopt, {ru, base}}}};
  const auto n = build_noise(spec, 2, 1);
  EXPECT_TRUE(n.is_gate_dependent());
  for (std::size_t i = 0; i < 100; ++i) expect_cptp(n.noisy_gate(*g, i));
  const auto n2 = NoiseModel::gate_dependent(2, 0.102, 9);
  for (std::size_t i = 0; i < 100; ++i) expect_cptp(n2.noisy_gate(*g, i));
}

TEST(BuildNoise, Variants) {
  EXPECT_EQ(build_noise(NoiseSpec{}, 2, 1).channel().matrix(), RMatrix::Identity(16, 16));
  NoiseSpec dep{"depolarizing", 0.9, 0.0, false, std::nullopt, {}};
  EXPECT_EQ(build_noise(dep, 1, 1).channel().matrix(), depolarizing(1, 0.9).matrix());
  // Infidelity r maps to p = 1 - r d/(d-1).
  NoiseSpec depr{"depolarizing", std::nullopt, 0.05, false, std::nullopt, {}};
  EXPECT_NEAR(avg_fidelity(build_noise(depr, 1, 1).channel()), 0.95, 1e-12);
  EXPECT_NEAR(avg_fidelity(build_noise(depr, 2, 1).channel()), 0.95, 1e-12);
  // Per-qubit random unitaries: each factor hits the target, the product is a tensor.
  NoiseSpec ru{"random_unitary", std::nullopt, 0.013, true, 4, {}};
  const Ptm e = build_noise(ru, 2, 1).channel();
  const Ptm e0 = random_unitary_noise(1, 0.013, stream_key({4, 0})).channel();
  const Ptm e1 = random_unitary_noise(1, 0.013, stream_key({4, 1})).channel();
  EXPECT_LT(dist(e.matrix(), tensor(e0, e1).matrix()), 1e-12);
  // Composite: first layer acts first.
  NoiseSpec comp{"composite", std::nullopt, 0.0, false, 2, {dep, NoiseSpec{"random_unitary", std::nullopt, 0.1, false, std::nullopt, {}}}};
  const Ptm ce = build_noise(comp, 1, 1).channel();
  const Ptm ru_layer = random_unitary_noise(1, 0.1, stream_key({2, 1, 0})).channel();
  EXPECT_LT(dist(ce.matrix(), (ru_layer * depolarizing(1, 0.9)).matrix()), 1e-12);
  EXPECT_TRUE(cptp_check(ce).cptp());
  NoiseSpec bad{"telegraph", std::nullopt, 0.0, false, std::nullopt, {}};
  EXPECT_THROW(build_noise(bad, 1, 1), ConfigError);
  NoiseSpec nested{"gate_dependent", std::nullopt, 0.0, false, std::nullopt, {NoiseSpec{"gate_dependent", std::nullopt, 0.01, false, std::nullopt, {}}}};
  EXPECT_THROW(build_noise(nested, 1, 1), ConfigError);
}

TEST(Spam, Examples) {
  const StateVec rho = state_of(single_term("00"));
  const Effect q = effect_of(single_term("00"));
  auto [r1, q1] = apply_spam(SpamModel{}, rho, q);
  EXPECT_EQ(r1.v, rho.v);
  EXPECT_EQ(q1.v, q.v);
  EXPECT_NEAR(flip_probability(SpamModel{1.0, 0.8}, 1.0), 0.8, 1e-15);
  EXPECT_NEAR(flip_probability(SpamModel{1.0, 0.8}, 0.0), 0.2, 1e-15);
  auto [r2, q2] = apply_spam(SpamModel{0.99, 1.0}, rho, q);
  const int zz = PauliString::parse("ZZ").index();
  EXPECT_NEAR(r2.v(0), rho.v(0), 1e-15);
  EXPECT_NEAR(r2.v(zz), 0.99 * rho.v(zz), 1e-15);
  // Dense oracle: tr(Q' rho') equals the flipped probability of the depolarized state.
  const SpamModel spam{0.99, 0.8};
  auto [r3, q3] = apply_spam(spam, rho, q);
  const oracle::Mat dense_rho = 0.99 * oracle::ket_projector("00") + 0.01 * oracle::Mat::Identity(4, 4) / 4.0;
  const double p = (oracle::ket_projector("00") * dense_rho).trace().real();
  EXPECT_NEAR(expectation(q3, r3), 0.8 * p + 0.2 * (1 - p), 1e-12);
  EXPECT_THROW(apply_spam(SpamModel{1.2, 1.0}, rho, q), ConfigError);
}

TEST(States, ProductStatesAndMixtures) {
  EXPECT_NEAR(std::abs(product_state("+")(1) - 1 / std::sqrt(2.0)), 0, 1e-15);
  EXPECT_NEAR((product_state("0r").adjoint() * product_state("0r"))(0).real(), 1.0, 1e-15);
  EXPECT_THROW(product_state("0x"), ConfigError);
  PureTerms mix{{{"00", 0.5}, {"11", 0.5}}};
  const StateVec s = state_of(mix);
  EXPECT_LT((s.v - vectorize(HermitianMatrix(2, (oracle::pauli("II") + oracle::pauli("ZZ")) / 4.0))).norm(), 1e-12);
  EXPECT_THROW(state_of(PureTerms{{{"00", 0.7}, {"11", 0.5}}}), ConfigError);
  EXPECT_THROW(state_of(PureTerms{{{"00", 1.0}, {"1", 0.0}}}), DimensionError);
}

}  // namespace
}  // namespace charb
