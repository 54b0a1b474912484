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

#include <random>

#include "charb/group.hpp"
#include "oracles.hpp"

namespace charb {
namespace {

GroupCatalog& catalog() {
  static GroupCatalog c;
  return c;
}

double dist(const RMatrix& a, const RMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

TEST(GenerateGroup, SmallClosures) {
  using namespace gates;
  EXPECT_EQ(generate_group("hs", {ptm_of_unitary(h()), ptm_of_unitary(s())}, 100).order(), 24u);
  EXPECT_EQ(generate_group("xz", {ptm_of_unitary(x()), ptm_of_unitary(z())}, 100).order(), 4u);
  EXPECT_EQ(generate_group("tx", {ptm_of_unitary(t()), ptm_of_unitary(x())}, 100).order(), 16u);
}

TEST(GenerateGroup, Errors) {
  using namespace gates;
  EXPECT_THROW(generate_group("hs", {ptm_of_unitary(h()), ptm_of_unitary(s())}, 10), NumericalError);
  EXPECT_THROW(generate_group("mixed", {ptm_of_unitary(h()), Ptm::identity(2)}, 100), DimensionError);
  EXPECT_THROW(generate_group("singular", {depolarizing(1, 0.0)}, 100), ConfigError);
  EXPECT_THROW(generate_group("empty", {}, 100), ConfigError);
}

TEST(Builtin, Orders) {
  EXPECT_EQ(catalog().get("clifford1", 1)->order(), 24u);
  EXPECT_EQ(catalog().get("pauli", 1)->order(), 4u);
  EXPECT_EQ(catalog().get("pauli", 2)->order(), 16u);
  EXPECT_EQ(catalog().get("cnot_dihedral", 1)->order(), 16u);
  EXPECT_EQ(catalog().get("cnot_dihedral", 2)->order(), 6144u);
  EXPECT_EQ(catalog().get("clifford1_tensor2", 2)->order(), 576u);
  EXPECT_EQ(catalog().get("clifford2", 2)->order(), 11520u);
}

TEST(Builtin, UnsupportedCombinations) {
  EXPECT_THROW(builtin("clifford2", 1), ConfigError);
  EXPECT_THROW(builtin("pauli", 3), ConfigError);
  EXPECT_THROW(builtin("clifford1", 2), ConfigError);
  EXPECT_THROW(builtin("nope", 1), ConfigError);
}

TEST(Builtin, IdentityFirstAndElementsDistinct) {
  for (const auto& [name, q] : std::vector<std::pair<std::string, int>>{
           {"clifford1", 1}, {"pauli", 2}, {"cnot_dihedral", 2}, {"clifford1_tensor2", 2}}) {
    const auto g = catalog().get(name, q);
    EXPECT_LT(dist(g->element(0).matrix(), RMatrix::Identity(ptm_dim_of(q), ptm_dim_of(q))), 1e-12);
    std::set<std::vector<long long>> keys;
    for (const auto& e : g->elements()) {
      std::vector<long long> k;
      for (int i = 0; i < e.matrix().size(); ++i) k.push_back(std::llround(e.matrix().data()[i] * 1e6));
      keys.insert(k);
    }
    EXPECT_EQ(keys.size(), g->order()) << name;
  }
}

TEST(Builtin, TableMatchesMatrixProductsAndAssociativity) {
  std::mt19937_64 rng(17);
  for (const auto& [name, q] : std::vector<std::pair<std::string, int>>{
           {"clifford1", 1}, {"cnot_dihedral", 2}, {"clifford1_tensor2", 2}, {"clifford2", 2}}) {
    const auto g = catalog().get(name, q);
    for (int t = 0; t < 1000; ++t) {
      const auto a = sample_uniform(*g, rng), b = sample_uniform(*g, rng), c = sample_uniform(*g, rng);
      const auto ab = g->multiply(a, b);
      EXPECT_LT(dist(g->element(ab).matrix(), g->element(a).matrix() * g->element(b).matrix()), 1e-9);
      EXPECT_EQ(g->multiply(ab, c), g->multiply(a, g->multiply(b, c)));
      EXPECT_EQ(g->multiply(a, g->inverse(a)), 0u);
      EXPECT_EQ(g->multiply(g->inverse(a), a), 0u);
    }
  }
}

TEST(Builtin, Containments) {
  auto c2 = catalog().get("clifford2", 2);
  EXPECT_TRUE(catalog().get("cnot_dihedral", 1)->contains(*catalog().get("pauli", 1)));
  EXPECT_TRUE(catalog().get("cnot_dihedral", 2)->contains(*catalog().get("pauli", 2)));
  EXPECT_TRUE(catalog().get("clifford1", 1)->contains(*catalog().get("pauli", 1)));
  EXPECT_TRUE(catalog().get("clifford1_tensor2", 2)->contains(*catalog().get("pauli", 2)));
  EXPECT_TRUE(c2->contains(*catalog().get("pauli", 2)));
  EXPECT_TRUE(c2->contains(*catalog().get("clifford1_tensor2", 2)));
  EXPECT_FALSE(c2->contains(*catalog().get("cnot_dihedral", 2)));
  EXPECT_THROW(catalog().get("clifford1_tensor2", 2)->embed(*c2), ConfigError);
}

TEST(Builtin, PauliLabels) {
  const auto g = catalog().get("pauli", 2);
  ASSERT_EQ(g->pauli_labels().size(), 16u);
  for (std::size_t i = 0; i < g->order(); ++i) {
    const auto u = oracle::pauli(g->pauli_labels()[i].to_string());
    EXPECT_LT(dist(g->element(i).matrix(), oracle::ptm(2, oracle::unitary_channel(u))), 1e-12);
  }
  EXPECT_TRUE(catalog().get("clifford1", 1)->pauli_labels().empty());
}

TEST(Sampler, ChiSquareUniform) {
  const auto g = catalog().get("clifford1", 1);
  std::mt19937_64 rng(12345);
  std::vector<int> counts(g->order(), 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[sample_uniform(*g, rng)];
  const double e = double(n) / g->order();
  double chi2 = 0;
  for (int c : counts) chi2 += (c - e) * (c - e) / e;
  EXPECT_LT(chi2, 49.728);  // 23 dof, upper 0.001 quantile
}

TEST(SequenceInverse, UndoesProduct) {
  std::mt19937_64 rng(9);
  for (const auto& [name, q] : std::vector<std::pair<std::string, int>>{{"clifford1", 1}, {"clifford2", 2}}) {
    const auto g = catalog().get(name, q);
    for (int m : {1, 2, 7, 20}) {
      GateSequence seq{g.get(), {}, std::nullopt, false};
      RMatrix prod = RMatrix::Identity(ptm_dim_of(q), ptm_dim_of(q));
      for (int i = 0; i < m; ++i) {
        seq.gates.push_back(sample_uniform(*g, rng));
        prod = g->element(seq.gates.back()).matrix() * prod;
      }
      const auto inv = sequence_inverse(seq);
      EXPECT_LT(dist(g->element(inv).matrix() * prod, RMatrix::Identity(prod.rows(), prod.cols())), 1e-9);
      if (m == 1) EXPECT_EQ(inv, g->inverse(seq.gates[0]));
    }
  }
  const auto g = catalog().get("clifford1", 1);
  EXPECT_EQ(sequence_inverse(GateSequence{g.get(), {0}, std::nullopt, false}), 0u);
  // G-hat is not inverted.
  EXPECT_EQ(sequence_inverse(GateSequence{g.get(), {5}, 3, false}), g->inverse(5));
}

TEST(SequenceInverse, InterleavedInClosure) {
  const auto base = catalog().get("clifford1_tensor2", 2);
  const auto closure = catalog().closure("clifford1_tensor2", 2, "cphase");
  const auto emb = closure->embed(*base);
  const Ptm c = interleaving_gate("cphase", 2);
  const auto ci = closure->find(c);
  ASSERT_TRUE(ci.has_value());
  EXPECT_TRUE(catalog().get("clifford2", 2)->contains(*closure));
  std::mt19937_64 rng(10);
  GateSequence seq{base.get(), {}, std::nullopt, true};
  RMatrix prod = RMatrix::Identity(16, 16);
  for (int i = 0; i < 12; ++i) {
    seq.gates.push_back(sample_uniform(*base, rng));
    prod = c.matrix() * base->element(seq.gates.back()).matrix() * prod;
  }
  const auto inv = sequence_inverse(seq, *closure, emb, *ci);
  EXPECT_LT(dist(closure->element(inv).matrix() * prod, RMatrix::Identity(16, 16)), 1e-9);
  EXPECT_THROW(sequence_inverse(seq), ConfigError);
}

TEST(InterleavingGate, Names) {
  EXPECT_LT(dist(interleaving_gate("identity", 1).matrix(), RMatrix::Identity(4, 4)), 1e-15);
  EXPECT_THROW(interleaving_gate("cphase", 1), DimensionError);
  EXPECT_THROW(interleaving_gate("swapish", 2), ConfigError);
  oracle::Mat cz = oracle::Mat::Identity(4, 4);
  cz(3, 3) = -1;
  EXPECT_LT(dist(interleaving_gate("cphase", 2).matrix(), oracle::ptm(2, oracle::unitary_channel(cz))), 1e-12);
}

}  // namespace
}  // namespace charb
