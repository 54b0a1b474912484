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

#include "charb/rep_theory.hpp"
#include "oracles.hpp"

namespace charb {
namespace {

GroupCatalog& catalog() {
  static GroupCatalog c;
  return c;
}

double dist(const RMatrix& a, const RMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

const std::vector<std::pair<std::string, int>>& all_groups() {
  static const std::vector<std::pair<std::string, int>> g{{"pauli", 1},         {"pauli", 2},
                                                          {"clifford1", 1},     {"cnot_dihedral", 1},
                                                          {"cnot_dihedral", 2}, {"clifford1_tensor2", 2},
                                                          {"clifford2", 2}};
  return g;
}

Ptm random_channel(int q, std::mt19937_64& rng, double p = 0.9) {
  const auto u = oracle::haar_unitary(dim_of(q), rng);
  return Ptm(q, oracle::ptm(q, [&](const oracle::Mat& r) { return oracle::depolarizing_channel(q, p)(u * r * u.adjoint()); }));
}

TEST(AnalyticDecomposition, Dims) {
  auto dims = [](const char* n, int q) { return analytic_decomposition(catalog().get(n, q)).dims; };
  EXPECT_EQ(dims("pauli", 1), (std::vector<int>{1, 1, 1, 1}));
  EXPECT_EQ(dims("cnot_dihedral", 2), (std::vector<int>{1, 3, 12}));
  EXPECT_EQ(dims("cnot_dihedral", 1), (std::vector<int>{1, 1, 2}));
  EXPECT_EQ(dims("clifford1_tensor2", 2), (std::vector<int>{1, 3, 3, 9}));
  EXPECT_EQ(dims("clifford1", 1), (std::vector<int>{1, 3}));
  EXPECT_EQ(dims("clifford2", 2), (std::vector<int>{1, 15}));
  auto other = std::make_shared<const GateGroup>(generate_group("custom", {ptm_of_unitary(gates::h())}, 10));
  EXPECT_THROW(analytic_decomposition(other), ConfigError);
}

TEST(AnalyticDecomposition, ProjectorAlgebraAndInvariance) {
  for (const auto& [name, q] : all_groups()) {
    const auto d = analytic_decomposition(catalog().get(name, q));
    const int n = ptm_dim_of(q);
    RMatrix sum = RMatrix::Zero(n, n);
    int total = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const RMatrix& p = d.projectors[i].matrix();
      sum += p;
      total += d.dims[i];
      EXPECT_NEAR(p.trace(), d.dims[i], 1e-12);
      EXPECT_LT(dist(p * p, p), 1e-10);
      for (std::size_t j = 0; j < d.size(); ++j)
        if (i != j) EXPECT_LT(dist(p * d.projectors[j].matrix(), RMatrix::Zero(n, n)), 1e-10);
      for (const auto& g : d.group->elements()) EXPECT_LT(dist(g.matrix() * p, p * g.matrix()), 1e-10);
    }
    EXPECT_EQ(total, n);
    EXPECT_LT(dist(sum, RMatrix::Identity(n, n)), 1e-10) << name;
  }
}

TEST(AnalyticDecomposition, CharactersIrreducibleAndDistinct) {
  for (const auto& [name, q] : all_groups()) {
    const auto g = catalog().get(name, q);
    const auto d = analytic_decomposition(g);
    std::vector<CharacterFn> chars;
    for (std::size_t i = 0; i < d.size(); ++i) chars.push_back(character_of(g, d.projectors[i], d.labels[i]));
    for (std::size_t i = 0; i < d.size(); ++i) {
      EXPECT_NEAR(chars[i].dimension(), d.dims[i], 1e-10);
      for (std::size_t j = 0; j < d.size(); ++j)
        EXPECT_NEAR(character_inner(chars[i], chars[j]), i == j ? 1.0 : 0.0, 1e-9) << name << " " << i << " " << j;
    }
  }
}

TEST(NumericDecomposition, MatchesAnalytic) {
  for (const auto& [name, q] : all_groups()) {
    if (name == "clifford2") continue;  // covered by the acceptance run
    const auto g = catalog().get(name, q);
    const auto a = analytic_decomposition(g);
    const auto n = numeric_decomposition(g);
    ASSERT_EQ(a.size(), n.size()) << name;
    for (std::size_t i = 0; i < a.size(); ++i) {
      bool matched = false;
      for (std::size_t j = 0; j < n.size(); ++j) matched |= dist(a.projectors[i].matrix(), n.projectors[j].matrix()) < 1e-8;
      EXPECT_TRUE(matched) << name << " " << a.labels[i];
    }
  }
  auto dims = [](const char* nm, int q) {
    auto v = numeric_decomposition(catalog().get(nm, q)).dims;
    std::sort(v.begin(), v.end());
    return v;
  };
  EXPECT_EQ(dims("clifford1", 1), (std::vector<int>{1, 3}));
  EXPECT_EQ(dims("cnot_dihedral", 1), (std::vector<int>{1, 1, 2}));
  EXPECT_EQ(dims("pauli", 2), std::vector<int>(16, 1));
}

TEST(NumericDecomposition, RejectsMultiplicity) {
  // {1, X} carries the trivial irrep twice (I and X components).
  auto g = std::make_shared<const GateGroup>(generate_group("x_only", {ptm_of_unitary(gates::x())}, 10));
  EXPECT_THROW(numeric_decomposition(g), MultiplicityError);
}

TEST(PauliCharacter, Examples) {
  const auto g = catalog().get("pauli", 2);
  auto value = [&](const CharacterFn& c, const char* p) {
    for (std::size_t i = 0; i < g->order(); ++i)
      if (g->pauli_labels()[i].to_string() == p) return c.values[i];
    throw std::runtime_error("missing");
  };
  const auto zz = pauli_character(g, PauliString::parse("ZZ"));
  EXPECT_EQ(value(zz, "XX"), 1.0);
  EXPECT_EQ(value(zz, "XI"), -1.0);
  const auto z1 = pauli_character(g, PauliString::parse("ZI"));
  // Row "Z1" of the two-qubit character table.
  const std::map<std::string, double> row{{"II", 1}, {"IX", 1}, {"IY", 1}, {"IZ", 1}, {"XI", -1}, {"YI", -1},
                                          {"ZI", 1}, {"XX", -1}, {"ZZ", 1}, {"YZ", -1}};
  for (const auto& [p, v] : row) EXPECT_EQ(value(z1, p.c_str()), v) << p;
  for (double v : pauli_character(g, PauliString::identity(2)).values) EXPECT_EQ(v, 1.0);
  // Character values agree with the matrix oracle: sign of P sigma P^dagger.
  for (const auto& s : enumerate_basis(2)) {
    const auto chi = pauli_character(g, s);
    for (std::size_t i = 0; i < g->order(); ++i) {
      const auto pm = oracle::pauli(g->pauli_labels()[i].to_string());
      const auto sm = oracle::pauli(s.to_string());
      const double sign = (pm * sm * pm.adjoint()).cwiseProduct(sm.conjugate()).sum().real() / 4.0;
      EXPECT_EQ(chi.values[i], sign);
    }
  }
  EXPECT_THROW(pauli_character(catalog().get("clifford1", 1), PauliString::parse("Z")), ConfigError);
}

TEST(PauliCharacter, Orthogonality) {
  for (int q = 1; q <= 2; ++q) {
    const auto g = catalog().get("pauli", q);
    for (const auto& s : enumerate_basis(q))
      for (const auto& t : enumerate_basis(q))
        EXPECT_EQ(character_inner(pauli_character(g, s), pauli_character(g, t)), s.index() == t.index() ? 1.0 : 0.0);
  }
}

TEST(CharacterProjection, PauliExamples) {
  const auto g2 = catalog().get("pauli", 2);
  const auto zz = PauliString::parse("ZZ");
  RMatrix expect = RMatrix::Zero(16, 16);
  expect(zz.index(), zz.index()) = 1;
  EXPECT_LT(dist(character_projection(*g2, pauli_character(g2, zz)).matrix(), expect), 1e-12);

  // Direct four-term average for sigma = X.
  const auto g1 = catalog().get("pauli", 1);
  RMatrix avg = RMatrix::Zero(4, 4);
  for (const char* p : {"I", "X", "Y", "Z"}) {
    const double chi = std::string(p) == "I" || std::string(p) == "X" ? 1 : -1;
    avg += chi * oracle::ptm(1, oracle::unitary_channel(oracle::pauli(p)));
  }
  RMatrix xx = RMatrix::Zero(4, 4);
  xx(1, 1) = 1;
  EXPECT_LT(dist(avg / 4, xx), 1e-12);
  EXPECT_LT(dist(character_projection(*g1, pauli_character(g1, PauliString::parse("X"))).matrix(), xx), 1e-12);
}

TEST(CharacterProjection, HoldsForEveryBuiltinIrrep) {
  for (const auto& [name, q] : all_groups()) {
    const auto g = catalog().get(name, q);
    const auto d = analytic_decomposition(g);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto chi = character_of(g, d.projectors[i], d.labels[i]);
      EXPECT_LT(dist(character_projection(*g, chi).matrix(), d.projectors[i].matrix() / d.dims[i]), 1e-10)
          << name << " " << d.labels[i];
    }
  }
  // Trivial character projects onto the fixed space.
  const auto g = catalog().get("clifford1", 1);
  CharacterFn triv{g, "0", std::vector<double>(g->order(), 1.0)};
  RMatrix p0 = RMatrix::Zero(4, 4);
  p0(0, 0) = 1;
  EXPECT_LT(dist(character_projection(*g, triv).matrix(), p0), 1e-12);
}

TEST(Twirl, QualityParameters) {
  std::mt19937_64 rng(31);
  for (const auto& [name, q] : all_groups()) {
    if (name == "clifford2" || name == "cnot_dihedral") continue;
    const auto d = analytic_decomposition(catalog().get(name, q));
    const Ptm e = random_channel(q, rng);
    const Ptm tw = twirl(e, *d.group);
    const auto f = quality_params(e, d);
    RMatrix expect = RMatrix::Zero(e.dim(), e.dim());
    for (std::size_t i = 0; i < d.size(); ++i) expect += f[i] * d.projectors[i].matrix();
    EXPECT_LT(dist(tw.matrix(), expect), 1e-10) << name;
    EXPECT_LT(dist(twirl(tw, *d.group).matrix(), tw.matrix()), 1e-10);
    EXPECT_NEAR(f[d.trivial], 1.0, 1e-12);
  }
  const auto d = analytic_decomposition(catalog().get("cnot_dihedral", 2));
  for (double v : quality_params(Ptm::identity(2), d)) EXPECT_NEAR(v, 1.0, 1e-12);
  const auto f = quality_params(depolarizing(2, 0.83), d);
  EXPECT_NEAR(f[1], 0.83, 1e-12);
  EXPECT_NEAR(f[2], 0.83, 1e-12);
}

TEST(Twirl, TensorFactorization) {
  std::mt19937_64 rng(41);
  const Ptm e1 = random_channel(1, rng, 0.95), e2 = random_channel(1, rng, 0.85);
  auto f1q = [](const Ptm& e) { return (e.trace() - 1.0) / 3.0; };
  const auto d = analytic_decomposition(catalog().get("clifford1_tensor2", 2));
  const auto f = quality_params(tensor(e1, e2), d);
  EXPECT_NEAR(f[d.index_of("10")], f1q(e1), 1e-12);
  EXPECT_NEAR(f[d.index_of("01")], f1q(e2), 1e-12);
  EXPECT_NEAR(f[d.index_of("11")], f1q(e1) * f1q(e2), 1e-12);
  // The single-qubit twirl is depolarizing with the same parameter.
  const Ptm tw1 = twirl(e1, *catalog().get("clifford1", 1));
  EXPECT_LT(dist(tw1.matrix(), depolarizing(1, f1q(e1)).matrix()), 1e-10);
}

TEST(MixingMatrix, CphaseExact) {
  const auto d = analytic_decomposition(catalog().get("clifford1_tensor2", 2));
  const auto r = mixing_matrix(d, interleaving_gate("cphase", 2), Ptm::identity(2));
  EXPECT_EQ(r.labels, (std::vector<std::string>{"10", "01", "11"}));
  RMatrix m(3, 3);
  m << 1.0 / 3, 0, 2.0 / 3, 0, 1.0 / 3, 2.0 / 3, 2.0 / 9, 2.0 / 9, 5.0 / 9;
  EXPECT_LT(dist(r.matrix, m), 1e-12);
  ASSERT_EQ(r.eigenvalues.size(), 3u);
  EXPECT_NEAR(r.eigenvalues[0].real(), 1.0, 1e-12);
  EXPECT_NEAR(r.eigenvalues[1].real(), 1.0 / 3, 1e-12);
  EXPECT_NEAR(r.eigenvalues[2].real(), -1.0 / 9, 1e-12);
  EXPECT_TRUE(r.irreducible);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.row_sums(i), 1.0, 1e-12);
  // Right eigenvector (1,1,1), left eigenvector (dims).
  EXPECT_LT((m * RVector::Ones(3) - RVector::Ones(3)).norm(), 1e-12);
  RVector dims(3);
  dims << 3, 3, 9;
  EXPECT_LT((dims.transpose() * r.matrix - dims.transpose()).norm(), 1e-10);
}

TEST(MixingMatrix, RowsSumToOneForAnyC) {
  std::mt19937_64 rng(51);
  const auto d = analytic_decomposition(catalog().get("clifford1_tensor2", 2));
  for (int k = 0; k < 3; ++k) {
    const Ptm c = ptm_of_unitary(oracle::haar_unitary(4, rng));
    const auto r = mixing_matrix(d, c, Ptm::identity(2));
    for (int i = 0; i < r.row_sums.size(); ++i) EXPECT_NEAR(r.row_sums(i), 1.0, 1e-10);
    EXPECT_NEAR(std::abs(r.eigenvalues[0]), 1.0, 1e-10);
  }
  // Local C does not mix: the identity matrix is not primitive.
  const auto r = mixing_matrix(d, ptm_of_unitary(oracle::kron(gates::h(), gates::s())), Ptm::identity(2));
  EXPECT_LT(dist(r.matrix, RMatrix::Identity(3, 3)), 1e-12);
  EXPECT_FALSE(r.irreducible);
}

TEST(GateDependentDecay, GateIndependentReducesToQualityParameter) {
  std::mt19937_64 rng(61);
  for (const auto& [name, q] : std::vector<std::pair<std::string, int>>{{"clifford1", 1}, {"clifford1_tensor2", 2}}) {
    const auto g = catalog().get(name, q);
    const auto d = analytic_decomposition(g);
    const Ptm e = random_channel(q, rng, 0.97);
    const auto f = quality_params(e, d);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (i == d.trivial) continue;
      const double rate = gate_dependent_decay_rate(d, d.labels[i], [&](std::size_t k) { return e * g->element(k); });
      EXPECT_NEAR(rate, f[i], 1e-9) << name << " " << d.labels[i];
      EXPECT_NEAR(gate_dependent_decay_rate(d, d.labels[i], [&](std::size_t k) { return g->element(k); }), 1.0, 1e-9);
    }
  }
}

TEST(GateDependentDecay, MatchesDenseEigensolver) {
  std::mt19937_64 rng(71);
  const auto g = catalog().get("clifford1", 1);
  const auto d = analytic_decomposition(g);
  std::vector<Ptm> noisy;
  std::normal_distribution<double> nd;
  for (std::size_t k = 0; k < g->order(); ++k) {
    // Small per-gate rotation exp(-i 0.1 H) followed by mild depolarization.
    oracle::Mat h(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) h(i, j) = oracle::C(nd(rng), nd(rng));
    h = (h + h.adjoint()).eval() / 2.0;
    Eigen::SelfAdjointEigenSolver<oracle::Mat> hs(h);
    oracle::Mat phase = oracle::Mat::Zero(2, 2);
    for (int i = 0; i < 2; ++i) phase(i, i) = std::exp(oracle::C(0, -0.1 * hs.eigenvalues()(i)));
    const oracle::Mat u = hs.eigenvectors() * phase * hs.eigenvectors().adjoint();
    noisy.push_back(depolarizing(1, 0.99) * ptm_of_unitary(u) * g->element(k));
  }
  // Independent construction: explicit basis from the projector's eigenvectors.
  Eigen::SelfAdjointEigenSolver<RMatrix> es(d.projectors[1].matrix());
  const RMatrix b = es.eigenvectors().rightCols(3);
  RMatrix op = RMatrix::Zero(12, 12);
  for (std::size_t k = 0; k < g->order(); ++k) {
    const RMatrix phi = b.transpose() * g->element(k).matrix() * b;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) op.block(3 * r, 3 * c, 3, 3) += noisy[k].matrix()(r, c) * phi;
  }
  op /= 24.0;
  Eigen::EigenSolver<RMatrix> ev(op);
  std::complex<double> best = 0;
  for (int i = 0; i < 12; ++i)
    if (std::abs(ev.eigenvalues()(i)) > std::abs(best)) best = ev.eigenvalues()(i);
  EXPECT_NEAR(best.imag(), 0.0, 1e-12);
  EXPECT_GT(best.real(), 0.9);
  EXPECT_NEAR(gate_dependent_decay_rate(d, "1", [&](std::size_t k) { return noisy[k]; }), best.real(), 1e-8);
}

}  // namespace
}  // namespace charb
