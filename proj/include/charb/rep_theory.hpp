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

#pragma once

#include <algorithm>
#include <complex>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "charb/common.hpp"
#include "charb/group.hpp"
#include "charb/pauli.hpp"
#include "charb/superop.hpp"

namespace charb {

/// Irreducible subrepresentations of a group's PTM representation, stored as
/// orthogonal projectors. Only multiplicity-free representations are supported.
struct IrrepDecomposition {
  std::shared_ptr<const GateGroup> group;
  std::vector<std::string> labels;
  std::vector<Ptm> projectors;
  std::vector<int> dims;
  std::size_t trivial = 0;

  std::size_t size() const { return labels.size(); }

  std::size_t index_of(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw ConfigError("unknown irrep label '" + label + "'");
    return static_cast<std::size_t>(it - labels.begin());
  }

  const Ptm& projector(const std::string& label) const { return projectors[index_of(label)]; }

  /// Orthonormal basis (4^q x d) of the support of projector i.
  RMatrix basis(std::size_t i) const {
    const RMatrix& p = projectors.at(i).matrix();
    Eigen::ColPivHouseholderQR<RMatrix> qr(p);
    const RMatrix qm = qr.householderQ();
    return qm.leftCols(dims.at(i));
  }

  /// Label of the irrep whose support contains the range of `p`, i.e.
  /// P_lambda p = p.
  std::string containing(const Ptm& p) const {
    for (std::size_t i = 0; i < size(); ++i) {
      if ((projectors[i].matrix() * p.matrix() - p.matrix()).cwiseAbs().maxCoeff() < tol::kAlgebraic) return labels[i];
    }
    throw ConfigError("projector is not contained in a single irrep of '" + group->name() + "'");
  }
};

inline Ptm pauli_projector(int q, const std::vector<int>& indices) {
  RMatrix m = RMatrix::Zero(ptm_dim_of(q), ptm_dim_of(q));
  for (int i : indices) m(i, i) = 1.0;
  return Ptm(q, std::move(m));
}

/// Closed-form decompositions of the builtin groups.
inline IrrepDecomposition analytic_decomposition(std::shared_ptr<const GateGroup> group) {
  const int q = group->q();
  const std::string& name = group->name();
  IrrepDecomposition d;
  d.group = group;
  auto add = [&](std::string label, const std::vector<int>& idx) {
    d.labels.push_back(std::move(label));
    d.projectors.push_back(pauli_projector(q, idx));
    d.dims.push_back(static_cast<int>(idx.size()));
  };
  const auto basis = enumerate_basis(q);
  if (name == "pauli") {
    for (const auto& s : basis) add(s.to_string(), {s.index()});
  } else if (name == "cnot_dihedral") {
    std::vector<int> z, rest;
    for (const auto& s : basis) {
      if (s.is_identity()) continue;
      (s.is_zi() ? z : rest).push_back(s.index());
    }
    add("1", {0});
    add("2", z);
    add("3", rest);
  } else if (name == "clifford1_tensor2") {
    std::vector<std::vector<int>> parts(4);
    for (const auto& s : basis) {
      const int w = (s.letters()[0] != 0 ? 1 : 0) * 2 + (s.letters()[1] != 0 ? 1 : 0);
      parts[w].push_back(s.index());
    }
    add("00", parts[0]);
    add("10", parts[2]);
    add("01", parts[1]);
    add("11", parts[3]);
  } else if (name == "clifford1" || name == "clifford2") {
    std::vector<int> rest;
    for (int i = 1; i < ptm_dim_of(q); ++i) rest.push_back(i);
    add("0", {0});
    add("1", rest);
  } else {
    throw ConfigError("no closed-form decomposition for group '" + name + "'");
  }
  d.trivial = 0;
  return d;
}

/// Character of the subrepresentation supported on `p`: chi(G) = tr(P G).
struct CharacterFn {
  std::shared_ptr<const GateGroup> group;
  std::string label;
  std::vector<double> values;

  /// Dimension of the represented irrep, chi(identity).
  double dimension() const { return values.at(0); }
};

inline CharacterFn character_of(std::shared_ptr<const GateGroup> group, const Ptm& p, std::string label) {
  CharacterFn c{group, std::move(label), {}};
  c.values.reserve(group->order());
  for (const auto& g : group->elements()) c.values.push_back((p.matrix() * g.matrix()).trace());
  return c;
}

/// chi_sigma(P) = (-1)^{<sigma, P>} on a group of Pauli PTMs.
inline CharacterFn pauli_character(std::shared_ptr<const GateGroup> group, const PauliString& sigma) {
  const auto& labels = group->pauli_labels();
  if (labels.empty()) throw ConfigError("group '" + group->name() + "' is not a Pauli group");
  if (sigma.q() != group->q()) throw DimensionError("pauli_character: qubit counts differ");
  CharacterFn c{group, sigma.to_string(), {}};
  for (const auto& p : labels) c.values.push_back(commutation_bit(sigma, p) ? -1.0 : 1.0);
  return c;
}

/// E_G[chi(G) G], which equals P / |phi| for an irreducible character.
inline Ptm character_projection(const GateGroup& group, const CharacterFn& chi) {
  if (chi.values.size() != group.order()) throw DimensionError("character_projection: character size mismatch");
  RMatrix acc = RMatrix::Zero(ptm_dim_of(group.q()), ptm_dim_of(group.q()));
  for (std::size_t i = 0; i < group.order(); ++i) acc += chi.values[i] * group.element(i).matrix();
  return Ptm(group.q(), acc / static_cast<double>(group.order()));
}

/// Character inner product E_G[chi_a(G) chi_b(G)].
inline double character_inner(const CharacterFn& a, const CharacterFn& b) {
  if (a.values.size() != b.values.size()) throw DimensionError("character_inner: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
  return s / static_cast<double>(a.values.size());
}

/// Eigenvalue clustering of a random twirled symmetric matrix. Every
/// eigenspace must carry an irreducible character (norm 1), otherwise the
/// representation has multiplicities and is rejected.
inline IrrepDecomposition numeric_decomposition(std::shared_ptr<const GateGroup> group, std::uint64_t seed = 7) {
  const int q = group->q();
  const int n = ptm_dim_of(q);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  RMatrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = normal(rng);

  RMatrix t = RMatrix::Zero(n, n);
  for (const auto& g : group->elements()) t.noalias() += g.matrix() * s * g.matrix().transpose();
  t /= static_cast<double>(group->order());
  t = (t + t.transpose()) / 2.0;

  Eigen::SelfAdjointEigenSolver<RMatrix> es(t);
  const RVector& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::vector<std::vector<int>> clusters{{0}};
  for (int i = 1; i < n; ++i) {
    if (ev(i) - ev(i - 1) > 1e-6 * scale) clusters.emplace_back();
    clusters.back().push_back(i);
  }

  IrrepDecomposition d;
  d.group = group;
  std::vector<std::pair<RMatrix, int>> found;
  for (const auto& c : clusters) {
    RMatrix v(n, static_cast<int>(c.size()));
    for (std::size_t k = 0; k < c.size(); ++k) v.col(static_cast<int>(k)) = es.eigenvectors().col(c[k]);
    found.emplace_back(v * v.transpose(), static_cast<int>(c.size()));
  }
  // Deterministic order: by dimension, then by the first basis index carried.
  auto lead = [&](const RMatrix& p) {
    for (int i = 0; i < n; ++i)
      if (p(i, i) > 1e-6) return i;
    return n;
  };
  std::sort(found.begin(), found.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return lead(a.first) < lead(b.first);
  });

  std::vector<CharacterFn> chars;
  for (std::size_t i = 0; i < found.size(); ++i) {
    Ptm p(q, found[i].first);
    for (const auto& g : group->elements()) {
      if ((g.matrix() * p.matrix() - p.matrix() * g.matrix()).cwiseAbs().maxCoeff() > 1e-8) {
        throw MultiplicityError("eigenspace of the twirled matrix is not invariant: multiplicity not supported");
      }
    }
    auto chi = character_of(group, p, "n" + std::to_string(i));
    if (std::abs(character_inner(chi, chi) - 1.0) > 1e-6) {
      throw MultiplicityError("group '" + group->name() + "': reducible eigenspace, multiplicity not supported");
    }
    for (const auto& other : chars) {
      if (std::abs(character_inner(chi, other)) > 1e-6) {
        throw MultiplicityError("group '" + group->name() + "': equivalent irreps, multiplicity not supported");
      }
    }
    chars.push_back(chi);
    d.labels.push_back(chi.label);
    d.projectors.push_back(std::move(p));
    d.dims.push_back(found[i].second);
    if (found[i].second == 1 && found[i].first(0, 0) > 1.0 - 1e-8) d.trivial = i;
  }
  return d;
}

/// E_G[G^dagger E G].
inline Ptm twirl(const Ptm& e, const GateGroup& group) {
  if (e.q() != group.q()) throw DimensionError("twirl: qubit counts differ");
  RMatrix acc = RMatrix::Zero(e.dim(), e.dim());
  for (const auto& g : group.elements()) acc.noalias() += g.matrix().transpose() * e.matrix() * g.matrix();
  return Ptm(e.q(), acc / static_cast<double>(group.order()));
}

/// f_lambda = tr(P_lambda E) / tr(P_lambda), aligned with `d.labels`.
inline std::vector<double> quality_params(const Ptm& e, const IrrepDecomposition& d) {
  std::vector<double> f;
  for (std::size_t i = 0; i < d.size(); ++i) {
    f.push_back((d.projectors[i].matrix() * e.matrix()).trace() / d.dims[i]);
  }
  return f;
}

struct MixingReport {
  std::vector<std::string> labels;  // R' = nontrivial labels
  RMatrix matrix;
  std::vector<std::complex<double>> eigenvalues;  // sorted by decreasing modulus
  RVector row_sums;
  bool irreducible = false;  // some power is entrywise positive
};

/// True when some power A^L, L <= (n-1)^2 + 1, is entrywise positive.
inline bool primitive_matrix(const RMatrix& a) {
  const auto n = a.rows();
  RMatrix pattern = (a.array() > 1e-14).cast<double>();
  RMatrix power = pattern;
  const auto limit = (n - 1) * (n - 1) + 1;
  for (Eigen::Index l = 1; l <= limit; ++l) {
    if ((power.array() > 0).all()) return true;
    power = ((power * pattern).array() > 0).cast<double>();
  }
  return false;
}

/// M_{lambda, mu} = tr(P_lambda C P_mu C^dagger E) / tr(P_lambda) over the
/// nontrivial labels.
inline MixingReport mixing_matrix(const IrrepDecomposition& d, const Ptm& c, const Ptm& e) {
  MixingReport r;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i == d.trivial) continue;
    idx.push_back(i);
    r.labels.push_back(d.labels[i]);
  }
  const auto n = static_cast<Eigen::Index>(idx.size());
  r.matrix.resize(n, n);
  const RMatrix ct = c.matrix().transpose();
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const RMatrix prod = d.projectors[idx[a]].matrix() * c.matrix() * d.projectors[idx[b]].matrix() * ct * e.matrix();
      r.matrix(a, b) = prod.trace() / d.dims[idx[a]];
    }
  }
  r.row_sums = r.matrix.rowwise().sum();
  Eigen::EigenSolver<RMatrix> es(r.matrix, false);
  for (Eigen::Index i = 0; i < n; ++i) r.eigenvalues.push_back(es.eigenvalues()(i));
  std::stable_sort(r.eigenvalues.begin(), r.eigenvalues.end(),
                   [](auto x, auto y) { return std::abs(x) > std::abs(y); });
  r.irreducible = primitive_matrix(r.matrix);
  return r;
}

inline RMatrix kron(const RMatrix& a, const RMatrix& b) {
  RMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) m.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return m;
}

/// E_G[noisy(G) (x) phi_lambda(G)] with phi_lambda(G) = B^T G B for an
/// orthonormal basis B of the irrep support. `noisy(i)` returns the
/// implemented PTM of element i.
template <class NoisyGate>
RMatrix decay_operator(const IrrepDecomposition& d, const std::string& label, NoisyGate&& noisy) {
  const auto i = d.index_of(label);
  const RMatrix b = d.basis(i);
  const GateGroup& g = *d.group;
  const int n = ptm_dim_of(g.q());
  RMatrix acc = RMatrix::Zero(n * d.dims[i], n * d.dims[i]);
  for (std::size_t e = 0; e < g.order(); ++e) {
    const Ptm gt = noisy(e);
    const RMatrix phi = b.transpose() * g.element(e).matrix() * b;
    acc += kron(gt.matrix(), phi);
  }
  return acc / static_cast<double>(g.order());
}

struct PowerIterationResult {
  double eigenvalue = 0.0;
  int iterations = 0;
};

/// Dominant eigenvalue by power iteration; the dominant eigenvalue must be
/// real, which holds for the near-identity noise this is used with.
inline PowerIterationResult dominant_eigenvalue(const RMatrix& a, double tolerance = 1e-10, int max_iterations = 200000) {
  RVector v = RVector::Ones(a.rows()).normalized();
  // A fixed non-symmetric start avoids starting orthogonal to the dominant vector.
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += 1e-3 * static_cast<double>(i % 7);
  v.normalize();
  double lambda = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    RVector w = a * v;
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return {0.0, it};
    const double residual = (w - next * v).norm();
    w /= norm;
    if (w.dot(v) < 0) w = -w;  // negative dominant eigenvalue flips sign each step
    v = w;
    if (std::abs(next - lambda) < tolerance && residual < 1e-8) return {next, it};
    lambda = next;
  }
  throw NumericalError("power iteration did not converge in " + std::to_string(max_iterations) + " iterations");
}

/// Largest eigenvalue of E_G[noisy(G) (x) phi_lambda(G)], the decay rate of
/// the lambda sector under gate-dependent noise.
template <class NoisyGate>
double gate_dependent_decay_rate(const IrrepDecomposition& d, const std::string& label, NoisyGate&& noisy) {
  return dominant_eigenvalue(decay_operator(d, label, std::forward<NoisyGate>(noisy))).eigenvalue;
}

}  // namespace charb
