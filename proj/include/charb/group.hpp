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

#include <cmath>
#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "charb/common.hpp"
#include "charb/superop.hpp"

namespace charb {

/// Canonical key of a PTM: entries rounded to 9 decimals.
struct ElementKey {
  std::vector<std::int64_t> entries;
  friend bool operator==(const ElementKey&, const ElementKey&) = default;
};

struct ElementKeyHash {
  std::size_t operator()(const ElementKey& k) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto e : k.entries) {
      h ^= static_cast<std::uint64_t>(e) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

inline ElementKey key_of(const RMatrix& m) {
  ElementKey k;
  k.entries.resize(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    // +0.0 folds negative zero
    k.entries[static_cast<std::size_t>(i)] = std::llround(m.data()[i] * tol::kKeyScale) + 0;
  }
  return k;
}

/// Finite group of PTMs. Element 0 is the identity. Products follow matrix
/// order: multiply(a, b) is the element whose PTM is PTM(a) * PTM(b), i.e. b
/// is applied first.
class GateGroup {
 public:
  /// Groups up to this order carry a full multiplication table.
  static constexpr std::size_t kTableLimit = 1200;

  const std::string& name() const { return name_; }
  int q() const { return q_; }
  std::size_t order() const { return elements_.size(); }
  const Ptm& element(std::size_t i) const { return elements_.at(i); }
  const std::vector<Ptm>& elements() const { return elements_; }
  bool has_table() const { return !table_.empty(); }

  std::optional<std::size_t> find(const RMatrix& m) const {
    auto it = index_.find(key_of(m));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> find(const Ptm& p) const {
    if (p.q() != q_) return std::nullopt;
    return find(p.matrix());
  }

  std::size_t multiply(std::size_t a, std::size_t b) const {
    if (has_table()) return table_[a * order() + b];
    auto r = find(elements_[a].matrix() * elements_[b].matrix());
    if (!r) throw NumericalError("group '" + name_ + "' is not closed under multiplication");
    return *r;
  }

  std::size_t inverse(std::size_t a) const { return inverse_.at(a); }

  /// Every element of `sub` is an element of this group.
  bool contains(const GateGroup& sub) const {
    if (sub.q() != q_) return false;
    for (const auto& e : sub.elements()) {
      if (!find(e)) return false;
    }
    return true;
  }

  /// Index in this group of each element of `sub`.
  std::vector<std::size_t> embed(const GateGroup& sub) const {
    if (sub.q() != q_) throw DimensionError("embed: qubit counts differ");
    std::vector<std::size_t> out;
    out.reserve(sub.order());
    for (const auto& e : sub.elements()) {
      auto r = find(e);
      if (!r) throw ConfigError("group '" + sub.name() + "' is not a subgroup of '" + name_ + "'");
      out.push_back(*r);
    }
    return out;
  }

  /// Phase-free Pauli labels of the elements, present only when every
  /// element is a Pauli PTM.
  const std::vector<PauliString>& pauli_labels() const { return pauli_labels_; }

  const std::vector<Ptm>& generators() const { return generators_; }

  friend GateGroup generate_group(std::string name, const std::vector<Ptm>& generators, std::size_t max_order);

 private:
  std::string name_;
  int q_ = 0;
  std::vector<Ptm> elements_;
  std::unordered_map<ElementKey, std::size_t, ElementKeyHash> index_;
  std::vector<std::size_t> inverse_;
  std::vector<std::uint32_t> table_;
  std::vector<PauliString> pauli_labels_;
  std::vector<Ptm> generators_;
};

/// Reads the Pauli label off a diagonal +-1 PTM, if it is one.
inline std::optional<PauliString> pauli_label_of(const Ptm& p) {
  const RMatrix& m = p.matrix();
  const RMatrix diag = m.diagonal().asDiagonal();
  if ((m - diag).cwiseAbs().maxCoeff() > 1e-9) return std::nullopt;
  const int q = p.q();
  std::vector<std::uint8_t> letters(q);
  for (int k = 0; k < q; ++k) {
    std::vector<std::uint8_t> xs(q, 0), zs(q, 0);
    xs[k] = 1;
    zs[k] = 3;
    const bool anti_x = m(PauliString(q, xs).index(), PauliString(q, xs).index()) < 0;
    const bool anti_z = m(PauliString(q, zs).index(), PauliString(q, zs).index()) < 0;
    letters[k] = anti_x ? (anti_z ? 2 : 3) : (anti_z ? 1 : 0);
  }
  PauliString label(q, letters);
  for (const auto& s : enumerate_basis(q)) {
    const double expect = commutation_bit(label, s) ? -1.0 : 1.0;
    if (std::abs(m(s.index(), s.index()) - expect) > 1e-9) return std::nullopt;
  }
  return label;
}

/// Breadth-first closure of `generators` under multiplication.
inline GateGroup generate_group(std::string name, const std::vector<Ptm>& generators, std::size_t max_order) {
  if (generators.empty()) throw ConfigError("generate_group: no generators");
  const int q = generators.front().q();
  for (const auto& g : generators) {
    if (g.q() != q) throw DimensionError("generate_group: generators act on different qubit counts");
    Eigen::FullPivLU<RMatrix> lu(g.matrix());
    if (!lu.isInvertible()) throw ConfigError("generate_group: non-invertible generator");
  }

  GateGroup grp;
  grp.name_ = std::move(name);
  grp.q_ = q;
  grp.generators_ = generators;
  auto add = [&](RMatrix m) -> std::size_t {
    auto [it, inserted] = grp.index_.emplace(key_of(m), grp.elements_.size());
    if (inserted) {
      if (grp.elements_.size() >= max_order) {
        throw NumericalError("group '" + grp.name_ + "' exceeds max order " + std::to_string(max_order));
      }
      grp.elements_.emplace_back(q, std::move(m));
    }
    return it->second;
  };

  add(RMatrix::Identity(ptm_dim_of(q), ptm_dim_of(q)));
  // left[g][e] = index of generator g times element e
  std::vector<std::vector<std::size_t>> left(generators.size());
  std::vector<std::size_t> parent{0}, parent_gen{0};
  for (std::size_t e = 0; e < grp.elements_.size(); ++e) {
    for (std::size_t g = 0; g < generators.size(); ++g) {
      const std::size_t before = grp.elements_.size();
      const std::size_t r = add(generators[g].matrix() * grp.elements_[e].matrix());
      if (grp.elements_.size() > before) {
        parent.push_back(e);
        parent_gen.push_back(g);
      }
      if (left[g].size() <= e) left[g].resize(e + 1);
      left[g][e] = r;
    }
  }

  const std::size_t n = grp.elements_.size();
  grp.inverse_.resize(n);
  for (std::size_t e = 0; e < n; ++e) {
    const RMatrix& m = grp.elements_[e].matrix();
    const bool orthogonal = (m.transpose() * m - RMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() < 1e-9;
    auto r = grp.find(orthogonal ? RMatrix(m.transpose()) : RMatrix(m.inverse()));
    if (!r) throw NumericalError("group '" + grp.name_ + "': inverse not found");
    grp.inverse_[e] = *r;
  }

  if (n <= GateGroup::kTableLimit) {
    // Row a of the table is left[g] applied to row parent(a), since a = g * parent(a).
    grp.table_.resize(n * n);
    for (std::size_t b = 0; b < n; ++b) grp.table_[b] = static_cast<std::uint32_t>(b);
    for (std::size_t a = 1; a < n; ++a) {
      const auto& lg = left[parent_gen[a]];
      const std::size_t pa = parent[a];
      for (std::size_t b = 0; b < n; ++b) grp.table_[a * n + b] = static_cast<std::uint32_t>(lg[grp.table_[pa * n + b]]);
    }
  }

  std::vector<PauliString> labels;
  for (const auto& e : grp.elements_) {
    auto l = pauli_label_of(e);
    if (!l) {
      labels.clear();
      break;
    }
    labels.push_back(*l);
  }
  grp.pauli_labels_ = std::move(labels);
  return grp;
}

inline std::vector<std::string> builtin_group_names() {
  return {"clifford1", "clifford1_tensor2", "clifford2", "pauli", "cnot_dihedral"};
}

/// Builds one of the named gate groups.
inline GateGroup builtin(const std::string& name, int q) {
  using namespace gates;
  auto local = [&](const CMatrix& u, int k) { return ptm_of_unitary(on_qubit(q, k, u)); };
  std::vector<Ptm> gens;
  if (name == "clifford1") {
    if (q != 1) throw ConfigError("clifford1 requires q = 1");
    gens = {ptm_of_unitary(h()), ptm_of_unitary(s())};
  } else if (name == "clifford1_tensor2") {
    if (q != 2) throw ConfigError("clifford1_tensor2 requires q = 2");
    gens = {local(h(), 0), local(h(), 1), local(s(), 0), local(s(), 1)};
  } else if (name == "clifford2") {
    if (q != 2) throw ConfigError("clifford2 requires q = 2");
    gens = {local(h(), 0), local(h(), 1), local(s(), 0), local(s(), 1), ptm_of_unitary(cnot(2, 0, 1))};
  } else if (name == "pauli") {
    if (q != 1 && q != 2) throw ConfigError("pauli requires q in {1, 2}");
    for (int k = 0; k < q; ++k) {
      gens.push_back(local(x(), k));
      gens.push_back(local(z(), k));
    }
  } else if (name == "cnot_dihedral") {
    if (q != 1 && q != 2) throw ConfigError("cnot_dihedral requires q in {1, 2}");
    for (int k = 0; k < q; ++k) {
      gens.push_back(local(t(), k));
      gens.push_back(local(x(), k));
    }
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        if (i != j) gens.push_back(ptm_of_unitary(cnot(q, i, j)));
  } else {
    throw ConfigError("unknown group '" + name + "'");
  }
  return generate_group(name, gens, 20000);
}

/// Named interleaving gates.
inline Ptm interleaving_gate(const std::string& name, int q) {
  check_qubits(q);
  if (name == "identity") return Ptm::identity(q);
  if (name == "cphase") {
    if (q != 2) throw DimensionError("cphase acts on 2 qubits");
    return ptm_of_unitary(gates::cphase());
  }
  throw ConfigError("unknown interleaving gate '" + name + "'");
}

/// Thread-safe cache of built groups and interleaving closures.
class GroupCatalog {
 public:
  std::shared_ptr<const GateGroup> get(const std::string& name, int q) {
    std::lock_guard lock(mu_);
    auto key = name + "/" + std::to_string(q);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto g = std::make_shared<const GateGroup>(builtin(name, q));
    cache_.emplace(key, g);
    return g;
  }

  /// Closure <base, C> used to resolve interleaved inverses.
  std::shared_ptr<const GateGroup> closure(const std::string& base_name, int q, const std::string& gate_name) {
    auto base = get(base_name, q);
    std::lock_guard lock(mu_);
    auto key = base_name + "+" + gate_name + "/" + std::to_string(q);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const Ptm c = interleaving_gate(gate_name, q);
    std::vector<Ptm> gens = base->generators();
    gens.push_back(c);
    auto g = std::make_shared<const GateGroup>(generate_group(key, gens, 20000));
    cache_.emplace(key, g);
    return g;
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const GateGroup>> cache_;
};

template <class Rng>
std::size_t sample_uniform(const GateGroup& g, Rng& rng) {
  std::uniform_int_distribution<std::size_t> dist(0, g.order() - 1);
  return dist(rng);
}

/// Random gate sequence G_1..G_m, with an optional character-group element
/// compiled into G_1 and an optional interleaving gate after every G_i.
struct GateSequence {
  const GateGroup* group = nullptr;
  std::vector<std::size_t> gates;
  std::optional<std::size_t> ghat;
  bool interleaved = false;
};

/// Index of (G_m ... G_1)^dagger in the benchmarking group. G-hat is not inverted.
inline std::size_t sequence_inverse(const GateSequence& seq) {
  if (seq.interleaved) throw ConfigError("interleaved sequence needs the closure overload of sequence_inverse");
  const GateGroup& g = *seq.group;
  std::size_t acc = 0;
  for (auto e : seq.gates) acc = g.multiply(e, acc);
  return g.inverse(acc);
}

/// Index in `closure` of (C G_m C ... C G_1)^dagger. `embedding` maps the
/// benchmarking group into the closure; `c_index` is C's index there.
inline std::size_t sequence_inverse(const GateSequence& seq, const GateGroup& closure,
                                    const std::vector<std::size_t>& embedding, std::size_t c_index) {
  std::size_t acc = 0;
  for (auto e : seq.gates) {
    acc = closure.multiply(embedding.at(e), acc);
    if (seq.interleaved) acc = closure.multiply(c_index, acc);
  }
  return closure.inverse(acc);
}

}  // namespace charb
