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
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "charb/common.hpp"
#include "charb/noise.hpp"
#include "charb/superop.hpp"

namespace charb {

/// Product state from one letter per qubit: 0, 1, + (|+>), - (|->), r (|+i>), l (|-i>).
inline CVector product_state(const std::string& label) {
  const int q = static_cast<int>(label.size());
  check_qubits(q);
  const double h = 1.0 / std::sqrt(2.0);
  const Complex i1(0.0, 1.0);
  CVector psi = CVector::Ones(1);
  for (char c : label) {
    CVector s(2);
    switch (c) {
      case '0': s << 1.0, 0.0; break;
      case '1': s << 0.0, 1.0; break;
      case '+': s << h, h; break;
      case '-': s << h, -h; break;
      case 'r': s << h, h * i1; break;
      case 'l': s << h, -h * i1; break;
      default: throw ConfigError(std::string("unknown state letter '") + c + "'");
    }
    CVector next(psi.size() * 2);
    for (Eigen::Index a = 0; a < psi.size(); ++a) next.segment(2 * a, 2) = psi(a) * s;
    psi = next;
  }
  return psi;
}

/// Weighted pure product states. For a state the weights form a convex
/// decomposition; for an effect they scale projectors Q = sum w |psi><psi|.
struct PureTerms {
  std::vector<std::pair<std::string, double>> terms;

  int q() const {
    if (terms.empty()) throw ConfigError("empty state/effect specification");
    const auto q0 = terms.front().first.size();
    for (const auto& [label, w] : terms) {
      if (label.size() != q0) throw DimensionError("state/effect terms act on different qubit counts");
    }
    return static_cast<int>(q0);
  }

  CMatrix matrix() const {
    const int d = dim_of(q());
    CMatrix m = CMatrix::Zero(d, d);
    for (const auto& [label, w] : terms) {
      const CVector psi = product_state(label);
      m += w * psi * psi.adjoint();
    }
    return m;
  }
};

inline PureTerms single_term(std::string label) { return PureTerms{{{std::move(label), 1.0}}}; }

/// Validates a convex decomposition (weights >= 0 summing to 1 within 1e-9).
inline void check_mixture(const PureTerms& rho) {
  double total = 0.0;
  for (const auto& [label, w] : rho.terms) {
    if (w < 0.0) throw ConfigError("mixture weight is negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mixture weights do not sum to 1");
}

inline StateVec state_of(const PureTerms& rho) {
  check_mixture(rho);
  return make_state(HermitianMatrix(rho.q(), rho.matrix()));
}

inline Effect effect_of(const PureTerms& q) { return make_effect(HermitianMatrix(q.q(), q.matrix())); }

/// Noise configuration. Types: none, depolarizing (parameter p or
/// infidelity), random_unitary, composite (layers applied in order, first
/// layer acts first) and gate_dependent. per_qubit builds a tensor product of
/// independent single-qubit channels. gate_dependent draws an independent
/// realization per group element: of its single layer when one is given,
/// otherwise of a q-qubit random unitary at `infidelity`.
struct NoiseSpec {
  std::string type = "none";
  std::optional<double> p;
  double infidelity = 0.0;
  bool per_qubit = false;
  std::optional<std::uint64_t> seed;
  std::vector<NoiseSpec> layers;
};

namespace detail {

inline Ptm single_channel(const NoiseSpec& n, int q, std::uint64_t seed) {
  if (n.type == "depolarizing") {
    const int d = dim_of(q);
    const double p = n.p ? *n.p : 1.0 - n.infidelity * d / (d - 1.0);
    return depolarizing(q, p);
  }
  if (n.type == "random_unitary") return random_unitary_noise(q, n.infidelity, seed).channel();
  throw ConfigError("noise type '" + n.type + "' cannot be used here");
}

}  // namespace detail

inline NoiseModel build_noise(const NoiseSpec& n, int q, std::uint64_t default_seed) {
  check_qubits(q);
  const std::uint64_t seed = n.seed.value_or(default_seed);
  if (n.type == "none") return NoiseModel::identity(q);
  if (n.type == "gate_dependent") {
    if (n.per_qubit) throw ConfigError("gate_dependent noise takes per_qubit on its layer, not on itself");
    if (n.layers.empty()) return NoiseModel::gate_dependent(q, n.infidelity, seed);
    if (n.layers.size() != 1) throw ConfigError("gate_dependent noise takes exactly one base layer");
    const NoiseSpec base = n.layers.front();
    if (base.type == "gate_dependent") throw ConfigError("gate_dependent noise cannot be nested");
    build_noise(base, q, seed);  // validate once up front
    auto sampler = [base, q](std::uint64_t key) {
      NoiseSpec draw = base;
      draw.seed = key;
      return build_noise(draw, q, key).channel();
    };
    return NoiseModel::gate_dependent(q, sampler, seed, n.infidelity);
  }
  if (n.type == "composite") {
    if (n.layers.empty()) throw ConfigError("composite noise needs at least one layer");
    Ptm e = Ptm::identity(q);
    for (std::size_t i = 0; i < n.layers.size(); ++i) {
      // Layer seeds are mixed with the parent seed so per-element draws differ.
      NoiseSpec layer_spec = n.layers[i];
      layer_spec.seed = stream_key({seed, i, n.layers[i].seed.value_or(0)});
      const NoiseModel layer = build_noise(layer_spec, q, *layer_spec.seed);
      if (layer.is_gate_dependent()) throw ConfigError("composite noise layers must be gate-independent");
      e = layer.channel() * e;
    }
    return NoiseModel::gate_independent(e);
  }
  if (n.per_qubit && q > 1) {
    Ptm e = detail::single_channel(n, 1, stream_key({seed, 0}));
    for (int k = 1; k < q; ++k) e = tensor(e, detail::single_channel(n, 1, stream_key({seed, static_cast<std::uint64_t>(k)})));
    return NoiseModel::gate_independent(e);
  }
  return NoiseModel::gate_independent(detail::single_channel(n, q, n.per_qubit ? stream_key({seed, 0}) : seed));
}

enum class RunMode { Exact, FullAverage, Shots };

inline std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::Exact: return "exact";
    case RunMode::FullAverage: return "full_average";
    case RunMode::Shots: return "shots";
  }
  return "exact";
}

inline RunMode parse_run_mode(const std::string& s) {
  if (s == "exact") return RunMode::Exact;
  if (s == "full_average") return RunMode::FullAverage;
  if (s == "shots") return RunMode::Shots;
  throw ConfigError("unknown mode '" + s + "' (expected exact, full_average or shots)");
}

/// A standard, character or interleaved character RB experiment.
///
/// Exact mode averages each sampled sequence over the full character group
/// in expectation; full_average also averages over all sequences; shots
/// mode draws single-shot outcomes.
struct ExperimentSpec {
  std::string name;
  std::string group;
  int q = 1;
  std::optional<std::string> character_group;  // unset: standard RB
  std::string sigma_hat;                       // irrep selector of the character group
  std::optional<std::string> target_irrep;     // lambda'; derived from sigma_hat when unset
  std::optional<std::string> interleave;       // named gate C
  NoiseSpec interleave_noise;                  // E_C, implemented gate C E_C
  std::vector<int> lengths;
  int n_sequences = 100;
  int shots = 0;
  RunMode mode = RunMode::Exact;
  PureTerms rho;
  PureTerms meas;
  SpamModel spam;
  NoiseSpec noise;
  std::uint64_t seed = 1;

  bool is_character() const { return character_group.has_value(); }
  bool is_interleaved() const { return interleave.has_value(); }

  void validate() const {
    check_qubits(q);
    if (lengths.empty()) throw ConfigError("no sequence lengths");
    for (int m : lengths) {
      if (m < 1) throw ConfigError("sequence lengths must be >= 1");
    }
    if (mode != RunMode::FullAverage && n_sequences < 1) throw ConfigError("n_sequences must be >= 1");
    if (mode == RunMode::Shots && shots < 1) throw ConfigError("shots mode requires shots >= 1");
    if (is_character() && sigma_hat.empty()) throw ConfigError("character RB requires sigma_hat");
    if (rho.q() != q || meas.q() != q) throw DimensionError("rho/Q act on a different qubit count than the experiment");
    check_mixture(rho);
    spam.validate();
  }
};

}  // namespace charb
