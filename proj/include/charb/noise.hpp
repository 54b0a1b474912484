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
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "charb/common.hpp"
#include "charb/group.hpp"
#include "charb/rng.hpp"
#include "charb/superop.hpp"

namespace charb {

/// exp(-i theta H) for Hermitian H, returned with its unitary.
struct DirectedUnitary {
  CMatrix hamiltonian;
  double theta = 0.0;
  CMatrix unitary;
};

namespace detail {

/// Average fidelity of exp(-i theta H) from the spectrum of H.
inline double fidelity_of_angle(const RVector& spectrum, double theta) {
  const double d = static_cast<double>(spectrum.size());
  std::complex<double> tr = 0.0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) tr += std::polar(1.0, -theta * spectrum(i));
  return (d + std::norm(tr)) / (d * (d + 1.0));
}

}  // namespace detail

/// A fixed random direction H (traceless, GUE) with the rotation angle
/// calibrated so that avg_fidelity(exp(-i theta H)) = 1 - infidelity.
inline DirectedUnitary calibrated_random_unitary(int q, double infidelity, std::uint64_t seed) {
  check_qubits(q);
  if (!(infidelity > 0.0 && infidelity < 0.5)) throw ConfigError("random unitary noise: infidelity must lie in (0, 0.5)");
  const int d = dim_of(q);
  auto rng = make_stream({seed, 0x52554eULL});
  std::normal_distribution<double> normal;
  CMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  CMatrix h = (a + a.adjoint()) / 2.0;
  h -= (h.trace() / static_cast<double>(d)) * CMatrix::Identity(d, d);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  RVector spec = es.eigenvalues();
  const double spread = spec.maxCoeff() - spec.minCoeff();
  h /= spread;
  spec /= spread;

  const double target = 1.0 - infidelity;
  // Bracket the first crossing below the target, then bisect.
  double lo = 0.0, hi = 0.0;
  const double step = 1e-3;
  bool bracketed = false;
  for (double t = step; t < 20.0; t += step) {
    if (detail::fidelity_of_angle(spec, t) <= target) {
      lo = t - step;
      hi = t;
      bracketed = true;
      break;
    }
  }
  if (!bracketed) throw NumericalError("random unitary noise: could not reach the target infidelity");
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (detail::fidelity_of_angle(spec, mid) > target ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  if (std::abs(detail::fidelity_of_angle(spec, theta) - target) > 1e-9) {
    throw NumericalError("random unitary noise: calibration did not converge");
  }
  CVector phases(d);
  for (int i = 0; i < d; ++i) phases(i) = std::polar(1.0, -theta * spec(i));
  CMatrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return {h, theta, u};
}

/// Noise applied to ideal gates. Gate-independent noise is a fixed channel E
/// with noisy gates E G; gate-dependent noise draws an independent calibrated
/// random unitary per group element, keyed by (seed, group name, index).
class NoiseModel {
 public:
  static NoiseModel identity(int q) { return gate_independent(Ptm::identity(q)); }

  static NoiseModel gate_independent(Ptm e) {
    NoiseModel n;
    n.q_ = e.q();
    n.channel_ = std::move(e);
    return n;
  }

  /// Independent draw per element: `sampler(key)` returns the error channel
  /// for the element keyed by (seed, group name, index).
  static NoiseModel gate_dependent(int q, std::function<Ptm(std::uint64_t)> sampler, std::uint64_t seed,
                                   double infidelity) {
    check_qubits(q);
    NoiseModel n;
    n.q_ = q;
    n.dependent_ = true;
    n.infidelity_ = infidelity;
    n.seed_ = seed;
    n.sampler_ = std::move(sampler);
    return n;
  }

  /// Per-element calibrated random unitary at the given infidelity.
  static NoiseModel gate_dependent(int q, double infidelity, std::uint64_t seed) {
    if (!(infidelity > 0.0 && infidelity < 0.5)) throw ConfigError("gate-dependent noise: infidelity must lie in (0, 0.5)");
    auto sampler = [q, infidelity](std::uint64_t key) {
      return ptm_of_unitary(calibrated_random_unitary(q, infidelity, key).unitary);
    };
    return gate_dependent(q, sampler, seed, infidelity);
  }

  int q() const { return q_; }
  bool is_gate_dependent() const { return dependent_; }
  double infidelity() const { return infidelity_; }
  std::uint64_t seed() const { return seed_; }

  /// The fixed channel of a gate-independent model.
  const Ptm& channel() const {
    if (dependent_) throw ConfigError("gate-dependent noise has no single channel");
    return *channel_;
  }

  /// Error channel E_G attached to element `index` of `group`.
  Ptm error_of(const GateGroup& group, std::size_t index) const {
    if (group.q() != q_) throw DimensionError("noise model acts on a different qubit count than the group");
    if (!dependent_) return *channel_;
    const auto key = stream_key({seed_, hash_name(group.name()), static_cast<std::uint64_t>(index)});
    Ptm e = sampler_(key);
    if (e.q() != q_) throw DimensionError("gate-dependent noise sampler returned a channel on the wrong qubit count");
    return e;
  }

  /// Implemented gate E_G G.
  Ptm noisy_gate(const GateGroup& group, std::size_t index) const {
    return error_of(group, index) * group.element(index);
  }

  /// Implemented gates for every element of `group`, in index order.
  std::vector<Ptm> noisy_gates(const GateGroup& group) const {
    std::vector<Ptm> out;
    out.reserve(group.order());
    for (std::size_t i = 0; i < group.order(); ++i) out.push_back(noisy_gate(group, i));
    return out;
  }

 private:
  int q_ = 0;
  bool dependent_ = false;
  double infidelity_ = 0.0;
  std::uint64_t seed_ = 0;
  std::optional<Ptm> channel_;
  std::function<Ptm(std::uint64_t)> sampler_;
};

/// Gate-independent random unitary noise with avg_fidelity = 1 - infidelity.
inline NoiseModel random_unitary_noise(int q, double infidelity, std::uint64_t seed) {
  return NoiseModel::gate_independent(ptm_of_unitary(calibrated_random_unitary(q, infidelity, seed).unitary));
}

/// Implemented interleaving gate C E_C (noise acts before C).
inline Ptm noisy_interleaving_gate(const Ptm& c, const Ptm& e_c) { return c * e_c; }

struct SpamModel {
  double prep = 1.0;  // F_P
  double meas = 1.0;  // F_M

  void validate() const {
    if (prep < 0.0 || prep > 1.0 || meas < 0.0 || meas > 1.0) throw ConfigError("SPAM fidelities must lie in [0, 1]");
  }
  bool ideal() const { return prep == 1.0 && meas == 1.0; }
};

/// rho' = F_P rho + (1 - F_P) 1/d.
inline StateVec noisy_state(const SpamModel& spam, const StateVec& rho) {
  StateVec out = rho;
  out.v = spam.prep * rho.v + (1.0 - spam.prep) * maximally_mixed(rho.q).v;
  return out;
}

/// Q' = F_M Q + (1 - F_M)(1 - Q): the reported-1 probability after a
/// classical assignment flip.
inline Effect noisy_effect(const SpamModel& spam, const Effect& q) {
  Effect out = q;
  out.v = spam.meas * q.v + (1.0 - spam.meas) * (unit_effect(q.q).v - q.v);
  return out;
}

inline std::pair<StateVec, Effect> apply_spam(const SpamModel& spam, const StateVec& rho, const Effect& q) {
  spam.validate();
  if (rho.q != q.q) throw DimensionError("apply_spam: qubit counts differ");
  return {noisy_state(spam, rho), noisy_effect(spam, q)};
}

/// Reported-1 probability for true probability p.
inline double flip_probability(const SpamModel& spam, double p) { return spam.meas * p + (1.0 - spam.meas) * (1.0 - p); }

}  // namespace charb
