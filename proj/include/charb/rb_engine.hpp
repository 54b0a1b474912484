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
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "charb/common.hpp"
#include "charb/curve.hpp"
#include "charb/experiment.hpp"
#include "charb/group.hpp"
#include "charb/noise.hpp"
#include "charb/rep_theory.hpp"
#include "charb/rng.hpp"
#include "charb/superop.hpp"

namespace charb {

/// Single-shot outcome for true probability p: a Bernoulli draw, then a
/// classical assignment flip with probability 1 - F_M.
template <class Rng>
int sample_shot(double p, const SpamModel& spam, Rng& rng) {
  if (p < -tol::kPhysical || p > 1.0 + tol::kPhysical) {
    throw PhysicalityError("outcome probability " + std::to_string(p) + " outside [0, 1]");
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int b = u(rng) < std::clamp(p, 0.0, 1.0) ? 1 : 0;
  if (u(rng) >= spam.meas) b = 1 - b;
  return b;
}

template <class Rng>
int sample_shot(const Effect& q, const Ptm& chain, const StateVec& rho, const SpamModel& spam, Rng& rng) {
  return sample_shot(expectation(q, chain, rho), spam, rng);
}

/// Draws one pure state psi from the convex decomposition with probability p_psi.
template <class Rng>
StateVec prepare_mixed_state_sample(const PureTerms& rho, Rng& rng) {
  check_mixture(rho);
  std::vector<double> w;
  for (const auto& [label, p] : rho.terms) w.push_back(p);
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  return pure_state(rho.q(), product_state(rho.terms[pick(rng)].first));
}

/// A resolved experiment: groups, decomposition, character weights, noise
/// and SPAM built once, then shared read-only by all sequences.
class Experiment {
 public:
  Experiment(ExperimentSpec spec, GroupCatalog& catalog) : spec_(std::move(spec)) {
    spec_.validate();
    const int q = spec_.q;
    group_ = catalog.get(spec_.group, q);
    decomp_ = analytic_decomposition(group_);
    resolve_character(catalog);
    if (spec_.is_interleaved()) {
      closure_ = catalog.closure(spec_.group, q, *spec_.interleave);
      closure_embedding_ = closure_->embed(*group_);
      const Ptm c = interleaving_gate(*spec_.interleave, q);
      c_index_ = *closure_->find(c);
      const NoiseModel ec = build_noise(spec_.interleave_noise, q, stream_key({spec_.seed, hash_name("interleave")}));
      if (ec.is_gate_dependent()) throw ConfigError("interleaving-gate noise must be gate-independent");
      c_noise_ = ec.channel();
      c_noisy_ = noisy_interleaving_gate(c, *c_noise_);
    }
    noise_ = std::make_shared<NoiseModel>(build_noise(spec_.noise, q, stream_key({spec_.seed, hash_name("noise")})));
    noisy_ = noise_->noisy_gates(*group_);
    rho_ = state_of(spec_.rho);
    meas_ = effect_of(spec_.meas);
    rho_noisy_ = noisy_state(spec_.spam, rho_);
    meas_noisy_ = noisy_effect(spec_.spam, meas_);
  }

  const ExperimentSpec& spec() const { return spec_; }
  const GateGroup& group() const { return *group_; }
  std::shared_ptr<const GateGroup> group_ptr() const { return group_; }
  const IrrepDecomposition& decomposition() const { return decomp_; }
  const NoiseModel& noise() const { return *noise_; }
  const std::vector<Ptm>& noisy_gates() const { return noisy_; }
  const StateVec& rho() const { return rho_; }
  const Effect& meas() const { return meas_; }
  const StateVec& rho_noisy() const { return rho_noisy_; }
  const Effect& meas_noisy() const { return meas_noisy_; }

  /// lambda' (empty for standard RB).
  const std::string& target_irrep() const { return target_; }
  /// E_Ghat[|phi| chi(Ghat) Ghat]; the identity for standard RB.
  const Ptm& character_average() const { return pi_hat_; }
  const std::vector<double>& ghat_weights() const { return weights_; }
  const std::vector<std::string>& ghat_labels() const { return ghat_labels_; }
  std::optional<Ptm> interleave_noise() const { return c_noise_; }
  std::optional<Ptm> noisy_interleave() const { return c_noisy_; }

  /// Raw records in deterministic (m, sequence, G-hat, shot) order.
  std::vector<RawRecord> simulate(int threads = 1) const {
    if (spec_.mode == RunMode::FullAverage) return full_average();
    std::vector<RawRecord> out;
    for (int m : spec_.lengths) {
      std::vector<std::vector<RawRecord>> per_seq(spec_.n_sequences);
      auto work = [&](int begin, int end) {
        for (int s = begin; s < end; ++s) per_seq[s] = run_sequence(m, s);
      };
      parallel_for(spec_.n_sequences, threads, work);
      for (auto& v : per_seq) out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  }

  DecayCurve run(int threads = 1) const {
    DecayCurve c = aggregate(simulate(threads));
    c.spec = spec_;
    return c;
  }

  /// Gate indices G_1..G_m of sequence s at length m.
  std::vector<std::size_t> draw_sequence(int m, int s) const {
    auto rng = make_stream({spec_.seed, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(s), 0});
    std::vector<std::size_t> gates(m);
    for (auto& g : gates) g = sample_uniform(*group_, rng);
    return gates;
  }

 private:
  void resolve_character(GroupCatalog& catalog) {
    const int n = ptm_dim_of(spec_.q);
    if (!spec_.is_character()) {
      char_embedding_ = {0};
      weights_ = {1.0};
      ghat_labels_ = {"-"};
      pi_hat_ = Ptm::identity(spec_.q);
      return;
    }
    char_group_ = catalog.get(*spec_.character_group, spec_.q);
    char_embedding_ = group_->embed(*char_group_);
    std::optional<Ptm> proj;
    CharacterFn chi;
    double dim = 1.0;
    if (!char_group_->pauli_labels().empty()) {
      const auto sigma = PauliString::parse(spec_.sigma_hat);
      if (sigma.q() != spec_.q) throw DimensionError("sigma_hat acts on a different qubit count");
      chi = pauli_character(char_group_, sigma);
      proj = pauli_projector(spec_.q, {sigma.index()});
      for (const auto& p : char_group_->pauli_labels()) ghat_labels_.push_back(p.to_string());
    } else {
      const auto hat = analytic_decomposition(char_group_);
      const auto i = hat.index_of(spec_.sigma_hat);
      proj = hat.projectors[i];
      dim = hat.dims[i];
      chi = character_of(char_group_, *proj, spec_.sigma_hat);
      for (std::size_t e = 0; e < char_group_->order(); ++e) ghat_labels_.push_back(std::to_string(e));
    }
    for (double c : chi.values) weights_.push_back(dim * c);
    RMatrix acc = RMatrix::Zero(n, n);
    for (std::size_t e = 0; e < char_group_->order(); ++e) acc += weights_[e] * char_group_->element(e).matrix();
    pi_hat_ = Ptm(spec_.q, acc / static_cast<double>(char_group_->order()));

    target_ = decomp_.containing(*proj);
    if (spec_.target_irrep && *spec_.target_irrep != target_) {
      const Ptm& pt = decomp_.projector(*spec_.target_irrep);
      if ((proj->matrix() * pt.matrix() - proj->matrix()).cwiseAbs().maxCoeff() > tol::kAlgebraic) {
        throw ConfigError("character irrep '" + spec_.sigma_hat + "' is not contained in target irrep '" +
                          *spec_.target_irrep + "'");
      }
    }
  }

  template <class Work>
  static void parallel_for(int n, int threads, Work&& work) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
      work(0, n);
      return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          work(t * chunk, std::min(n, (t + 1) * chunk));
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  Ptm noisy_inverse(const std::vector<std::size_t>& gates) const {
    GateSequence seq{group_.get(), gates, std::nullopt, spec_.is_interleaved()};
    if (!spec_.is_interleaved()) return noisy_[sequence_inverse(seq)];
    const auto inv = sequence_inverse(seq, *closure_, closure_embedding_, *c_index_);
    return noise_->noisy_gate(*closure_, inv);
  }

  /// Row vector <<Q| G~inv (C~ G~m) ... (C~ G~2) C~, everything after G1 G-hat.
  RVector backward(const Effect& q, const std::vector<std::size_t>& gates) const {
    RVector c = noisy_inverse(gates).matrix().transpose() * q.v;
    for (std::size_t j = gates.size(); j-- > 1;) {
      if (c_noisy_) c = c_noisy_->matrix().transpose() * c;
      c = noisy_[gates[j]].matrix().transpose() * c;
    }
    if (c_noisy_) c = c_noisy_->matrix().transpose() * c;
    return c;
  }

  std::size_t compiled_first(std::size_t g1, std::size_t h) const {
    return spec_.is_character() ? group_->multiply(g1, char_embedding_[h]) : g1;
  }

  std::vector<RawRecord> run_sequence(int m, int s) const {
    const auto gates = draw_sequence(m, s);
    std::vector<RawRecord> out;
    if (spec_.mode == RunMode::Exact) {
      const RVector c = backward(meas_noisy_, gates);
      for (std::size_t h = 0; h < weights_.size(); ++h) {
        const double v = c.dot(noisy_[compiled_first(gates[0], h)].matrix() * rho_noisy_.v);
        out.push_back({m, s, ghat_labels_[h], -1, weights_[h], weights_[h] * v});
      }
      return out;
    }
    // Shots: the ideal effect is used and the assignment flip is sampled.
    const RVector c = backward(meas_, gates);
    std::vector<RVector> rows;
    for (std::size_t h = 0; h < weights_.size(); ++h) rows.push_back(noisy_[compiled_first(gates[0], h)].matrix().transpose() * c);
    std::uniform_int_distribution<std::size_t> pick_h(0, weights_.size() - 1);
    for (int shot = 0; shot < spec_.shots; ++shot) {
      auto rng = make_stream({spec_.seed, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(s),
                              static_cast<std::uint64_t>(shot) + 1});
      const std::size_t h = pick_h(rng);
      const StateVec psi = noisy_state(spec_.spam, prepare_mixed_state_sample(spec_.rho, rng));
      const int b = sample_shot(rows[h].dot(psi.v), spec_.spam, rng);
      out.push_back({m, s, ghat_labels_[h], shot, weights_[h], weights_[h] * b});
    }
    return out;
  }

  std::vector<RawRecord> full_average() const {
    return noise_->is_gate_dependent() ? full_average_transfer() : full_average_twirl();
  }

  /// Gate-independent noise: Y_0 = 1, Y_k = E_G[G^T (C^T Y_{k-1} C Lambda) G]
  /// with Lambda = E_C E, and k_m = <<Q'| E Y_m Pi-hat |rho'>>.
  std::vector<RawRecord> full_average_twirl() const {
    const int n = ptm_dim_of(spec_.q);
    const RMatrix& e = noise_->channel().matrix();
    const RMatrix cm = spec_.is_interleaved() ? interleaving_gate(*spec_.interleave, spec_.q).matrix() : RMatrix::Identity(n, n);
    const RMatrix lambda = c_noise_ ? RMatrix(c_noise_->matrix() * e) : e;
    const RVector right = pi_hat_.matrix() * rho_noisy_.v;
    const RVector left = e.transpose() * meas_noisy_.v;
    const int max_m = *std::max_element(spec_.lengths.begin(), spec_.lengths.end());
    const std::set<int> wanted(spec_.lengths.begin(), spec_.lengths.end());
    std::vector<RawRecord> out;
    RMatrix y = RMatrix::Identity(n, n);
    for (int k = 1; k <= max_m; ++k) {
      const RMatrix inner = cm.transpose() * y * cm * lambda;
      RMatrix acc = RMatrix::Zero(n, n);
      for (const auto& g : group_->elements()) acc.noalias() += g.matrix().transpose() * inner * g.matrix();
      y = acc / static_cast<double>(group_->order());
      if (wanted.count(k)) out.push_back({k, 0, "avg", -1, 1.0, left.dot(y * right)});
    }
    return out;
  }

  /// Gate-dependent noise, via partial products D_j = G_j ... G_1:
  ///   w_1(g) = |G|^-1 E_Ghat[|phi| chi(Ghat) Phi(g Ghat)] |rho'>>,
  ///   w_{j+1}(h) = |G|^-1 sum_g Phi(h g^-1) w_j(g),
  ///   k_m = sum_g <<Q'| Phi(g^-1) w_m(g).
  std::vector<RawRecord> full_average_transfer() const {
    if (spec_.is_interleaved()) throw ConfigError("full_average with gate-dependent noise does not support interleaving");
    if (!group_->has_table()) {
      throw ConfigError("full_average with gate-dependent noise needs a group of order <= " +
                        std::to_string(GateGroup::kTableLimit));
    }
    const std::size_t order = group_->order();
    const int n = ptm_dim_of(spec_.q);
    const double inv_order = 1.0 / static_cast<double>(order);
    RMatrix w = RMatrix::Zero(n, static_cast<Eigen::Index>(order));
    for (std::size_t g = 0; g < order; ++g) {
      RVector acc = RVector::Zero(n);
      for (std::size_t h = 0; h < weights_.size(); ++h) acc += weights_[h] * (noisy_[compiled_first(g, h)].matrix() * rho_noisy_.v);
      w.col(static_cast<Eigen::Index>(g)) = acc * inv_order / static_cast<double>(weights_.size());
    }
    const int max_m = *std::max_element(spec_.lengths.begin(), spec_.lengths.end());
    const std::set<int> wanted(spec_.lengths.begin(), spec_.lengths.end());
    std::vector<RawRecord> out;
    auto emit = [&](int k) {
      double total = 0.0;
      for (std::size_t g = 0; g < order; ++g) total += meas_noisy_.v.dot(noisy_[group_->inverse(g)].matrix() * w.col(static_cast<Eigen::Index>(g)));
      out.push_back({k, 0, "avg", -1, 1.0, total});
    };
    if (wanted.count(1)) emit(1);
    for (int k = 2; k <= max_m; ++k) {
      RMatrix next = RMatrix::Zero(n, static_cast<Eigen::Index>(order));
      // w_{k}(a g) += Phi(a) w_{k-1}(g) / |G| for every step a.
      for (std::size_t a = 0; a < order; ++a) {
        const RMatrix moved = noisy_[a].matrix() * w;
        for (std::size_t g = 0; g < order; ++g) next.col(static_cast<Eigen::Index>(group_->multiply(a, g))) += moved.col(static_cast<Eigen::Index>(g));
      }
      w = next * inv_order;
      if (wanted.count(k)) emit(k);
    }
    return out;
  }

  ExperimentSpec spec_;
  std::shared_ptr<const GateGroup> group_;
  IrrepDecomposition decomp_;
  std::shared_ptr<const GateGroup> char_group_;
  std::vector<std::size_t> char_embedding_;
  std::vector<double> weights_;
  std::vector<std::string> ghat_labels_;
  Ptm pi_hat_{Ptm::identity(1)};
  std::string target_;
  std::shared_ptr<const GateGroup> closure_;
  std::vector<std::size_t> closure_embedding_;
  std::optional<std::size_t> c_index_;
  std::optional<Ptm> c_noise_, c_noisy_;
  std::shared_ptr<NoiseModel> noise_;
  std::vector<Ptm> noisy_;
  StateVec rho_;
  Effect meas_;
  StateVec rho_noisy_;
  Effect meas_noisy_;
};

inline DecayCurve run_character_rb(const ExperimentSpec& spec, GroupCatalog& catalog, int threads = 1) {
  if (!spec.is_character()) throw ConfigError("character RB needs a character group");
  if (spec.is_interleaved()) throw ConfigError("use run_interleaved_character_rb for interleaved experiments");
  return Experiment(spec, catalog).run(threads);
}

inline DecayCurve run_standard_rb(const ExperimentSpec& spec, GroupCatalog& catalog, int threads = 1) {
  if (spec.is_character()) throw ConfigError("standard RB takes no character group");
  return Experiment(spec, catalog).run(threads);
}

inline DecayCurve run_interleaved_character_rb(const ExperimentSpec& spec, GroupCatalog& catalog, int threads = 1) {
  if (!spec.is_character() || !spec.is_interleaved()) {
    throw ConfigError("interleaved character RB needs a character group and an interleaving gate");
  }
  return Experiment(spec, catalog).run(threads);
}

}  // namespace charb
