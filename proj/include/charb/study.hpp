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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "charb/analysis.hpp"
#include "charb/io.hpp"
#include "charb/rb_engine.hpp"

namespace charb {

/// One experiment of a study plus how its curve is used.
struct StudyEntry {
  ExperimentSpec spec;
  std::string role = "reference";  // reference | interleaved
  std::string fit = "single";      // single | offset
};

/// A set of experiments analysed together. Analysis kinds: none (fits
/// only), fidelity (F_avg of the reference entries) and interleaved
/// (reference and interleaved fidelities, bounds and point estimate).
struct Study {
  std::string name;
  std::string analysis = "none";
  std::string mapping = "auto";
  double coefficient = 2.0;
  std::vector<StudyEntry> entries;
};

struct PresetOptions {
  std::uint64_t seed = 1;
  double single_qubit_fidelity = 0.987;
  double two_qubit_fidelity = 0.898;
};

inline std::vector<std::string> preset_names() {
  return {"supp-fig-2-char", "supp-fig-2-standard", "tgate-f2", "tgate-f3"};
}

namespace detail {

// Fixed device seeds: the same physical gates in every preset run.
inline constexpr std::uint64_t kReferenceNoiseSeed = 1001;
inline constexpr std::uint64_t kInterleaveNoiseSeed = 1002;
inline constexpr std::uint64_t kCliffordNoiseSeed = 1003;

inline std::vector<int> range(int a, int b) {
  std::vector<int> v;
  for (int i = a; i <= b; ++i) v.push_back(i);
  return v;
}

inline NoiseSpec random_unitary_spec(double fidelity, bool per_qubit, std::optional<std::uint64_t> seed = std::nullopt) {
  NoiseSpec n;
  n.type = "random_unitary";
  n.infidelity = 1.0 - fidelity;
  n.per_qubit = per_qubit;
  n.seed = seed;
  return n;
}

inline NoiseSpec per_gate(NoiseSpec base, std::uint64_t seed) {
  NoiseSpec n;
  n.type = "gate_dependent";
  n.layers = {std::move(base)};
  n.seed = seed;
  return n;
}

}  // namespace detail

inline Study preset(const std::string& name, const PresetOptions& opt = {}) {
  using namespace detail;
  Study st;
  st.name = name;
  auto base = [&](std::string ename, std::uint64_t index) {
    ExperimentSpec s;
    s.name = std::move(ename);
    s.q = 2;
    s.lengths = range(1, 15);
    s.n_sequences = 100;
    s.mode = RunMode::Exact;
    s.rho = single_term("00");
    s.meas = single_term("00");
    s.seed = stream_key({opt.seed, index});
    return s;
  };
  const NoiseSpec c_noise = random_unitary_spec(opt.two_qubit_fidelity, false, kInterleaveNoiseSeed);
  if (name == "supp-fig-2-char") {
    st.analysis = "interleaved";
    const NoiseSpec ref = per_gate(random_unitary_spec(opt.single_qubit_fidelity, true), kReferenceNoiseSeed);
    std::uint64_t index = 0;
    for (const std::string role : {"reference", "interleaved"}) {
      for (const auto& [sigma, label] : std::vector<std::pair<std::string, std::string>>{{"ZI", "10"}, {"IZ", "01"}, {"ZZ", "11"}}) {
        auto s = base(std::string(role == "reference" ? "ref_" : "int_") + sigma, index++);
        s.group = "clifford1_tensor2";
        s.character_group = "pauli";
        s.sigma_hat = sigma;
        s.target_irrep = label;
        s.spam = {0.99, 0.8};
        s.noise = ref;
        if (role == "interleaved") {
          s.interleave = "cphase";
          s.interleave_noise = c_noise;
        }
        st.entries.push_back({s, role, "single"});
      }
    }
  } else if (name == "supp-fig-2-standard") {
    st.analysis = "interleaved";
    // A two-qubit Clifford: a single-qubit layer, a two-qubit gate, a single-qubit layer.
    NoiseSpec clifford;
    clifford.type = "composite";
    clifford.layers = {random_unitary_spec(opt.single_qubit_fidelity, true, 1),
                       random_unitary_spec(opt.two_qubit_fidelity, false, 2),
                       random_unitary_spec(opt.single_qubit_fidelity, true, 3)};
    const NoiseSpec ref = per_gate(clifford, kCliffordNoiseSeed);
    for (const std::string role : {"reference", "interleaved"}) {
      auto s = base(role == "reference" ? "ref" : "int", role == "reference" ? 0 : 1);
      s.group = "clifford2";
      s.spam = {0.99, 0.8};
      s.noise = ref;
      if (role == "interleaved") {
        s.interleave = "cphase";
        s.interleave_noise = c_noise;
      }
      st.entries.push_back({s, role, "offset"});
    }
  } else if (name == "tgate-f2" || name == "tgate-f3") {
    const bool f2 = name == "tgate-f2";
    auto s = base(f2 ? "f2" : "f3", 0);
    s.group = "cnot_dihedral";
    s.character_group = "pauli";
    s.sigma_hat = f2 ? "ZZ" : "XX";
    s.target_irrep = f2 ? "2" : "3";
    s.lengths = range(1, 20);
    s.n_sequences = 50;
    // Even-parity eigenspace of sigma-hat for both preparation and measurement.
    s.rho = f2 ? PureTerms{{{"00", 0.5}, {"11", 0.5}}} : PureTerms{{{"++", 0.5}, {"--", 0.5}}};
    s.meas = f2 ? PureTerms{{{"00", 1.0}, {"11", 1.0}}} : PureTerms{{{"++", 1.0}, {"--", 1.0}}};
    s.noise.type = "depolarizing";
    s.noise.p = 0.95;
    st.entries.push_back({s, "reference", "single"});
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return st;
}

inline Json to_json(const Study& st) {
  Json j;
  j["name"] = st.name;
  j["analysis"] = Json{{"kind", st.analysis}, {"mapping", st.mapping}, {"coefficient", st.coefficient}};
  j["experiments"] = Json::array();
  for (const auto& e : st.entries) {
    Json x = to_json(e.spec);
    x["role"] = e.role;
    x["fit"] = e.fit;
    j["experiments"].push_back(x);
  }
  return j;
}

/// Accepts a study ({"experiments": [...]}), a single experiment
/// ({"group": ...}) or a preset reference ({"preset": name, "seed": n, ...}).
inline Study study_from_json(const Json& j, std::optional<std::uint64_t> seed_override = std::nullopt) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (j.contains("preset")) {
    detail::check_keys(j, {"preset", "seed", "single_qubit_fidelity", "two_qubit_fidelity"}, "preset config");
    PresetOptions opt;
    opt.seed = seed_override.value_or(detail::get_or<std::uint64_t>(j, "seed", 1, "preset config"));
    opt.single_qubit_fidelity = detail::get_or<double>(j, "single_qubit_fidelity", opt.single_qubit_fidelity, "preset config");
    opt.two_qubit_fidelity = detail::get_or<double>(j, "two_qubit_fidelity", opt.two_qubit_fidelity, "preset config");
    return preset(detail::get<std::string>(j, "preset", "preset config"), opt);
  }
  Study st;
  auto entry = [&](const Json& x) {
    StudyEntry e{experiment_from_json(x, seed_override), "reference", "single"};
    e.role = detail::get_or<std::string>(x, "role", "reference", "experiment");
    e.fit = detail::get_or<std::string>(x, "fit", e.spec.is_character() ? "single" : "offset", "experiment");
    if (e.role != "reference" && e.role != "interleaved") throw ConfigError("role must be reference or interleaved");
    if (e.fit != "single" && e.fit != "offset") throw ConfigError("fit must be single or offset");
    return e;
  };
  if (j.contains("experiments")) {
    detail::check_keys(j, {"name", "analysis", "experiments"}, "study");
    st.name = detail::get_or<std::string>(j, "name", "study", "study");
    if (j.contains("analysis")) {
      const auto& a = j["analysis"];
      detail::check_keys(a, {"kind", "mapping", "coefficient"}, "analysis");
      st.analysis = detail::get_or<std::string>(a, "kind", "none", "analysis");
      st.mapping = detail::get_or<std::string>(a, "mapping", "auto", "analysis");
      st.coefficient = detail::get_or<double>(a, "coefficient", 2.0, "analysis");
    }
    if (!j["experiments"].is_array() || j["experiments"].empty()) throw ConfigError("study: experiments must be a non-empty array");
    for (const auto& x : j["experiments"]) st.entries.push_back(entry(x));
  } else {
    st.entries.push_back(entry(j));
    st.name = st.entries.front().spec.name;
  }
  if (st.analysis != "none" && st.analysis != "fidelity" && st.analysis != "interleaved") {
    throw ConfigError("unknown analysis kind '" + st.analysis + "'");
  }
  parse_psi_mapping(st.mapping);
  std::set<std::string> names;
  for (const auto& e : st.entries) {
    if (!names.insert(e.spec.name).second) throw ConfigError("duplicate experiment name '" + e.spec.name + "'");
  }
  return st;
}

struct EntryResult {
  std::vector<RawRecord> raw;
  DecayCurve curve;
  std::optional<FitResult> fit;
  std::string fit_error;
  std::string target;  // irrep whose quality parameter the fit estimates
};

struct StudyResult {
  Study study;
  std::vector<EntryResult> entries;
  std::optional<FidelityEstimate> reference, interleaved;
  std::optional<BoundResult> bounds;
};

namespace detail {

/// The irrep a curve's decay belongs to: lambda' for character RB, the
/// unique nontrivial irrep for standard RB.
inline std::string fitted_irrep(const Experiment& ex) {
  if (!ex.target_irrep().empty()) return ex.target_irrep();
  const auto& d = ex.decomposition();
  if (d.size() != 2) return "";
  return d.labels[d.trivial == 0 ? 1 : 0];
}

inline FidelityEstimate role_fidelity(const StudyResult& r, const std::string& role, const IrrepDecomposition& d) {
  std::map<std::string, double> f;
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const auto& e = r.entries[i];
    if (r.study.entries[i].role != role) continue;
    if (!e.fit) throw NumericalError("fit failed for '" + r.study.entries[i].spec.name + "': " + e.fit_error);
    if (e.target.empty()) throw ConfigError("cannot attribute the decay of '" + r.study.entries[i].spec.name + "' to one irrep");
    f[e.target] = e.fit->f.value;
  }
  std::map<std::string, int> dims;
  for (std::size_t i = 0; i < d.size(); ++i) dims[d.labels[i]] = d.dims[i];
  return fidelity_from_quality(f, dims, d.group->q());
}

}  // namespace detail

inline StudyResult run_study(const Study& st, GroupCatalog& catalog, int threads = 1) {
  StudyResult r;
  r.study = st;
  std::optional<IrrepDecomposition> decomp;
  for (const auto& e : st.entries) {
    Experiment ex(e.spec, catalog);
    EntryResult er;
    er.raw = ex.simulate(threads);
    er.curve = aggregate(er.raw);
    er.curve.spec = e.spec;
    er.target = detail::fitted_irrep(ex);
    try {
      er.fit = e.fit == "offset" ? fit_offset_exponential(er.curve) : fit_single_exponential(er.curve);
    } catch (const NumericalError& err) {
      er.fit_error = err.what();
    }
    if (!decomp) decomp = ex.decomposition();
    r.entries.push_back(std::move(er));
  }
  if (st.analysis == "fidelity" || st.analysis == "interleaved") r.reference = detail::role_fidelity(r, "reference", *decomp);
  if (st.analysis == "interleaved") {
    r.interleaved = detail::role_fidelity(r, "interleaved", *decomp);
    r.bounds = interleaved_bounds(r.reference->F_avg, r.interleaved->F_avg, decomp->group->q(), parse_psi_mapping(st.mapping),
                                  st.coefficient);
  }
  return r;
}

inline Json fit_json(const StudyResult& r) {
  Json j;
  j["study"] = r.study.name;
  j["fits"] = Json::array();
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const auto& e = r.entries[i];
    Json x;
    x["experiment"] = r.study.entries[i].spec.name;
    x["role"] = r.study.entries[i].role;
    x["irrep"] = e.target;
    if (e.fit) {
      x["fit"] = to_json(*e.fit);
    } else {
      x["fit"] = nullptr;
      x["error"] = e.fit_error;
    }
    j["fits"].push_back(x);
  }
  auto fid = [](const FidelityEstimate& f) {
    Json x;
    x["F_avg"] = f.F_avg;
    x["params"] = f.params;
    x["dims"] = f.dims;
    return x;
  };
  if (r.reference) j["reference"] = fid(*r.reference);
  if (r.interleaved) j["interleaved"] = fid(*r.interleaved);
  if (r.bounds) j["bounds"] = to_json(*r.bounds);
  return j;
}

/// Writes raw.csv / curve.csv (per experiment subdirectory when the study
/// has several experiments) and fit.json.
inline void write_study(const StudyResult& r, const std::filesystem::path& out) {
  const bool single = r.entries.size() == 1;
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const auto dir = single ? out : out / r.study.entries[i].spec.name;
    write_file(dir / "raw.csv", raw_csv(r.entries[i].raw));
    write_file(dir / "curve.csv", curve_csv(r.entries[i].curve));
  }
  std::vector<std::pair<std::string, DecayCurve>> curves;
  for (std::size_t i = 0; i < r.entries.size(); ++i) curves.emplace_back(r.study.entries[i].spec.name, r.entries[i].curve);
  write_file(out / "curves.svg", curves_svg(curves));
  write_file(out / "config.json", to_json(r.study).dump(2) + "\n");
  write_file(out / "fit.json", fit_json(r).dump(2) + "\n");
}

/// A reproduced number with its reference value and tolerance.
struct FigureCheck {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass() const { return std::abs(value - target) <= tolerance + 1e-12; }
};

/// Checks the two presets against the published figure numbers.
inline std::vector<FigureCheck> figure_checks(const StudyResult& two_for_one, const StudyResult& standard) {
  return {
      {"2-for-1 F_ref", two_for_one.reference->F_avg, 0.98, 0.01},
      {"2-for-1 F_int", two_for_one.interleaved->F_avg, 0.87, 0.02},
      {"standard F_ref", standard.reference->F_avg, 0.86, 0.02},
      {"standard F_int", standard.interleaved->F_avg, 0.78, 0.02},
      {"2-for-1 lower bound", two_for_one.bounds->lower, 0.79, 0.03},
      {"standard lower bound", standard.bounds->lower, 0.62, 0.04},
      {"2-for-1 F_est", two_for_one.bounds->F_est, 0.89, 0.02},
      {"standard F_est", standard.bounds->F_est, 0.90, 0.02},
  };
}

inline Json to_json(const std::vector<FigureCheck>& checks) {
  Json a = Json::array();
  for (const auto& c : checks) {
    a.push_back(Json{{"quantity", c.name}, {"value", c.value}, {"target", c.target}, {"tolerance", c.tolerance}, {"pass", c.pass()}});
  }
  return a;
}

}  // namespace charb
