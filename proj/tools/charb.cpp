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

// charb: command-line front end for character randomized benchmarking
// simulations, fits, fidelity reconstruction and interleaved bounds.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "charb/analysis.hpp"
#include "charb/io.hpp"
#include "charb/rep_theory.hpp"
#include "charb/study.hpp"

namespace {

using charb::Json;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out = "charb_out";
  int threads = 1;
  bool json = false;
};

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

Json irreps_json(const charb::IrrepDecomposition& d) {
  Json a = Json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    Json support = Json::array();
    for (const auto& s : charb::enumerate_basis(d.group->q())) {
      if (d.projectors[i].matrix()(s.index(), s.index()) > 0.5) support.push_back(s.to_string());
    }
    Json x{{"label", d.labels[i]}, {"dim", d.dims[i]}, {"trivial", i == d.trivial}};
    // The Pauli support is only meaningful for diagonal projectors.
    const auto& p = d.projectors[i].matrix();
    if ((p - charb::RMatrix(p.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-9) x["pauli_support"] = support;
    a.push_back(x);
  }
  return a;
}

int cmd_simulate(const Globals& g, const std::string& config, const std::string& preset_name) {
  charb::Study st;
  if (!preset_name.empty()) {
    charb::PresetOptions opt;
    if (g.seed) opt.seed = *g.seed;
    st = charb::preset(preset_name, opt);
  } else {
    if (config.empty()) throw charb::ConfigError("simulate needs a config file or --preset");
    st = charb::study_from_json(charb::parse_json(charb::read_file(config)), g.seed);
  }
  charb::GroupCatalog catalog;
  const auto r = charb::run_study(st, catalog, g.threads);
  charb::write_study(r, g.out);
  const Json fit = charb::fit_json(r);
  if (g.json) {
    print(fit);
  } else {
    for (const auto& x : fit["fits"]) {
      std::cout << x["experiment"].get<std::string>() << ": ";
      if (x["fit"].is_null()) {
        std::cout << "fit failed (" << x["error"].get<std::string>() << ")\n";
      } else {
        std::cout << "f = " << x["fit"]["f"]["value"] << " +- " << x["fit"]["f"]["std_error"] << "\n";
      }
    }
    if (r.reference) std::cout << "F_ref = " << r.reference->F_avg << "\n";
    if (r.interleaved) std::cout << "F_int = " << r.interleaved->F_avg << "\n";
    if (r.bounds) std::cout << "bounds [" << r.bounds->lower << ", " << r.bounds->upper << "], F_est = " << r.bounds->F_est << "\n";
    std::cout << "wrote " << g.out << "\n";
  }
  return 0;
}

int cmd_reproduce(const Globals& g, double f1, int sequences) {
  charb::PresetOptions opt;
  if (g.seed) opt.seed = *g.seed;
  opt.single_qubit_fidelity = f1;
  charb::GroupCatalog catalog;
  auto run = [&](const std::string& name) {
    auto st = charb::preset(name, opt);
    if (sequences > 0)
      for (auto& e : st.entries) e.spec.n_sequences = sequences;
    auto r = charb::run_study(st, catalog, g.threads);
    charb::write_study(r, std::filesystem::path(g.out) / name);
    return r;
  };
  const auto two = run("supp-fig-2-char");
  const auto standard = run("supp-fig-2-standard");
  const auto checks = charb::figure_checks(two, standard);
  Json summary;
  summary["single_qubit_fidelity"] = opt.single_qubit_fidelity;
  summary["two_qubit_fidelity"] = opt.two_qubit_fidelity;
  summary["seed"] = opt.seed;
  summary["two_for_one"] = charb::fit_json(two);
  summary["standard"] = charb::fit_json(standard);
  summary["checks"] = charb::to_json(checks);
  bool all = true;
  for (const auto& c : checks) all = all && c.pass();
  summary["all_pass"] = all;
  charb::write_file(std::filesystem::path(g.out) / "summary.json", summary.dump(2) + "\n");
  if (g.json) {
    print(summary);
  } else {
    for (const auto& c : checks) {
      std::printf("%-22s %8.4f  target %.2f +- %.2f  %s\n", c.name.c_str(), c.value, c.target, c.tolerance,
                  c.pass() ? "PASS" : "FAIL");
    }
    std::cout << "wrote " << g.out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"charb: character randomized benchmarking simulator"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed")->group("Global");
  app.add_option("--out", g.out, "Output directory")->group("Global");
  app.add_option("--threads", g.threads, "Worker threads for sequence simulation")->check(CLI::Range(1, 256))->group("Global");
  app.add_flag("--json", g.json, "Print machine-readable JSON")->group("Global");
  app.fallthrough();

  std::string config, preset_name;
  auto* simulate = app.add_subcommand("simulate", "Run an experiment, study or preset; writes raw.csv, curve.csv, fit.json");
  simulate->add_option("config", config, "Experiment/study JSON file");
  simulate->add_option("--preset", preset_name, "Named preset")->check(CLI::IsMember(charb::preset_names()));

  double f1 = 0.987;
  int sequences = 0;
  auto* reproduce = app.add_subcommand("reproduce-figure", "Run the 2-for-1 and standard interleaved presets and compare");
  reproduce->add_option("--single-qubit-fidelity", f1, "Single-qubit gate fidelity")->check(CLI::Range(0.5, 1.0));
  reproduce->add_option("--sequences", sequences, "Override sequences per length")->check(CLI::PositiveNumber);

  std::string name;
  int q = 1;
  bool numeric = false;
  auto* groups = app.add_subcommand("groups", "Gate group information");
  groups->require_subcommand(1);
  auto* ginfo = groups->add_subcommand("info", "Order and properties of a group");
  ginfo->add_option("--name", name, "Group name")->required();
  ginfo->add_option("--q", q, "Qubits")->required();
  auto* glist = groups->add_subcommand("list", "List builtin groups");

  auto* irreps = app.add_subcommand("irreps", "Irreducible decomposition of a group's PTM representation");
  irreps->add_option("--group,--name", name, "Group name")->required();
  irreps->add_option("--q", q, "Qubits")->required();
  irreps->add_flag("--numeric", numeric, "Use the numerical decomposition");

  std::string gate = "cphase", mgroup = "clifford1_tensor2";
  auto* mixing = app.add_subcommand("mixing", "Mixing matrix of an interleaving gate");
  mixing->add_option("--gate", gate, "Interleaving gate");
  mixing->add_option("--group", mgroup, "Reference group (2 qubits)");

  std::string curve_path, model = "single";
  auto* fit = app.add_subcommand("fit", "Fit a curve CSV (m,k_mean,std_error,n)");
  fit->add_option("curve", curve_path, "Curve CSV")->required();
  fit->add_option("--model", model, "single or offset")->check(CLI::IsMember({"single", "offset"}));

  std::string params;
  auto* fidelity = app.add_subcommand("fidelity", "Average fidelity from quality parameters");
  fidelity->add_option("--group,--name", name, "Group name")->required();
  fidelity->add_option("--q", q, "Qubits");
  fidelity->add_option("--params", params, R"(JSON object {"label": f, ...})")->required();

  double f_ref = 0, f_int = 0, coefficient = 2.0;
  std::string mapping = "auto";
  int bq = 2;
  auto* bounds = app.add_subcommand("bounds", "Interleaved fidelity bounds and estimate");
  bounds->add_option("--ref", f_ref, "Reference fidelity")->required();
  bounds->add_option("--int", f_int, "Interleaved fidelity")->required();
  bounds->add_option("--q", bq, "Qubits");
  bounds->add_option("--mapping", mapping, "auto, process, polarization or paper");
  bounds->add_option("--coefficient", coefficient, "Cross-term coefficient");

  double epsilon = 0.02, confidence = 0.99;
  std::vector<double> range{-1.0, 1.0};
  auto* plan = app.add_subcommand("plan", "Hoeffding sample size");
  plan->add_option("--epsilon", epsilon, "Half-width")->required();
  plan->add_option("--confidence", confidence, "Confidence level")->required();
  plan->add_option("--range", range, "Estimator range a b")->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*simulate) return cmd_simulate(g, config, preset_name);
    if (*reproduce) return cmd_reproduce(g, f1, sequences);
    if (*groups) {
      if (*glist) {
        print(Json{{"groups", charb::builtin_group_names()}});
        return 0;
      }
      charb::GroupCatalog catalog;
      const auto grp = catalog.get(name, q);
      print(Json{{"name", grp->name()},
                 {"q", grp->q()},
                 {"order", grp->order()},
                 {"generators", grp->generators().size()},
                 {"multiplication_table", grp->has_table()},
                 {"pauli_group", !grp->pauli_labels().empty()}});
      return 0;
    }
    if (*irreps) {
      charb::GroupCatalog catalog;
      const auto grp = catalog.get(name, q);
      const auto d = numeric ? charb::numeric_decomposition(grp, g.seed.value_or(7)) : charb::analytic_decomposition(grp);
      print(Json{{"group", name}, {"q", q}, {"method", numeric ? "numeric" : "analytic"}, {"irreps", irreps_json(d)}});
      return 0;
    }
    if (*mixing) {
      charb::GroupCatalog catalog;
      const auto grp = catalog.get(mgroup, 2);
      const auto d = charb::analytic_decomposition(grp);
      const auto r = charb::mixing_matrix(d, charb::interleaving_gate(gate, 2), charb::Ptm::identity(2));
      Json rows = Json::array();
      for (Eigen::Index i = 0; i < r.matrix.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < r.matrix.cols(); ++k) row.push_back(r.matrix(i, k));
        rows.push_back(row);
      }
      Json ev = Json::array();
      for (auto e : r.eigenvalues) ev.push_back(Json{{"re", e.real()}, {"im", e.imag()}});
      Json sums = Json::array();
      for (Eigen::Index i = 0; i < r.row_sums.size(); ++i) sums.push_back(r.row_sums(i));
      print(Json{{"group", mgroup}, {"gate", gate}, {"labels", r.labels}, {"matrix", rows}, {"row_sums", sums},
                 {"eigenvalues", ev}, {"irreducible", r.irreducible}});
      return 0;
    }
    if (*fit) {
      const auto c = charb::parse_curve_csv(charb::read_file(curve_path));
      const auto r = model == "offset" ? charb::fit_offset_exponential(c) : charb::fit_single_exponential(c);
      print(charb::to_json(r));
      return 0;
    }
    if (*fidelity) {
      charb::GroupCatalog catalog;
      const int gq = name == "clifford1" ? 1 : (fidelity->count("--q") ? q : 2);
      const auto d = charb::analytic_decomposition(catalog.get(name, gq));
      std::map<std::string, double> f;
      const Json pj = charb::parse_json(params);
      if (!pj.is_object()) throw charb::ConfigError("--params must be a JSON object");
      for (auto it = pj.begin(); it != pj.end(); ++it) {
        if (!it.value().is_number()) throw charb::ConfigError("--params values must be numbers");
        f[it.key()] = it.value().get<double>();
      }
      std::map<std::string, int> dims;
      for (std::size_t i = 0; i < d.size(); ++i) dims[d.labels[i]] = d.dims[i];
      const auto est = charb::fidelity_from_quality(f, dims, gq);
      print(Json{{"group", name}, {"q", gq}, {"F_avg", est.F_avg}, {"params", est.params}, {"dims", est.dims}});
      return 0;
    }
    if (*bounds) {
      const auto r = charb::interleaved_bounds(f_ref, f_int, bq, charb::parse_psi_mapping(mapping), coefficient);
      Json j = charb::to_json(r);
      j["requested_mapping"] = mapping;
      print(j);
      return 0;
    }
    if (*plan) {
      print(Json{{"epsilon", epsilon},
                 {"confidence", confidence},
                 {"range", range},
                 {"N", charb::hoeffding_sample_size(epsilon, confidence, range[0], range[1])},
                 {"N_paper_variant", charb::hoeffding_sample_size_variant(epsilon, confidence, range[0], range[1])}});
      return 0;
    }
  } catch (const charb::Error& e) {
    std::cerr << "charb: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "charb: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
