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

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "charb/analysis.hpp"
#include "charb/common.hpp"
#include "charb/curve.hpp"
#include "charb/experiment.hpp"

namespace charb {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form; identical inputs give identical text.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace detail {

inline void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
T get(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
  }
}

template <class T>
T get_or(const Json& j, const std::string& key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

}  // namespace detail

inline Json to_json(const NoiseSpec& n) {
  Json j;
  j["type"] = n.type;
  if (n.p) j["p"] = *n.p;
  if (n.infidelity != 0.0) j["infidelity"] = n.infidelity;
  if (n.per_qubit) j["per_qubit"] = true;
  if (n.seed) j["seed"] = *n.seed;
  if (!n.layers.empty()) {
    j["layers"] = Json::array();
    for (const auto& l : n.layers) j["layers"].push_back(to_json(l));
  }
  return j;
}

inline NoiseSpec noise_from_json(const Json& j) {
  const std::string where = "noise";
  detail::check_keys(j, {"type", "p", "infidelity", "per_qubit", "seed", "layers"}, where);
  NoiseSpec n;
  n.type = detail::get<std::string>(j, "type", where);
  static const std::set<std::string> types{"none", "depolarizing", "random_unitary", "gate_dependent", "composite"};
  if (!types.count(n.type)) throw ConfigError("noise: unknown type '" + n.type + "'");
  if (j.contains("p")) n.p = detail::get<double>(j, "p", where);
  n.infidelity = detail::get_or<double>(j, "infidelity", 0.0, where);
  n.per_qubit = detail::get_or<bool>(j, "per_qubit", false, where);
  if (j.contains("seed")) n.seed = detail::get<std::uint64_t>(j, "seed", where);
  if (j.contains("layers")) {
    if (!j["layers"].is_array()) throw ConfigError("noise: layers must be an array");
    for (const auto& l : j["layers"]) n.layers.push_back(noise_from_json(l));
  }
  return n;
}

inline Json to_json(const PureTerms& t) {
  Json a = Json::array();
  for (const auto& [label, w] : t.terms) a.push_back(Json{{"state", label}, {"weight", w}});
  return a;
}

/// Accepts "00" or [{"state": "00", "weight": 0.5}, ...].
inline PureTerms terms_from_json(const Json& j, const std::string& where) {
  PureTerms t;
  if (j.is_string()) return single_term(j.get<std::string>());
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a state label or a non-empty array of terms");
  for (const auto& e : j) {
    detail::check_keys(e, {"state", "weight"}, where);
    t.terms.emplace_back(detail::get<std::string>(e, "state", where), detail::get_or<double>(e, "weight", 1.0, where));
  }
  return t;
}

inline Json to_json(const ExperimentSpec& s) {
  Json j;
  j["name"] = s.name;
  j["group"] = s.group;
  j["q"] = s.q;
  if (s.character_group) {
    j["character_group"] = *s.character_group;
    j["sigma_hat"] = s.sigma_hat;
  }
  if (s.target_irrep) j["target_irrep"] = *s.target_irrep;
  if (s.interleave) j["interleave"] = Json{{"gate", *s.interleave}, {"noise", to_json(s.interleave_noise)}};
  j["lengths"] = s.lengths;
  j["n_sequences"] = s.n_sequences;
  j["shots"] = s.shots;
  j["mode"] = to_string(s.mode);
  j["rho"] = to_json(s.rho);
  j["Q"] = to_json(s.meas);
  j["spam"] = Json{{"prep", s.spam.prep}, {"meas", s.spam.meas}};
  j["noise"] = to_json(s.noise);
  j["seed"] = s.seed;
  return j;
}

inline ExperimentSpec experiment_from_json(const Json& j, std::optional<std::uint64_t> seed_override = std::nullopt) {
  const std::string where = "experiment";
  detail::check_keys(j, {"name", "group", "q", "character_group", "sigma_hat", "target_irrep", "interleave", "lengths",
                         "n_sequences", "shots", "mode", "rho", "Q", "spam", "noise", "seed", "role", "fit"},
                     where);
  ExperimentSpec s;
  s.name = detail::get_or<std::string>(j, "name", "experiment", where);
  s.group = detail::get<std::string>(j, "group", where);
  s.q = detail::get<int>(j, "q", where);
  if (j.contains("character_group")) {
    s.character_group = detail::get<std::string>(j, "character_group", where);
    s.sigma_hat = detail::get<std::string>(j, "sigma_hat", where);
  }
  if (j.contains("target_irrep")) s.target_irrep = detail::get<std::string>(j, "target_irrep", where);
  if (j.contains("interleave")) {
    const auto& il = j["interleave"];
    detail::check_keys(il, {"gate", "noise"}, "interleave");
    s.interleave = detail::get<std::string>(il, "gate", "interleave");
    if (il.contains("noise")) s.interleave_noise = noise_from_json(il["noise"]);
  }
  s.lengths = detail::get<std::vector<int>>(j, "lengths", where);
  s.n_sequences = detail::get_or<int>(j, "n_sequences", 100, where);
  s.shots = detail::get_or<int>(j, "shots", 0, where);
  s.mode = parse_run_mode(detail::get_or<std::string>(j, "mode", s.shots > 0 ? "shots" : "exact", where));
  s.rho = terms_from_json(detail::get<Json>(j, "rho", where), "rho");
  s.meas = terms_from_json(detail::get<Json>(j, "Q", where), "Q");
  if (j.contains("spam")) {
    const auto& sp = j["spam"];
    detail::check_keys(sp, {"prep", "meas"}, "spam");
    s.spam.prep = detail::get_or<double>(sp, "prep", 1.0, "spam");
    s.spam.meas = detail::get_or<double>(sp, "meas", 1.0, "spam");
  }
  if (j.contains("noise")) s.noise = noise_from_json(j["noise"]);
  s.seed = seed_override.value_or(detail::get_or<std::uint64_t>(j, "seed", 1, where));
  s.validate();
  return s;
}

inline Json to_json(const FitParam& p) { return Json{{"value", p.value}, {"std_error", p.std_error}}; }

inline Json to_json(const FitResult& r) {
  Json j;
  j["model"] = r.model;
  j["A"] = to_json(r.A);
  if (r.model == "offset") j["B"] = to_json(r.B);
  j["f"] = to_json(r.f);
  j["residual_norm"] = r.residual_norm;
  j["converged"] = r.converged;
  j["identifiable"] = r.identifiable;
  j["iterations"] = r.iterations;
  return j;
}

inline Json to_json(const BoundResult& b) {
  return Json{{"F_ref", b.F_ref},     {"F_int", b.F_int}, {"lower", b.lower},
              {"upper", b.upper},     {"F_est", b.F_est}, {"F_est_feasible", b.F_est_feasible},
              {"mapping", to_string(b.mapping)}, {"coefficient", b.coefficient}, {"q", b.q}};
}

inline std::string raw_csv(const std::vector<RawRecord>& raw) {
  std::ostringstream os;
  os << "m,seq_index,ghat_label,shot,weight,value\n";
  for (const auto& r : raw) {
    os << r.m << ',' << r.seq_index << ',' << r.ghat_label << ',' << r.shot << ',' << format_double(r.weight) << ','
       << format_double(r.value) << '\n';
  }
  return os.str();
}

inline std::string curve_csv(const DecayCurve& c) {
  std::ostringstream os;
  os << "m,k_mean,std_error,n\n";
  for (const auto& p : c.points) {
    os << p.m << ',' << format_double(p.k_mean) << ',' << format_double(p.std_error) << ',' << p.n_samples << '\n';
  }
  return os.str();
}

/// Reads a curve CSV with header m,k_mean,std_error,n.
inline DecayCurve parse_curve_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("curve CSV is empty");
  if (line.rfind("m,k_mean,std_error,n", 0) != 0) throw ConfigError("curve CSV must start with header m,k_mean,std_error,n");
  DecayCurve c;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) throw ConfigError("curve CSV row " + std::to_string(row) + ": expected 4 columns");
    try {
      c.points.push_back({std::stoi(cells[0]), std::stod(cells[1]), std::stod(cells[2]), std::stoi(cells[3])});
    } catch (const std::exception&) {
      throw ConfigError("curve CSV row " + std::to_string(row) + ": not a number");
    }
  }
  return c;
}

/// Minimal line chart of one or more decay curves.
inline std::string curves_svg(const std::vector<std::pair<std::string, DecayCurve>>& curves) {
  const double w = 480, h = 320, pad = 40;
  double mmin = 1e300, mmax = -1e300, kmin = 0.0, kmax = 0.0;
  for (const auto& [name, c] : curves)
    for (const auto& p : c.points) {
      mmin = std::min(mmin, static_cast<double>(p.m));
      mmax = std::max(mmax, static_cast<double>(p.m));
      kmin = std::min(kmin, p.k_mean - p.std_error);
      kmax = std::max(kmax, p.k_mean + p.std_error);
    }
  if (mmax <= mmin) mmax = mmin + 1;
  if (kmax <= kmin) kmax = kmin + 1;
  auto x = [&](double m) { return pad + (m - mmin) / (mmax - mmin) * (w - 2 * pad); };
  auto y = [&](double k) { return h - pad - (k - kmin) / (kmax - kmin) * (h - 2 * pad); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << y(0) << "\" x2=\"" << w - pad << "\" y2=\"" << y(0) << "\" stroke=\"#888\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << h - pad << "\" stroke=\"#888\"/>\n";
  std::size_t i = 0;
  for (const auto& [name, c] : curves) {
    const char* col = colors[i % 6];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"";
    for (const auto& p : c.points) os << format_double(x(p.m)) << ',' << format_double(y(p.k_mean)) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << w - pad - 120 << "\" y=\"" << pad + 14 * i << "\" font-size=\"11\" fill=\"" << col << "\">" << name
       << "</text>\n";
    ++i;
  }
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 8 << "\" font-size=\"11\">m</text>\n";
  os << "</svg>\n";
  return os.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + p.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace charb
