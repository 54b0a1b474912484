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
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "charb/common.hpp"
#include "charb/curve.hpp"

namespace charb {

struct FitParam {
  double value = 0.0;
  double std_error = 0.0;  // NaN when the parameter is not identifiable
};

/// Result of k_m = A f^m ("single") or p_m = A + B f^m ("offset").
struct FitResult {
  std::string model;
  FitParam A, B, f;  // B unused (zero) for the single model
  double residual_norm = 0.0;
  bool converged = false;
  bool identifiable = true;
  int iterations = 0;
};

namespace detail {

struct FitData {
  std::vector<double> m, y, w;  // w = 1/sigma^2, or 1 when unweighted
  bool weighted = false;
};

inline FitData prepare_fit(const std::vector<double>& m, const std::vector<double>& y, const std::vector<double>& sigma) {
  if (m.size() != y.size() || m.size() != sigma.size()) throw DimensionError("fit: input lengths differ");
  if (std::set<double>(m.begin(), m.end()).size() < 3) throw ConfigError("fit needs at least 3 distinct sequence lengths");
  FitData d{m, y, {}, false};
  // Errors at rounding level (exact-mode curves) carry no information.
  double scale = 0.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  const double floor = 1e-12 * scale;
  double min_pos = std::numeric_limits<double>::infinity();
  for (double s : sigma) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("fit: standard errors must be finite and non-negative");
    if (s > floor) min_pos = std::min(min_pos, s);
  }
  d.weighted = std::isfinite(min_pos);
  // Points with zero error (e.g. exact data mixed with sampled data) get the
  // smallest reported error so no single point dominates without bound.
  for (double s : sigma) d.w.push_back(d.weighted ? 1.0 / std::pow(std::max(s, min_pos), 2) : 1.0);
  return d;
}

/// Weighted Levenberg-Marquardt with f projected onto [-1, 1].
template <class Model>
int levenberg_marquardt(const FitData& d, Eigen::VectorXd& theta, Model&& model, int f_index, bool& converged) {
  const auto n = static_cast<Eigen::Index>(d.m.size());
  const auto k = theta.size();
  auto cost = [&](const Eigen::VectorXd& th) {
    double c = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd g(k);
      const double r = d.y[i] - model(th, d.m[i], g);
      c += d.w[i] * r * r;
    }
    return c;
  };
  double lambda = 1e-3;
  double c = cost(theta);
  converged = false;
  int it = 0;
  for (; it < 1000; ++it) {
    Eigen::MatrixXd jtj = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd jtr = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd g(k);
      const double r = d.y[i] - model(theta, d.m[i], g);
      jtj += d.w[i] * g * g.transpose();
      jtr += d.w[i] * g * r;
    }
    bool improved = false;
    for (int tries = 0; tries < 60; ++tries) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index j = 0; j < k; ++j) a(j, j) += lambda * std::max(jtj(j, j), 1e-300);
      Eigen::VectorXd step = a.ldlt().solve(jtr);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      Eigen::VectorXd next = theta + step;
      next(f_index) = std::clamp(next(f_index), -1.0, 1.0);
      const double cn = cost(next);
      if (cn <= c) {
        const double rel = (next - theta).norm() / std::max(1.0, theta.norm());
        theta = next;
        const double drop = c - cn;
        c = cn;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        if (rel < 1e-15 || drop <= 1e-30 + 1e-20 * cn) converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) {
      // No downhill step at any damping: the current point is stationary.
      converged = true;
    }
    if (converged) break;
  }
  return it + 1;
}

template <class Model>
Eigen::MatrixXd normal_matrix(const FitData& d, const Eigen::VectorXd& theta, Model&& model) {
  const auto k = theta.size();
  Eigen::MatrixXd jtj = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < d.m.size(); ++i) {
    Eigen::VectorXd g(k);
    model(theta, d.m[i], g);
    jtj += d.w[i] * g * g.transpose();
  }
  return jtj;
}

inline double weighted_rss(const FitData& d, const std::vector<double>& fitted) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.m.size(); ++i) s += d.w[i] * std::pow(d.y[i] - fitted[i], 2);
  return s;
}

/// Log-linear initialization of (A, f) from points with |y| above 3 sigma.
inline std::optional<std::pair<double, double>> log_linear_init(const std::vector<double>& m, const std::vector<double>& y,
                                                                 const std::vector<double>& sigma) {
  std::vector<double> xs, ls;
  std::vector<int> signs;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const bool signal = sigma[i] > 0.0 ? std::abs(y[i]) > 3.0 * sigma[i] : std::abs(y[i]) > 1e-300;
    if (signal) pts.emplace_back(m[i], y[i]);
  }
  if (pts.empty()) return std::nullopt;
  std::sort(pts.begin(), pts.end());
  if (pts.size() == 1) return std::make_pair(pts[0].second, 0.99);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, v] : pts) {
    const double l = std::log(std::abs(v));
    sx += x;
    sy += l;
    sxx += x * x;
    sxy += x * l;
  }
  const double n = static_cast<double>(pts.size());
  const double den = n * sxx - sx * sx;
  const double slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  const double icpt = (sy - slope * sx) / n;
  // Alternating signs between consecutive lengths indicate f < 0.
  int flips = 0, pairs = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double dm = pts[i].first - pts[i - 1].first;
    if (dm == 1.0) {
      ++pairs;
      if ((pts[i].second > 0) != (pts[i - 1].second > 0)) ++flips;
    }
  }
  double f = std::min(std::exp(slope), 1.0);
  if (pairs > 0 && flips * 2 > pairs) f = -f;
  const double first_m = pts.front().first;
  double a = std::exp(icpt);
  const double sign_first = pts.front().second > 0 ? 1.0 : -1.0;
  const double sign_f_power = (f < 0 && std::fmod(std::abs(first_m), 2.0) == 1.0) ? -1.0 : 1.0;
  a *= sign_first * sign_f_power;
  return std::make_pair(a, f);
}

inline double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace detail

/// Weighted fit of k_m = A f^m. Zero standard errors everywhere give an
/// unweighted fit whose errors are scaled by the residual variance.
inline FitResult fit_single_exponential(const std::vector<double>& m, const std::vector<double>& y,
                                        const std::vector<double>& sigma) {
  auto d = detail::prepare_fit(m, y, sigma);
  auto init = detail::log_linear_init(m, y, sigma);
  if (!init) throw NumericalError("no signal: every point is consistent with zero");
  auto model = [](const Eigen::VectorXd& th, double mm, Eigen::VectorXd& g) {
    const double fm = std::pow(th(1), mm);
    g(0) = fm;
    g(1) = th(0) * mm * std::pow(th(1), mm - 1.0);
    return th(0) * fm;
  };
  Eigen::VectorXd theta(2);
  theta << init->first, init->second;
  FitResult r;
  r.model = "single";
  r.iterations = detail::levenberg_marquardt(d, theta, model, 1, r.converged);
  if (!r.converged) throw NumericalError("exponential fit did not converge");
  std::vector<double> fitted;
  for (double mm : m) fitted.push_back(theta(0) * std::pow(theta(1), mm));
  const double rss = detail::weighted_rss(d, fitted);
  r.residual_norm = std::sqrt(rss);
  Eigen::MatrixXd jtj = detail::normal_matrix(d, theta, model);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jtj);
  const auto& sv = svd.singularValues();
  r.identifiable = sv(sv.size() - 1) > 1e-12 * sv(0);
  Eigen::MatrixXd cov = r.identifiable ? Eigen::MatrixXd(jtj.inverse()) : Eigen::MatrixXd::Constant(2, 2, detail::nan());
  if (!d.weighted) cov *= m.size() > 2 ? rss / (m.size() - 2.0) : 0.0;
  r.A = {theta(0), std::sqrt(std::max(cov(0, 0), 0.0))};
  r.f = {theta(1), std::sqrt(std::max(cov(1, 1), 0.0))};
  if (!r.identifiable) r.A.std_error = r.f.std_error = detail::nan();
  return r;
}

inline FitResult fit_single_exponential(const DecayCurve& c) {
  std::vector<double> y, s;
  for (const auto& p : c.points) {
    y.push_back(p.k_mean);
    s.push_back(p.std_error);
  }
  return fit_single_exponential(c.ms(), y, s);
}

/// Weighted fit of p_m = A + B f^m. Flags non-identifiable fits (f = 1 or
/// constant data, where A and B cannot be separated).
inline FitResult fit_offset_exponential(const std::vector<double>& m, const std::vector<double>& y,
                                        const std::vector<double>& sigma) {
  auto d = detail::prepare_fit(m, y, sigma);
  FitResult r;
  r.model = "offset";
  const double ymax = *std::max_element(y.begin(), y.end());
  const double ymin = *std::min_element(y.begin(), y.end());
  const double scale = std::max({std::abs(ymax), std::abs(ymin), 1e-300});
  if (ymax - ymin <= 1e-13 * scale) {
    double mean = 0.0;
    for (double v : y) mean += v;
    r.A = {mean / y.size(), detail::nan()};
    r.B = {0.0, detail::nan()};
    r.f = {1.0, detail::nan()};
    r.converged = true;
    r.identifiable = false;
    return r;
  }
  // Plateau: mean of the longest third of the lengths.
  std::vector<std::size_t> order(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return m[a] < m[b]; });
  const std::size_t tail = std::max<std::size_t>(1, m.size() / 3);
  double plateau = 0.0;
  for (std::size_t i = m.size() - tail; i < m.size(); ++i) plateau += y[order[i]];
  plateau /= static_cast<double>(tail);

  auto model = [](const Eigen::VectorXd& th, double mm, Eigen::VectorXd& g) {
    const double fm = std::pow(th(2), mm);
    g(0) = 1.0;
    g(1) = fm;
    g(2) = th(1) * mm * std::pow(th(2), mm - 1.0);
    return th(0) + th(1) * fm;
  };
  // Try the plateau start and a few asymptote guesses below/above it; keep
  // the best converged fit (the plateau underestimates the decay for slow f).
  std::vector<double> starts{plateau};
  const double span = ymax - ymin;
  for (double frac : {0.5, 1.0, 2.0, 4.0}) {
    starts.push_back(plateau - frac * span);
    starts.push_back(plateau + frac * span);
  }
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta;
  int iterations = 0;
  for (double a0 : starts) {
    std::vector<double> shifted(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) shifted[i] = y[i] - a0;
    auto init = detail::log_linear_init(m, shifted, sigma);
    if (!init) continue;
    Eigen::VectorXd theta(3);
    theta << a0, init->first, std::clamp(init->second, -1.0, 1.0);
    bool conv = false;
    iterations += detail::levenberg_marquardt(d, theta, model, 2, conv);
    if (!conv || !theta.allFinite()) continue;
    std::vector<double> fitted;
    for (double mm : m) fitted.push_back(theta(0) + theta(1) * std::pow(theta(2), mm));
    const double rss = detail::weighted_rss(d, fitted);
    if (rss < best) {
      best = rss;
      best_theta = theta;
    }
  }
  if (!std::isfinite(best)) throw NumericalError("no signal: offset fit found no decaying component");
  r.converged = true;
  r.iterations = iterations;
  r.residual_norm = std::sqrt(best);
  Eigen::MatrixXd jtj = detail::normal_matrix(d, best_theta, model);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jtj);
  const auto& sv = svd.singularValues();
  r.identifiable = sv(sv.size() - 1) > 1e-12 * sv(0) && std::abs(best_theta(2)) < 1.0 - 1e-12;
  Eigen::MatrixXd cov = r.identifiable ? Eigen::MatrixXd(jtj.inverse()) : Eigen::MatrixXd::Constant(3, 3, detail::nan());
  if (!d.weighted) cov *= m.size() > 3 ? best / (m.size() - 3.0) : 0.0;
  r.A = {best_theta(0), std::sqrt(std::max(cov(0, 0), 0.0))};
  r.B = {best_theta(1), std::sqrt(std::max(cov(1, 1), 0.0))};
  r.f = {best_theta(2), std::sqrt(std::max(cov(2, 2), 0.0))};
  if (!r.identifiable) r.A.std_error = r.B.std_error = r.f.std_error = detail::nan();
  return r;
}

inline FitResult fit_offset_exponential(const DecayCurve& c) {
  std::vector<double> y, s;
  for (const auto& p : c.points) {
    y.push_back(p.k_mean);
    s.push_back(p.std_error);
  }
  return fit_offset_exponential(c.ms(), y, s);
}

struct FidelityEstimate {
  double F_avg = 0.0;
  std::map<std::string, double> params;
  std::map<std::string, int> dims;
  int q = 0;
};

/// F = (2^-q sum_lambda tr(P_lambda) f_lambda + 1) / (2^q + 1). A single
/// one-dimensional label absent from `params` is taken as the trivial irrep
/// (f = 1).
inline FidelityEstimate fidelity_from_quality(std::map<std::string, double> params, const std::map<std::string, int>& dims,
                                              int q) {
  check_qubits(q);
  for (const auto& [label, f] : params) {
    if (!dims.count(label)) throw ConfigError("dims missing label '" + label + "'");
  }
  int total = 0;
  std::vector<std::string> missing;
  for (const auto& [label, d] : dims) {
    total += d;
    if (!params.count(label)) missing.push_back(label);
  }
  if (total != ptm_dim_of(q)) throw ConfigError("irrep dimensions do not sum to 4^q");
  if (missing.size() > 1 || (missing.size() == 1 && dims.at(missing[0]) != 1)) {
    throw ConfigError("quality parameters missing for a nontrivial irrep");
  }
  if (missing.size() == 1) params[missing[0]] = 1.0;
  double s = 0.0;
  for (const auto& [label, d] : dims) s += d * params.at(label);
  const double dq = dim_of(q);
  return {(s / dq + 1.0) / (dq + 1.0), params, dims, q};
}

/// The CNOT-dihedral expression (2^q-1)/2^q (1 - (f2 + 2^q f3)/(2^q+1)),
/// which is the infidelity 1 - F of that gateset.
inline double cnot_dihedral_displayed_expression(double f2, double f3, int q) {
  const double d = dim_of(q);
  return (d - 1.0) / d * (1.0 - (f2 + d * f3) / (d + 1.0));
}

enum class PsiMapping { Paper, Process, Polarization };

inline std::string to_string(PsiMapping m) {
  switch (m) {
    case PsiMapping::Paper: return "paper";
    case PsiMapping::Process: return "process";
    case PsiMapping::Polarization: return "polarization";
  }
  return "process";
}

/// "auto" resolves to the mapping that reproduces the reference lower bounds.
inline PsiMapping parse_psi_mapping(const std::string& s) {
  if (s == "auto" || s == "process") return PsiMapping::Process;
  if (s == "paper") return PsiMapping::Paper;
  if (s == "polarization") return PsiMapping::Polarization;
  throw ConfigError("unknown psi mapping '" + s + "' (expected auto, paper, process or polarization)");
}

/// psi(F) and its inverse; every mapping is affine in F.
inline double psi_of(PsiMapping m, double F, int q) {
  const double d = dim_of(q);
  switch (m) {
    case PsiMapping::Paper: return ((d - 1.0) * F - 1.0) / d;
    case PsiMapping::Process: return ((d + 1.0) * F - 1.0) / d;
    case PsiMapping::Polarization: return (d * F - 1.0) / (d - 1.0);
  }
  return 0.0;
}

inline double fidelity_of_psi(PsiMapping m, double psi, int q) {
  const double d = dim_of(q);
  switch (m) {
    case PsiMapping::Paper: return (d * psi + 1.0) / (d - 1.0);
    case PsiMapping::Process: return (d * psi + 1.0) / (d + 1.0);
    case PsiMapping::Polarization: return ((d - 1.0) * psi + 1.0) / d;
  }
  return 0.0;
}

struct BoundResult {
  double F_ref = 0.0, F_int = 0.0;
  double lower = 0.0, upper = 0.0;
  double F_est = 0.0;
  bool F_est_feasible = false;
  PsiMapping mapping = PsiMapping::Process;
  double coefficient = 2.0;
  int q = 0;
};

/// 1 - ((2^q-1)/2^q)(1 - (2^q F_int - 1)/(2^q F_ref - 1)).
inline double interleaved_estimate(double F_ref, double F_int, int q) {
  const double d = dim_of(q);
  return 1.0 - (d - 1.0) / d * (1.0 - (d * F_int - 1.0) / (d * F_ref - 1.0));
}

/// Feasible psi_C in [0, 1] satisfying
///   |psi_int - psi_C psi_ref + (1 - psi_C)(1 - psi_ref)|
///       <= k sqrt(psi_C (1 - psi_C)) sqrt(psi_ref (1 - psi_ref)),
/// mapped back to fidelity bounds on the interleaved gate.
inline BoundResult interleaved_bounds(double F_ref, double F_int, int q, PsiMapping mapping, double coefficient = 2.0) {
  check_qubits(q);
  const double lo_phys = 1.0 / (dim_of(q) + 1.0);
  for (double F : {F_ref, F_int}) {
    if (!(F > lo_phys - 1e-12 && F <= 1.0 + 1e-12)) throw ConfigError("fidelities must lie in (1/(2^q+1), 1]");
  }
  if (coefficient < 0.0) throw ConfigError("bound coefficient must be non-negative");
  const double pr = psi_of(mapping, F_ref, q);
  const double pi = psi_of(mapping, F_int, q);
  auto slack = [&](double pc) {
    const double rad = std::sqrt(std::max(pc * (1.0 - pc), 0.0)) * std::sqrt(std::max(pr * (1.0 - pr), 0.0));
    return coefficient * rad - std::abs(pi - pc * pr + (1.0 - pc) * (1.0 - pr));
  };
  constexpr int kGrid = 100000;
  int first = -1, last = -1;
  for (int i = 0; i <= kGrid; ++i) {
    if (slack(static_cast<double>(i) / kGrid) >= 0.0) {
      if (first < 0) first = i;
      last = i;
    }
  }
  // The left side vanishes at one psi_C; when the right side is zero too
  // (psi_ref at 0 or 1) that point is the whole feasible set and can fall
  // between grid nodes.
  std::optional<double> root;
  if (std::abs(2.0 * pr - 1.0) > 1e-15) {
    const double r0 = (pi - 1.0 + pr) / (2.0 * pr - 1.0);
    if (r0 > -1e-12 && r0 < 1.0 + 1e-12) root = std::clamp(r0, 0.0, 1.0);
  }
  if (first < 0 && !root) throw ConfigError("inconsistent inputs: no interleaved-gate fidelity satisfies the bound");
  auto refine = [&](double feasible, double infeasible) {
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (feasible + infeasible);
      (slack(mid) >= 0.0 ? feasible : infeasible) = mid;
    }
    return feasible;
  };
  const double h = 1.0 / kGrid;
  double lo_psi = 0.0, hi_psi = 0.0;
  if (first < 0) {
    lo_psi = hi_psi = *root;
  } else {
    lo_psi = first == 0 ? 0.0 : refine(first * h, (first - 1) * h);
    hi_psi = last == kGrid ? 1.0 : refine(last * h, (last + 1) * h);
    if (root) {
      lo_psi = std::min(lo_psi, *root);
      hi_psi = std::max(hi_psi, *root);
    }
  }
  BoundResult r;
  r.F_ref = F_ref;
  r.F_int = F_int;
  r.mapping = mapping;
  r.coefficient = coefficient;
  r.q = q;
  const double a = fidelity_of_psi(mapping, lo_psi, q);
  const double b = fidelity_of_psi(mapping, hi_psi, q);
  r.lower = std::min(a, b);
  r.upper = std::max(a, b);
  r.F_est = interleaved_estimate(F_ref, F_int, q);
  r.F_est_feasible = r.F_est >= r.lower - 1e-12 && r.F_est <= r.upper + 1e-12;
  return r;
}

/// Smallest N with 2 exp(-2 N eps^2 / (b - a)^2) <= 1 - confidence.
inline long long hoeffding_sample_size(double epsilon, double confidence, double a, double b) {
  if (!(epsilon > 0.0) || !(confidence > 0.0 && confidence < 1.0) || !(a < b)) {
    throw ConfigError("hoeffding: need epsilon > 0, confidence in (0, 1), a < b");
  }
  const double n = (b - a) * (b - a) * std::log(2.0 / (1.0 - confidence)) / (2.0 * epsilon * epsilon);
  return static_cast<long long>(std::ceil(n - 1e-9));
}

/// The variant N >= ln(2/delta) (a - b)^2 / eps^2, with delta substituted
/// as given (the confidence level itself, not 1 - confidence).
inline long long hoeffding_sample_size_variant(double epsilon, double delta, double a, double b) {
  if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) || !(a < b)) {
    throw ConfigError("hoeffding: need epsilon > 0, delta in (0, 1), a < b");
  }
  const double n = std::log(2.0 / delta) * (a - b) * (a - b) / (epsilon * epsilon);
  return static_cast<long long>(std::ceil(n - 1e-9));
}

}  // namespace charb
