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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "charb/common.hpp"
#include "charb/experiment.hpp"

namespace charb {

/// One simulated datum: the weighted outcome of one (sequence, G-hat, shot).
/// Exact-mode records carry the expectation in place of a bit and shot = -1.
struct RawRecord {
  int m = 0;
  int seq_index = 0;
  std::string ghat_label;
  int shot = -1;
  double weight = 1.0;
  double value = 0.0;
};

struct DecayPoint {
  int m = 0;
  double k_mean = 0.0;
  double std_error = 0.0;
  int n_samples = 0;
};

struct DecayCurve {
  std::vector<DecayPoint> points;
  std::optional<ExperimentSpec> spec;

  std::vector<double> ms() const {
    std::vector<double> v;
    for (const auto& p : points) v.push_back(p.m);
    return v;
  }
};

namespace detail {

inline std::pair<double, double> mean_stderr(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace detail

/// Two-stage mean: records are averaged within each sequence, then across
/// sequences with standard error stdev/sqrt(n_sequences). With a single
/// sequence the records themselves are the samples.
inline DecayCurve aggregate(const std::vector<RawRecord>& raw) {
  std::map<int, std::map<int, std::vector<double>>> by_m;
  for (const auto& r : raw) by_m[r.m][r.seq_index].push_back(r.value);
  DecayCurve curve;
  for (const auto& [m, seqs] : by_m) {
    std::vector<double> samples;
    if (seqs.size() == 1) {
      samples = seqs.begin()->second;
    } else {
      for (const auto& [s, values] : seqs) samples.push_back(detail::mean_stderr(values).first);
    }
    if (samples.empty()) throw ConfigError("aggregate: empty group at m = " + std::to_string(m));
    const auto [mean, se] = detail::mean_stderr(samples);
    curve.points.push_back({m, mean, se, static_cast<int>(samples.size())});
  }
  return curve;
}

}  // namespace charb
