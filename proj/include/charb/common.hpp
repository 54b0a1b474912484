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

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace charb {

using Complex = std::complex<double>;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Tolerances shared by every module.
namespace tol {
inline constexpr double kAlgebraic = 1e-10;   // identity checks between exact quantities
inline constexpr double kPhysical = 1e-9;     // CP / probability windows
inline constexpr double kHermitian = 1e-12;
inline constexpr double kKeyScale = 1e9;      // canonical rounding of group elements
}  // namespace tol

inline constexpr int kMaxQubits = 3;

/// Base of every error thrown by the library. `exit_code()` follows the CLI
/// convention: 2 for configuration problems, 3 for numerical/physicality ones.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual int exit_code() const { return 3; }
};

/// Invalid argument, unknown name, malformed configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 2; }
};

class DimensionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A state, effect or channel violates a physical constraint.
class PhysicalityError : public Error {
 public:
  using Error::Error;
};

/// Iterative method failed to converge, closure too large, etc.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class MultiplicityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

inline int dim_of(int q) { return 1 << q; }
inline int ptm_dim_of(int q) { return 1 << (2 * q); }

inline void check_qubits(int q) {
  if (q < 1 || q > kMaxQubits) {
    throw ConfigError("qubit count must be in [1, 3], got " + std::to_string(q));
  }
}

}  // namespace charb
