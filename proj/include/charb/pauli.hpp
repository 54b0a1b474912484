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

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "charb/common.hpp"

namespace charb {

/// Phase-free q-qubit Pauli label. Letters are stored as 0=I, 1=X, 2=Y, 3=Z and
/// qubit 0 is the most significant digit of the basis index, so the basis
/// order is lexicographic with I < X < Y < Z.
class PauliString {
 public:
  PauliString() = default;

  PauliString(int q, std::vector<std::uint8_t> letters) : q_(q), letters_(std::move(letters)) {
    check_qubits(q_);
    if (static_cast<int>(letters_.size()) != q_) throw DimensionError("PauliString: letter count != q");
    for (auto l : letters_) {
      if (l > 3) throw ConfigError("PauliString: letter out of range");
    }
  }

  static PauliString identity(int q) { return PauliString(q, std::vector<std::uint8_t>(q, 0)); }

  static PauliString from_index(int q, int index) {
    check_qubits(q);
    if (index < 0 || index >= ptm_dim_of(q)) throw ConfigError("PauliString: index out of range");
    std::vector<std::uint8_t> letters(q);
    for (int k = q - 1; k >= 0; --k) {
      letters[k] = static_cast<std::uint8_t>(index & 3);
      index >>= 2;
    }
    return PauliString(q, std::move(letters));
  }

  /// Parses "ZZ", "IX", ... ; '1' and '_' are accepted for the identity.
  static PauliString parse(std::string_view text) {
    std::vector<std::uint8_t> letters;
    for (char c : text) {
      switch (c) {
        case 'I': case 'i': case '1': case '_': letters.push_back(0); break;
        case 'X': case 'x': letters.push_back(1); break;
        case 'Y': case 'y': letters.push_back(2); break;
        case 'Z': case 'z': letters.push_back(3); break;
        default: throw ConfigError("PauliString: bad letter in '" + std::string(text) + "'");
      }
    }
    const int q = static_cast<int>(letters.size());
    return PauliString(q, std::move(letters));
  }

  int q() const { return q_; }
  const std::vector<std::uint8_t>& letters() const { return letters_; }

  int index() const {
    int idx = 0;
    for (auto l : letters_) idx = idx * 4 + l;
    return idx;
  }

  bool is_identity() const {
    for (auto l : letters_) {
      if (l != 0) return false;
    }
    return true;
  }

  /// All letters in {I, Z}.
  bool is_zi() const {
    for (auto l : letters_) {
      if (l != 0 && l != 3) return false;
    }
    return true;
  }

  std::string to_string() const {
    static constexpr std::array<char, 4> kNames{'I', 'X', 'Y', 'Z'};
    std::string s;
    for (auto l : letters_) s.push_back(kNames[l]);
    return s;
  }

  /// Unnormalized 2^q x 2^q matrix P_1 (x) ... (x) P_q.
  CMatrix matrix() const {
    CMatrix m = CMatrix::Ones(1, 1);
    for (auto l : letters_) {
      const CMatrix f = single(l);
      CMatrix next(m.rows() * 2, m.cols() * 2);
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = m(r, c) * f;
      m = std::move(next);
    }
    return m;
  }

  /// Basis element with unit Hilbert-Schmidt norm, P / sqrt(2^q).
  CMatrix normalized_matrix() const { return matrix() / std::sqrt(static_cast<double>(dim_of(q_))); }

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.q_ == b.q_ && a.letters_ == b.letters_;
  }

 private:
  static CMatrix single(std::uint8_t l) {
    using namespace std::complex_literals;
    CMatrix m(2, 2);
    switch (l) {
      case 0: m << 1, 0, 0, 1; break;
      case 1: m << 0, 1, 1, 0; break;
      case 2: m << 0, -1i, 1i, 0; break;
      default: m << 1, 0, 0, -1; break;
    }
    return m;
  }

  int q_ = 0;
  std::vector<std::uint8_t> letters_;
};

/// 0 if the two strings commute, 1 if they anticommute.
inline int commutation_bit(const PauliString& a, const PauliString& b) {
  if (a.q() != b.q()) throw DimensionError("commutation_bit: qubit counts differ");
  int count = 0;
  for (int k = 0; k < a.q(); ++k) {
    const auto x = a.letters()[k];
    const auto y = b.letters()[k];
    if (x != 0 && y != 0 && x != y) ++count;
  }
  return count & 1;
}

inline std::vector<PauliString> enumerate_basis(int q) {
  check_qubits(q);
  std::vector<PauliString> basis;
  basis.reserve(ptm_dim_of(q));
  for (int i = 0; i < ptm_dim_of(q); ++i) basis.push_back(PauliString::from_index(q, i));
  return basis;
}

/// Complex 2^q x 2^q matrix validated as Hermitian on construction.
class HermitianMatrix {
 public:
  HermitianMatrix(int q, CMatrix entries) : q_(q), m_(std::move(entries)) {
    check_qubits(q_);
    if (m_.rows() != dim_of(q_) || m_.cols() != dim_of(q_)) throw DimensionError("HermitianMatrix: wrong size");
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol::kHermitian) {
      throw ConfigError("HermitianMatrix: input is not Hermitian");
    }
  }

  int q() const { return q_; }
  const CMatrix& matrix() const { return m_; }

 private:
  int q_;
  CMatrix m_;
};

/// Coefficients tr(A sigma^dagger) in the normalized Pauli basis.
inline RVector vectorize(const HermitianMatrix& a) {
  const int q = a.q();
  RVector v(ptm_dim_of(q));
  for (const auto& p : enumerate_basis(q)) {
    v(p.index()) = (a.matrix() * p.normalized_matrix().adjoint()).trace().real();
  }
  return v;
}

inline HermitianMatrix devectorize(int q, const RVector& v) {
  check_qubits(q);
  if (v.size() != ptm_dim_of(q)) throw DimensionError("devectorize: wrong vector length");
  CMatrix m = CMatrix::Zero(dim_of(q), dim_of(q));
  for (const auto& p : enumerate_basis(q)) m += v(p.index()) * p.normalized_matrix();
  // Round-off from the complex Y entries leaves the result Hermitian to ~1e-16.
  return HermitianMatrix(q, (m + m.adjoint()) / 2.0);
}

}  // namespace charb
