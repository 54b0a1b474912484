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
#include <vector>

#include <Eigen/Eigenvalues>

#include "charb/common.hpp"
#include "charb/pauli.hpp"

namespace charb {

/// Real 4^q x 4^q Pauli transfer matrix in the shared basis order.
class Ptm {
 public:
  Ptm() = default;
  Ptm(int q, RMatrix m) : q_(q), m_(std::move(m)) {
    check_qubits(q_);
    if (m_.rows() != ptm_dim_of(q_) || m_.cols() != ptm_dim_of(q_)) throw DimensionError("Ptm: wrong size");
  }

  static Ptm identity(int q) { return Ptm(q, RMatrix::Identity(ptm_dim_of(q), ptm_dim_of(q))); }

  int q() const { return q_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  const RMatrix& matrix() const { return m_; }

  Ptm transpose() const { return Ptm(q_, m_.transpose()); }
  double trace() const { return m_.trace(); }

  bool trace_preserving(double eps = tol::kAlgebraic) const {
    RVector row = RVector::Zero(dim());
    row(0) = 1.0;
    return (m_.row(0).transpose() - row).cwiseAbs().maxCoeff() <= eps;
  }

  bool unital(double eps = tol::kAlgebraic) const {
    RVector col = RVector::Zero(dim());
    col(0) = 1.0;
    return (m_.col(0) - col).cwiseAbs().maxCoeff() <= eps;
  }

  friend Ptm operator*(const Ptm& a, const Ptm& b) {
    if (a.q_ != b.q_) throw DimensionError("Ptm product: qubit counts differ");
    return Ptm(a.q_, a.m_ * b.m_);
  }

 private:
  int q_ = 0;
  RMatrix m_;
};

/// |rho>> in the normalized Pauli basis.
struct StateVec {
  int q = 0;
  RVector v;
};

/// <<Q| for a POVM element Q.
struct Effect {
  int q = 0;
  RVector v;
};

inline StateVec make_state(const HermitianMatrix& rho) {
  const Complex tr = rho.matrix().trace();
  if (std::abs(tr - 1.0) > tol::kPhysical) throw PhysicalityError("state does not have unit trace");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
  if (es.eigenvalues().minCoeff() < -tol::kPhysical) throw PhysicalityError("state is not positive semidefinite");
  return {rho.q(), vectorize(rho)};
}

inline StateVec pure_state(int q, const CVector& psi) {
  if (psi.size() != dim_of(q)) throw DimensionError("pure_state: wrong vector length");
  const CVector n = psi / psi.norm();
  return make_state(HermitianMatrix(q, n * n.adjoint()));
}

inline Effect make_effect(const HermitianMatrix& e) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(e.matrix());
  if (es.eigenvalues().minCoeff() < -tol::kPhysical || es.eigenvalues().maxCoeff() > 1.0 + tol::kPhysical) {
    throw PhysicalityError("effect is not between 0 and 1");
  }
  return {e.q(), vectorize(e)};
}

/// Effect of the identity operator, <<1|.
inline Effect unit_effect(int q) {
  Effect e{q, RVector::Zero(ptm_dim_of(q))};
  e.v(0) = std::sqrt(static_cast<double>(dim_of(q)));
  return e;
}

/// Maximally mixed state 1/2^q.
inline StateVec maximally_mixed(int q) {
  StateVec s{q, RVector::Zero(ptm_dim_of(q))};
  s.v(0) = 1.0 / std::sqrt(static_cast<double>(dim_of(q)));
  return s;
}

inline Ptm compose(const Ptm& a, const Ptm& b) { return a * b; }

inline StateVec apply(const Ptm& a, const StateVec& rho) {
  if (a.q() != rho.q) throw DimensionError("apply: qubit counts differ");
  return {rho.q, a.matrix() * rho.v};
}

/// <<Q|A|rho>> = tr(Q A(rho)).
inline double expectation(const Effect& e, const Ptm& a, const StateVec& rho) {
  if (a.q() != rho.q || a.q() != e.q) throw DimensionError("expectation: qubit counts differ");
  return e.v.dot(a.matrix() * rho.v);
}

inline double expectation(const Effect& e, const StateVec& rho) {
  if (e.q != rho.q) throw DimensionError("expectation: qubit counts differ");
  return e.v.dot(rho.v);
}

/// Entry (sigma, tau) = tr(sigma U tau U^dagger).
inline Ptm ptm_of_unitary(const CMatrix& u) {
  const auto d = u.rows();
  int q = 0;
  while ((1 << q) < d) ++q;
  if (u.cols() != d || (1 << q) != d) throw DimensionError("ptm_of_unitary: matrix must be 2^q square");
  check_qubits(q);
  if ((u.adjoint() * u - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol::kAlgebraic) {
    throw ConfigError("ptm_of_unitary: input is not unitary");
  }
  const auto basis = enumerate_basis(q);
  std::vector<CMatrix> conj;
  conj.reserve(basis.size());
  for (const auto& t : basis) conj.push_back(u * t.normalized_matrix() * u.adjoint());
  const int n = ptm_dim_of(q);
  RMatrix m(n, n);
  for (int s = 0; s < n; ++s) {
    const CMatrix sig = basis[s].normalized_matrix();
    for (int t = 0; t < n; ++t) m(s, t) = (sig * conj[t]).trace().real();
  }
  return Ptm(q, std::move(m));
}

/// diag(1, p, ..., p).
inline Ptm depolarizing(int q, double p) {
  check_qubits(q);
  const double lo = -1.0 / (ptm_dim_of(q) - 1);
  if (p < lo - tol::kAlgebraic || p > 1.0 + tol::kAlgebraic) {
    throw PhysicalityError("depolarizing: p outside the completely positive range");
  }
  RMatrix m = p * RMatrix::Identity(ptm_dim_of(q), ptm_dim_of(q));
  m(0, 0) = 1.0;
  return Ptm(q, std::move(m));
}

/// Average gate fidelity to the identity, (2^-q tr E + 1) / (2^q + 1).
inline double avg_fidelity(const Ptm& e) {
  const double d = dim_of(e.q());
  return (e.trace() / d + 1.0) / (d + 1.0);
}

inline Ptm tensor(const Ptm& a, const Ptm& b) {
  const RMatrix& x = a.matrix();
  const RMatrix& y = b.matrix();
  RMatrix m(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) m.block(r * y.rows(), c * y.cols(), y.rows(), y.cols()) = x(r, c) * y;
  return Ptm(a.q() + b.q(), std::move(m));
}

/// Choi matrix J = sum_{sigma,tau} R_{sigma,tau} sigma (x) tau^T, scaled by 2^-q
/// so that trace-preserving channels give a unit-trace state.
inline CMatrix choi_matrix(const Ptm& e) {
  const int q = e.q();
  const auto basis = enumerate_basis(q);
  std::vector<CMatrix> mats;
  for (const auto& p : basis) mats.push_back(p.normalized_matrix());
  const int d = dim_of(q);
  CMatrix j = CMatrix::Zero(d * d, d * d);
  for (std::size_t s = 0; s < basis.size(); ++s) {
    for (std::size_t t = 0; t < basis.size(); ++t) {
      const double r = e.matrix()(s, t);
      if (r == 0.0) continue;
      const CMatrix tt = mats[t].transpose();
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          const Complex sab = mats[s](a, b);
          if (sab == Complex(0.0)) continue;
          j.block(a * d, b * d, d, d) += r * sab * tt;
        }
    }
  }
  return j / static_cast<double>(d);
}

struct CptpReport {
  bool trace_preserving = false;
  bool unital = false;
  double choi_min_eigenvalue = 0.0;
  bool completely_positive() const { return choi_min_eigenvalue >= -tol::kPhysical; }
  bool cptp() const { return trace_preserving && completely_positive(); }
};

inline CptpReport cptp_check(const Ptm& e) {
  CptpReport r;
  r.trace_preserving = e.trace_preserving();
  r.unital = e.unital();
  const CMatrix j = choi_matrix(e);
  Eigen::SelfAdjointEigenSolver<CMatrix> es((j + j.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  r.choi_min_eigenvalue = es.eigenvalues().minCoeff();
  return r;
}

/// Standard gate unitaries.
namespace gates {

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) m.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return m;
}

inline CMatrix id(int q = 1) { return CMatrix::Identity(dim_of(q), dim_of(q)); }
inline CMatrix x() { return PauliString::parse("X").matrix(); }
inline CMatrix y() { return PauliString::parse("Y").matrix(); }
inline CMatrix z() { return PauliString::parse("Z").matrix(); }

inline CMatrix h() {
  CMatrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

inline CMatrix s() {
  using namespace std::complex_literals;
  CMatrix m(2, 2);
  m << 1, 0, 0, 1i;
  return m;
}

inline CMatrix t() {
  CMatrix m(2, 2);
  m << 1, 0, 0, std::polar(1.0, M_PI / 4);
  return m;
}

/// Single-qubit `u` acting on qubit k of q (qubit 0 is the leftmost factor).
inline CMatrix on_qubit(int q, int k, const CMatrix& u) {
  CMatrix m = CMatrix::Ones(1, 1);
  for (int i = 0; i < q; ++i) m = kron(m, i == k ? u : id(1));
  return m;
}

inline CMatrix cnot(int q, int control, int target) {
  const int d = dim_of(q);
  CMatrix m = CMatrix::Zero(d, d);
  for (int b = 0; b < d; ++b) {
    const int cbit = (b >> (q - 1 - control)) & 1;
    const int out = cbit ? b ^ (1 << (q - 1 - target)) : b;
    m(out, b) = 1.0;
  }
  return m;
}

/// Controlled-Z on two qubits, diag(1, 1, 1, -1).
inline CMatrix cphase() {
  CMatrix m = CMatrix::Identity(4, 4);
  m(3, 3) = -1.0;
  return m;
}

}  // namespace gates

}  // namespace charb
