/**
 * Copyright 2026 The heraldswap Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "heraldswap/errors.hpp"

namespace heraldswap {

using cplx = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;
using Vector4 = Eigen::Vector4cd;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;
/// Eigenvalues below this are treated as exact zeros in entropies.
inline constexpr double kEigenvalueFloor = 1e-14;

/// Named positions of the memory basis {|1,1>, |1,0>, |0,1>, |0,0>}.
/// The first label is memory A, the second memory B; |1> is the excited level.
namespace basis {
inline constexpr int k11 = 0;
inline constexpr int k10 = 1;
inline constexpr int k01 = 2;
inline constexpr int k00 = 3;
}  // namespace basis

enum class Party { A, B };

enum class BellState { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

inline const char* to_string(BellState s) {
  switch (s) {
    case BellState::PsiPlus: return "psi+";
    case BellState::PsiMinus: return "psi-";
    case BellState::PhiPlus: return "phi+";
    case BellState::PhiMinus: return "phi-";
  }
  return "?";
}

/// Psi+- = (|1,0> +- |0,1>)/sqrt2, Phi+- = (|1,1> +- |0,0>)/sqrt2.
inline Vector4 bell_vector(BellState s) {
  const double r = 1.0 / std::sqrt(2.0);
  Vector4 v = Vector4::Zero();
  switch (s) {
    case BellState::PsiPlus: v[basis::k10] = r; v[basis::k01] = r; break;
    case BellState::PsiMinus: v[basis::k10] = r; v[basis::k01] = -r; break;
    case BellState::PhiPlus: v[basis::k11] = r; v[basis::k00] = r; break;
    case BellState::PhiMinus: v[basis::k11] = r; v[basis::k00] = -r; break;
  }
  return v;
}

/// Columns are the Bell vectors in the order Psi+, Psi-, Phi+, Phi-.
inline Matrix4 bell_basis_unitary() {
  Matrix4 u;
  u.col(0) = bell_vector(BellState::PsiPlus);
  u.col(1) = bell_vector(BellState::PsiMinus);
  u.col(2) = bell_vector(BellState::PhiPlus);
  u.col(3) = bell_vector(BellState::PhiMinus);
  return u;
}

namespace detail {

template <class Derived>
double max_antihermitian(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <class Derived>
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixBase<Derived>& m) {
  using Plain = typename Derived::PlainObject;
  const Plain h = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Plain> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

}  // namespace detail

/// Throws InvalidState unless `m` is a density matrix within the global tolerances.
template <class Derived>
void validate_density(const Eigen::MatrixBase<Derived>& m, const char* what = "state") {
  if (m.rows() != m.cols()) throw InvalidState(std::string(what) + ": matrix is not square");
  if (!m.allFinite()) throw InvalidState(std::string(what) + ": non-finite entries");
  const double herm = detail::max_antihermitian(m);
  if (herm > kHermitianTolerance) {
    std::ostringstream os;
    os << what << ": not Hermitian (max |M - M^dag| = " << herm << ")";
    throw InvalidState(os.str());
  }
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > kTraceTolerance) {
    std::ostringstream os;
    os << what << ": trace " << tr << " != 1";
    throw InvalidState(os.str());
  }
  const double lmin = detail::hermitian_eigenvalues(m).minCoeff();
  if (lmin < -kPsdTolerance) {
    std::ostringstream os;
    os << what << ": negative eigenvalue " << lmin;
    throw InvalidState(os.str());
  }
}

template <class Derived>
bool is_density(const Eigen::MatrixBase<Derived>& m) {
  try {
    validate_density(m);
    return true;
  } catch (const InvalidState&) {
    return false;
  }
}

/// A two-memory density operator in the fixed basis {|1,1>, |1,0>, |0,1>, |0,0>}.
/// Construction validates; instances are immutable.
class TwoQubitState {
 public:
  explicit TwoQubitState(const Matrix4& m) : m_(m) { validate_density(m_, "TwoQubitState"); }

  /// Divides by the trace before validating. Throws NoHerald on a zero trace.
  static TwoQubitState from_unnormalized(const Matrix4& m) {
    const double tr = m.trace().real();
    if (!(tr > 0.0)) throw NoHerald("unnormalized state has zero weight");
    Matrix4 n = m / tr;
    n = (n + n.adjoint()).eval() / 2.0;
    return TwoQubitState(n);
  }

  static TwoQubitState pure(const Vector4& psi) {
    const Vector4 v = psi / psi.norm();
    return TwoQubitState(v * v.adjoint());
  }

  static TwoQubitState bell(BellState s) { return pure(bell_vector(s)); }

  static TwoQubitState maximally_mixed() { return TwoQubitState(Matrix4::Identity() / 4.0); }

  const Matrix4& matrix() const { return m_; }
  cplx operator()(int row, int col) const { return m_(row, col); }

 private:
  Matrix4 m_;
};

/// Weights of a Bell-diagonal state over (Psi+, Psi-, Phi+, Phi-).
struct BellDiagonalVec {
  double psi_plus = 0.0;
  double psi_minus = 0.0;
  double phi_plus = 0.0;
  double phi_minus = 0.0;

  double sum() const { return psi_plus + psi_minus + phi_plus + phi_minus; }

  BellDiagonalVec normalized() const {
    const double s = sum();
    if (!(s > 0.0)) throw InvalidState("Bell-diagonal vector has zero weight");
    return {psi_plus / s, psi_minus / s, phi_plus / s, phi_minus / s};
  }

  std::array<double, 4> as_array() const { return {psi_plus, psi_minus, phi_plus, phi_minus}; }

  void validate() const {
    for (double w : as_array()) {
      if (!(w >= -kTraceTolerance && w <= 1.0 + kTraceTolerance))
        throw InvalidState("Bell-diagonal weight outside [0,1]");
    }
    if (std::abs(sum() - 1.0) > kTraceTolerance) throw InvalidState("Bell-diagonal weights do not sum to 1");
  }

  TwoQubitState to_state() const {
    validate();
    const auto w = as_array();
    const Matrix4 u = bell_basis_unitary();
    Matrix4 d = Matrix4::Zero();
    for (int i = 0; i < 4; ++i) d(i, i) = w[static_cast<std::size_t>(i)];
    return TwoQubitState(u * d * u.adjoint());
  }
};

/// -sum l log2 l over the eigenvalues. Works for any square density matrix.
template <class Derived>
double von_neumann_entropy(const Eigen::MatrixBase<Derived>& m) {
  validate_density(m, "entropy input");
  const Eigen::VectorXd ev = detail::hermitian_eigenvalues(m);
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double l = ev[i];
    if (l > kEigenvalueFloor) s -= l * std::log2(l);
  }
  return std::max(s, 0.0);
}

inline double von_neumann_entropy(const TwoQubitState& s) { return von_neumann_entropy(s.matrix()); }

/// Reduced state of the kept memory, in the basis {|1>, |0>}.
inline Matrix2 partial_trace(const TwoQubitState& state, Party keep) {
  const Matrix4& m = state.matrix();
  Matrix2 r = Matrix2::Zero();
  // index = 2 * (A is |0>) + (B is |0>)
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        if (keep == Party::A) {
          r(i, j) += m(2 * i + k, 2 * j + k);
        } else {
          r(i, j) += m(2 * k + i, 2 * k + j);
        }
      }
    }
  }
  return r;
}

/// Transposes the indices of one party. Entangled two-qubit states, and only
/// those, acquire a negative eigenvalue.
inline Matrix4 partial_transpose(const TwoQubitState& state, Party party) {
  const Matrix4& m = state.matrix();
  Matrix4 r;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          if (party == Party::A)
            r(2 * a + b, 2 * c + d) = m(2 * c + b, 2 * a + d);
          else
            r(2 * a + b, 2 * c + d) = m(2 * a + d, 2 * c + b);
        }
  return r;
}

/// Matrix elements in the (Psi+, Psi-, Phi+, Phi-) basis.
inline Matrix4 to_bell_basis(const TwoQubitState& state) {
  const Matrix4 u = bell_basis_unitary();
  return u.adjoint() * state.matrix() * u;
}

inline TwoQubitState from_bell_basis(const Matrix4& bell_matrix) {
  const Matrix4 u = bell_basis_unitary();
  Matrix4 m = u * bell_matrix * u.adjoint();
  m = (m + m.adjoint()).eval() / 2.0;
  return TwoQubitState(m);
}

/// Diagonal of the Bell-basis matrix, renormalized. Drops any Bell-basis coherences.
inline BellDiagonalVec bell_diagonal_projection(const TwoQubitState& state) {
  const Matrix4 b = to_bell_basis(state);
  BellDiagonalVec v{std::max(b(0, 0).real(), 0.0), std::max(b(1, 1).real(), 0.0),
                    std::max(b(2, 2).real(), 0.0), std::max(b(3, 3).real(), 0.0)};
  return v.normalized();
}

/// Largest absolute Bell-basis off-diagonal element; zero for Bell-diagonal states.
inline double bell_offdiagonal_norm(const TwoQubitState& state) {
  Matrix4 b = to_bell_basis(state);
  b.diagonal().setZero();
  return b.cwiseAbs().maxCoeff();
}

/// Applies a local unitary on each memory: (ua (x) ub) rho (ua (x) ub)^dag.
inline TwoQubitState apply_local(const TwoQubitState& state, const Matrix2& ua, const Matrix2& ub) {
  Matrix4 u;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) u(2 * i + k, 2 * j + l) = ua(i, j) * ub(k, l);
  Matrix4 m = u * state.matrix() * u.adjoint();
  m = (m + m.adjoint()).eval() / 2.0;
  return TwoQubitState(m);
}

/// Maximum elementwise modulus of the difference.
inline double max_abs_diff(const Matrix4& a, const Matrix4& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace heraldswap
