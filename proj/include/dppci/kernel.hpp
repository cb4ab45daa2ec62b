// Copyright 2026 The dppci Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "dppci/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace dppci {

/// Relative asymmetry max|M_ij - M_ji| / max|M_ij| (0 for the zero matrix).
template <typename Derived>
double symmetry_residual(const Eigen::MatrixBase<Derived>& m) {
  const double scale = static_cast<double>(max_abs(m));
  if (scale == 0.0) return 0.0;
  return static_cast<double>(max_abs(m - m.transpose())) / scale;
}

/// Dense real symmetric matrix. Stored form is exactly symmetric.
template <typename Scalar = double>
class SymMatrix {
 public:
  using Matrix = MatrixX<Scalar>;

  SymMatrix() = default;

  /// Validates squareness, finiteness and symmetry within `symmetry_tol`
  /// (relative), then stores (M + M^T) / 2.
  template <typename Derived>
  static SymMatrix from(const Eigen::MatrixBase<Derived>& m,
                        double symmetry_tol = Tolerances{}.symmetry) {
    if (m.rows() != m.cols()) {
      throw Error(ErrorKind::NotSquare, "matrix is " + std::to_string(m.rows()) +
                                            "x" + std::to_string(m.cols()));
    }
    if (!m.allFinite()) throw Error(ErrorKind::NonFinite, "matrix has non-finite entries");
    const double asym = symmetry_residual(m);
    if (asym > symmetry_tol) {
      std::ostringstream os;
      os << "relative asymmetry " << asym << " exceeds " << symmetry_tol;
      throw Error(ErrorKind::Asymmetric, os.str());
    }
    return symmetrized(m);
  }

  /// For results that are symmetric up to roundoff by construction.
  template <typename Derived>
  static SymMatrix symmetrized(const Eigen::MatrixBase<Derived>& m) {
    SymMatrix out;
    out.m_ = (m + m.transpose()) / Scalar(2);
    return out;
  }

  static SymMatrix identity(int n) {
    return symmetrized(Matrix::Identity(n, n));
  }

  int n() const noexcept { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }
  Scalar operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix m_;
};

using SymMatrixd = SymMatrix<double>;

/// Ascending eigenvalues.
template <typename Scalar>
VectorX<Scalar> eigenvalues(const SymMatrix<Scalar>& m) {
  if (m.n() == 0) return VectorX<Scalar>();
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(m.matrix(),
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "eigen-solver did not converge");
  }
  return solver.eigenvalues();
}

template <typename Scalar> class MarginalKernel;
template <typename Scalar> class EnsembleKernel;

template <typename Scalar>
MarginalKernel<Scalar> validate_marginal(const SymMatrix<Scalar>& m,
                                         double eps_spec = Tolerances{}.spectrum);
template <typename Scalar>
EnsembleKernel<Scalar> validate_ensemble(const SymMatrix<Scalar>& m,
                                         double eps_spec = Tolerances{}.spectrum);

/// Marginal kernel K with spectrum strictly inside (0, 1).
template <typename Scalar = double>
class MarginalKernel {
 public:
  using Matrix = MatrixX<Scalar>;

  const SymMatrix<Scalar>& sym() const noexcept { return m_; }
  const Matrix& matrix() const noexcept { return m_.matrix(); }
  int n() const noexcept { return m_.n(); }

 private:
  explicit MarginalKernel(SymMatrix<Scalar> m) : m_(std::move(m)) {}
  friend MarginalKernel validate_marginal<>(const SymMatrix<Scalar>&, double);
  SymMatrix<Scalar> m_;
};

/// L-ensemble kernel, strictly positive definite.
template <typename Scalar = double>
class EnsembleKernel {
 public:
  using Matrix = MatrixX<Scalar>;

  const SymMatrix<Scalar>& sym() const noexcept { return m_; }
  const Matrix& matrix() const noexcept { return m_.matrix(); }
  int n() const noexcept { return m_.n(); }

 private:
  explicit EnsembleKernel(SymMatrix<Scalar> m) : m_(std::move(m)) {}
  friend EnsembleKernel validate_ensemble<>(const SymMatrix<Scalar>&, double);
  SymMatrix<Scalar> m_;
};

using MarginalKerneld = MarginalKernel<double>;
using EnsembleKerneld = EnsembleKernel<double>;

namespace detail {

/// Positions of the members of `s` inside the sorted superset `rest`.
inline IndexSet positions_in(const IndexSet& rest, const IndexSet& s) {
  std::vector<int> pos;
  for (int i : s) {
    pos.push_back(static_cast<int>(std::lower_bound(rest.begin(), rest.end(), i) -
                                   rest.begin()));
  }
  return IndexSet::from_zero_based(std::move(pos));
}

template <typename Scalar>
[[noreturn]] void spectrum_error(const char* what, Scalar value, double eps) {
  std::ostringstream os;
  os.precision(17);
  os << what << ": eigenvalue " << static_cast<double>(value)
     << " violates the bound (eps " << eps << ")";
  throw Error(ErrorKind::SpectrumOutOfRange, os.str());
}

/// Inverse of a symmetric positive definite matrix via Cholesky.
template <typename Derived>
MatrixX<typename Derived::Scalar> spd_inverse(const Eigen::MatrixBase<Derived>& m,
                                              const char* what) {
  using Scalar = typename Derived::Scalar;
  Eigen::LLT<MatrixX<Scalar>> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure,
                std::string(what) + ": matrix is not numerically positive definite");
  }
  return llt.solve(MatrixX<Scalar>::Identity(m.rows(), m.cols()));
}

}  // namespace detail

template <typename Scalar>
MarginalKernel<Scalar> validate_marginal(const SymMatrix<Scalar>& m, double eps_spec) {
  const VectorX<Scalar> ev = eigenvalues(m);
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (!(ev(k) > eps_spec && ev(k) < 1.0 - eps_spec)) {
      detail::spectrum_error("marginal kernel must satisfy 0 < K < I", ev(k), eps_spec);
    }
  }
  return MarginalKernel<Scalar>(m);
}

template <typename Scalar>
EnsembleKernel<Scalar> validate_ensemble(const SymMatrix<Scalar>& m, double eps_spec) {
  const VectorX<Scalar> ev = eigenvalues(m);
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (!(ev(k) > eps_spec)) {
      detail::spectrum_error("ensemble kernel must satisfy L > 0", ev(k), eps_spec);
    }
  }
  return EnsembleKernel<Scalar>(m);
}

/// K = I - (L + I)^{-1}.
template <typename Scalar>
MarginalKernel<Scalar> k_from_l(const EnsembleKernel<Scalar>& l,
                                double eps_spec = Tolerances{}.spectrum) {
  const auto n = l.n();
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(n, n);
  const MatrixX<Scalar> inv = detail::spd_inverse(l.matrix() + id, "L + I");
  return validate_marginal(SymMatrix<Scalar>::symmetrized(id - inv), eps_spec);
}

/// L = (I - K)^{-1} - I.
template <typename Scalar>
EnsembleKernel<Scalar> l_from_k(const MarginalKernel<Scalar>& k,
                                double eps_spec = Tolerances{}.spectrum) {
  const auto n = k.n();
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(n, n);
  const MatrixX<Scalar> inv = detail::spd_inverse(id - k.matrix(), "I - K");
  return validate_ensemble(SymMatrix<Scalar>::symmetrized(inv - id), eps_spec);
}

/// Kernel I - K of the complementary process.
template <typename Scalar>
MarginalKernel<Scalar> complement_marginal(const MarginalKernel<Scalar>& k,
                                           double eps_spec = Tolerances{}.spectrum) {
  const auto n = k.n();
  return validate_marginal(
      SymMatrix<Scalar>::symmetrized(MatrixX<Scalar>::Identity(n, n) - k.matrix()),
      eps_spec);
}

/// Ensemble kernel K^{-1} - I of the complementary process.
template <typename Scalar>
EnsembleKernel<Scalar> dual_ensemble(const MarginalKernel<Scalar>& k,
                                     double eps_spec = Tolerances{}.spectrum) {
  const auto n = k.n();
  const MatrixX<Scalar> inv = detail::spd_inverse(k.matrix(), "K");
  return validate_ensemble(
      SymMatrix<Scalar>::symmetrized(inv - MatrixX<Scalar>::Identity(n, n)), eps_spec);
}

/// Rectangular block [M_ij] for i in rows, j in cols, in sorted index order.
template <typename Derived>
MatrixX<typename Derived::Scalar> block(const Eigen::MatrixBase<Derived>& m,
                                        const IndexSet& rows, const IndexSet& cols) {
  rows.check_within(static_cast<int>(m.rows()));
  cols.check_within(static_cast<int>(m.cols()));
  return m(rows.members(), cols.members());
}

template <typename Scalar>
MatrixX<Scalar> block(const SymMatrix<Scalar>& m, const IndexSet& rows,
                      const IndexSet& cols) {
  return block(m.matrix(), rows, cols);
}

/// Principal submatrix M_A; the empty set yields the 0x0 matrix.
template <typename Scalar>
SymMatrix<Scalar> submatrix(const SymMatrix<Scalar>& m, const IndexSet& a) {
  return SymMatrix<Scalar>::symmetrized(block(m.matrix(), a, a));
}

/// Throws SingularConditioningBlock when min|eig(M_C)| < eps * max|eig(M_C)|.
template <typename Scalar>
void require_conditionable(const SymMatrix<Scalar>& block_c, double eps_spec) {
  if (block_c.n() == 0) return;
  const VectorX<Scalar> ev = eigenvalues(block_c);
  const Scalar lo = ev.cwiseAbs().minCoeff();
  const Scalar hi = ev.cwiseAbs().maxCoeff();
  if (!(hi > 0) || lo < eps_spec * hi) {
    std::ostringstream os;
    os << "conditioning block is numerically singular (det estimate "
       << static_cast<double>(ev.prod()) << ", eigenvalue ratio "
       << static_cast<double>(hi > 0 ? lo / hi : Scalar(0)) << ")";
    throw Error(ErrorKind::SingularConditioningBlock, os.str());
  }
}

/// Schur complement M^C = M_{C^c} - M_{C^c,C} M_C^{-1} M_{C,C^c}, indexed by
/// C^c in sorted order. M^{empty} = M.
template <typename Scalar>
SymMatrix<Scalar> schur_complement(const SymMatrix<Scalar>& m, const IndexSet& c,
                                   double eps_spec = Tolerances{}.spectrum) {
  c.check_within(m.n());
  if (c.empty()) return m;
  const IndexSet rest = c.complement(m.n());
  const SymMatrix<Scalar> mc = submatrix(m, c);
  require_conditionable(mc, eps_spec);
  const MatrixX<Scalar> cross = block(m, c, rest);
  const MatrixX<Scalar> solved = Eigen::LDLT<MatrixX<Scalar>>(mc.matrix()).solve(cross);
  return SymMatrix<Scalar>::symmetrized(block(m, rest, rest) -
                                        cross.transpose() * solved);
}

template <typename Scalar>
Scalar determinant(const SymMatrix<Scalar>& m) {
  return determinant(m.matrix());
}

}  // namespace dppci
