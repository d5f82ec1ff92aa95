#pragma once

#include <Eigen/Dense>

#include <stdexcept>

// Dense matrix builders shared by the multiplier and interconnection layers.
// All functions are pure and allocate their result.

namespace ozf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Upper nilpotent Jordan block J of size nu (ones on the superdiagonal).
template <typename Scalar = double>
DenseMatrix<Scalar> jordan_shift(Eigen::Index nu) {
  DenseMatrix<Scalar> J = DenseMatrix<Scalar>::Zero(nu, nu);
  for (Eigen::Index i = 0; i + 1 < nu; ++i) J(i, i + 1) = Scalar(1);
  return J;
}

/// Kronecker product A (x) B. Handles 0-sized operands.
template <typename DerivedA, typename DerivedB>
DenseMatrix<typename DerivedA::Scalar> kron(const Eigen::MatrixBase<DerivedA>& A,
                                            const Eigen::MatrixBase<DerivedB>& B) {
  using Scalar = typename DerivedA::Scalar;
  DenseMatrix<Scalar> out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

/// A (x) I_d without forming the identity.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> kron_identity(const Eigen::MatrixBase<Derived>& A,
                                                    Eigen::Index d) {
  using Scalar = typename Derived::Scalar;
  DenseMatrix<Scalar> out = DenseMatrix<Scalar>::Zero(A.rows() * d, A.cols() * d);
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      for (Eigen::Index k = 0; k < d; ++k) out(i * d + k, j * d + k) = A(i, j);
  return out;
}

/// diag(rho^0, rho^-1, ..., rho^-(h-1)).
template <typename Scalar = double>
DenseMatrix<Scalar> exp_weight_matrix(Scalar rho, Eigen::Index h) {
  if (!(rho > Scalar(0))) throw std::invalid_argument("exp_weight_matrix: rho must be positive");
  DenseMatrix<Scalar> F = DenseMatrix<Scalar>::Zero(h, h);
  Scalar w = Scalar(1);
  for (Eigen::Index k = 0; k < h; ++k, w /= rho) F(k, k) = w;
  return F;
}

inline Matrix symmetrized(const Matrix& A) { return 0.5 * (A + A.transpose()); }

inline double min_eigenvalue(const Matrix& S) {
  if (S.rows() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<Matrix>(symmetrized(S), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

inline double max_eigenvalue(const Matrix& S) {
  if (S.rows() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<Matrix>(symmetrized(S), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

}  // namespace ozf
