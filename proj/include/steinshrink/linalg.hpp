#pragma once

// Dense symmetric-matrix primitives.
//
// All eigen-quantities are returned in non-increasing order. Numerical rank
// is decided relative to the largest eigenvalue: an eigenvalue counts as
// nonzero when it exceeds tol * lambda_max.

#include <Eigen/Dense>

#include "steinshrink/errors.hpp"

namespace steinshrink {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative tolerance used for the symmetry check of SymMatrix.
inline constexpr double kSymmetryTolerance = 1e-12;

/// dim * machine epsilon.
double default_tolerance(Index dim);

/// A square real matrix that is symmetric to kSymmetryTolerance.
class SymMatrix {
 public:
  SymMatrix() = default;

  /// Validates symmetry; throws NotSymmetricError naming the worst pair.
  explicit SymMatrix(Matrix m);

  /// Averages m with its transpose. For results known to be symmetric up to
  /// rounding (products like U D U^T).
  static SymMatrix symmetrized(const Matrix& m);

  static SymMatrix identity(Index dim);
  static SymMatrix zero(Index dim);
  static SymMatrix diagonal(const Vector& d);

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }

  SymMatrix scaled(double c) const;

 private:
  struct Trusted {};
  SymMatrix(Matrix m, Trusted) : m_(std::move(m)) {}

  Matrix m_;
};

/// Complete eigendecomposition A = V diag(values) V^T, values descending.
struct FullEigen {
  Matrix vectors;
  Vector values;
};

/// Rank-q part of a PSD matrix: p x q semi-orthogonal basis and q strictly
/// positive eigenvalues, descending.
class EigenSystem {
 public:
  /// Checks shapes, positivity and ordering of `values`. Orthogonality of
  /// `vectors` is the caller's contract.
  EigenSystem(Matrix vectors, Vector values);

  const Matrix& vectors() const noexcept { return vectors_; }
  const Vector& values() const noexcept { return values_; }
  Index dim() const noexcept { return vectors_.rows(); }
  Index rank() const noexcept { return values_.size(); }

  /// H diag(values) H^T.
  SymMatrix reconstruct() const;

 private:
  Matrix vectors_;
  Vector values_;
};

FullEigen sym_eig(const SymMatrix& a);

/// Number of eigenvalues above tol * lambda_max (0 for the zero matrix).
Index numerical_rank(const FullEigen& eig, double tol);

/// Keeps the top q eigenpairs. Throws RankDeficiencyError carrying the
/// observed numerical rank when fewer than q values clear the threshold.
EigenSystem truncate_to_rank(const FullEigen& eig, Index q, double tol);

/// Moore-Penrose inverse of a symmetric PSD matrix. Eigenvalues at or below
/// tol * lambda_max are treated as zero; a spectrum dipping below
/// -tol * lambda_max is rejected with DomainError.
SymMatrix pinv(const SymMatrix& a, double tol);
SymMatrix pinv(const SymMatrix& a);

/// Sum of the logs of the q largest eigenvalues.
double posdet_log(const SymMatrix& a, Index q, double tol);

/// ||A - B||_F / max(||B||_F, tiny).
double relative_frobenius(const Matrix& a, const Matrix& b);

}  // namespace steinshrink
