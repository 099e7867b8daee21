#include "steinshrink/linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace steinshrink {

double default_tolerance(Index dim) {
  return static_cast<double>(dim) * std::numeric_limits<double>::epsilon();
}

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    std::ostringstream os;
    os << "SymMatrix: matrix is " << m_.rows() << "x" << m_.cols()
       << ", expected square";
    throw DimensionError(os.str());
  }
  double worst = 0.0;
  Index wi = -1, wj = -1;
  for (Index j = 0; j < m_.cols(); ++j) {
    for (Index i = j + 1; i < m_.rows(); ++i) {
      const double diff = std::abs(m_(i, j) - m_(j, i));
      double excess = diff / (1.0 + std::abs(m_(i, j)));
      if (std::isnan(excess)) excess = std::numeric_limits<double>::infinity();
      if (excess > worst) {
        worst = excess;
        wi = i;
        wj = j;
      }
    }
  }
  if (worst > kSymmetryTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "SymMatrix: not symmetric, worst pair (" << wi << "," << wj
       << ")=" << m_(wi, wj) << " vs (" << wj << "," << wi
       << ")=" << m_(wj, wi);
    throw NotSymmetricError(os.str(), static_cast<long>(wi),
                            static_cast<long>(wj));
  }
}

SymMatrix SymMatrix::symmetrized(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("SymMatrix::symmetrized: matrix is not square");
  }
  Matrix s = 0.5 * (m + m.transpose());
  return SymMatrix(std::move(s), Trusted{});
}

SymMatrix SymMatrix::identity(Index dim) {
  return SymMatrix(Matrix::Identity(dim, dim), Trusted{});
}

SymMatrix SymMatrix::zero(Index dim) {
  return SymMatrix(Matrix::Zero(dim, dim), Trusted{});
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
  return SymMatrix(Matrix(d.asDiagonal()), Trusted{});
}

SymMatrix SymMatrix::scaled(double c) const { return SymMatrix(c * m_, Trusted{}); }

EigenSystem::EigenSystem(Matrix vectors, Vector values)
    : vectors_(std::move(vectors)), values_(std::move(values)) {
  if (vectors_.cols() != values_.size()) {
    std::ostringstream os;
    os << "EigenSystem: " << vectors_.cols() << " vectors but "
       << values_.size() << " values";
    throw DimensionError(os.str());
  }
  if (vectors_.cols() > vectors_.rows()) {
    throw DimensionError("EigenSystem: more vectors than the ambient dimension");
  }
  for (Index i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0)) {
      std::ostringstream os;
      os << "EigenSystem: eigenvalue " << i << " = " << values_[i]
         << " is not positive";
      throw DomainError(os.str());
    }
    if (i > 0 && values_[i] > values_[i - 1]) {
      throw DomainError("EigenSystem: eigenvalues are not in descending order");
    }
  }
}

SymMatrix EigenSystem::reconstruct() const {
  return SymMatrix::symmetrized(vectors_ * values_.asDiagonal() *
                                vectors_.transpose());
}

FullEigen sym_eig(const SymMatrix& a) {
  const Index n = a.dim();
  FullEigen out;
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw DomainError("sym_eig: eigensolver did not converge");
  }
  // Eigen returns ascending order.
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

Index numerical_rank(const FullEigen& eig, double tol) {
  if (eig.values.size() == 0) return 0;
  const double lmax = eig.values[0];
  if (!(lmax > 0.0)) return 0;
  const double threshold = tol * lmax;
  Index rank = 0;
  while (rank < eig.values.size() && eig.values[rank] > threshold) ++rank;
  return rank;
}

EigenSystem truncate_to_rank(const FullEigen& eig, Index q, double tol) {
  const Index dim = eig.values.size();
  if (q < 1 || q > dim) {
    std::ostringstream os;
    os << "truncate_to_rank: requested rank " << q << " outside [1, " << dim << "]";
    throw DimensionError(os.str());
  }
  const Index observed = numerical_rank(eig, tol);
  if (observed < q) {
    std::ostringstream os;
    os << "truncate_to_rank: requested rank " << q << " but numerical rank is "
       << observed << " (tol " << tol << ")";
    throw RankDeficiencyError(os.str(), static_cast<long>(observed));
  }
  return EigenSystem(eig.vectors.leftCols(q), eig.values.head(q));
}

SymMatrix pinv(const SymMatrix& a, double tol) {
  const Index n = a.dim();
  if (n == 0) return a;
  const FullEigen eig = sym_eig(a);
  const double lmax = eig.values[0];
  const double lmin = eig.values[n - 1];
  const double scale = std::max(std::abs(lmax), std::abs(lmin));
  if (lmin < -tol * scale || (lmax <= 0.0 && lmin < 0.0)) {
    std::ostringstream os;
    os << "pinv: matrix is not positive semi-definite (smallest eigenvalue "
       << lmin << ", largest " << lmax << ")";
    throw DomainError(os.str());
  }
  const Index rank = numerical_rank(eig, tol);
  const Matrix u = eig.vectors.leftCols(rank);
  const Vector inv = eig.values.head(rank).cwiseInverse();
  return SymMatrix::symmetrized(u * inv.asDiagonal() * u.transpose());
}

SymMatrix pinv(const SymMatrix& a) { return pinv(a, default_tolerance(a.dim())); }

double posdet_log(const SymMatrix& a, Index q, double tol) {
  const FullEigen eig = sym_eig(a);
  const EigenSystem top = truncate_to_rank(eig, q, tol);
  return top.values().array().log().sum();
}

double relative_frobenius(const Matrix& a, const Matrix& b) {
  const double denom = std::max(b.norm(), std::numeric_limits<double>::min());
  return (a - b).norm() / denom;
}

}  // namespace steinshrink
