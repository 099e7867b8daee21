#include "steinshrink/loss.hpp"

#include <cmath>
#include <sstream>

namespace steinshrink {

LossTarget::LossTarget(SymMatrix sigma, double tol)
    : sigma_(std::move(sigma)), pinv_(pinv(sigma_, tol)) {}

LossTarget::LossTarget(SymMatrix sigma)
    : LossTarget(sigma, default_tolerance(sigma.dim())) {}

SpectralForm spectral_form(const EstimatorOutput& estimate, Index q, double tol) {
  if (estimate.spectral()) {
    if (estimate.spectral()->weights.size() != q) {
      std::ostringstream os;
      os << "estimate has rank " << estimate.spectral()->weights.size()
         << " but q=" << q;
      throw DimensionError(os.str());
    }
    return *estimate.spectral();
  }
  const EigenSystem top = truncate_to_rank(sym_eig(estimate.sigma_hat()), q, tol);
  return SpectralForm{1.0, top.vectors(), top.values()};
}

Matrix loss_surrogate(const SpectralForm& form, const LossTarget& target) {
  if (form.basis.rows() != target.dim()) {
    std::ostringstream os;
    os << "estimate dimension " << form.basis.rows() << " does not match Sigma dimension "
       << target.dim();
    throw DimensionError(os.str());
  }
  const Vector root = form.weights.cwiseSqrt();
  const Matrix g = form.basis.transpose() * target.sigma_pinv().matrix() * form.basis;
  Matrix m = form.scale * (root.asDiagonal() * g * root.asDiagonal());
  return 0.5 * (m + m.transpose());
}

namespace {

Vector positive_spectrum(const Matrix& m, Index q, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw DegenerateConfigurationError("stein_loss: surrogate eigensolver failed");
  }
  const Vector values = solver.eigenvalues().reverse();
  const double lmax = values.size() > 0 ? values[0] : 0.0;
  Index positive = 0;
  while (positive < values.size() && values[positive] > tol * lmax &&
         values[positive] > 0.0) {
    ++positive;
  }
  if (positive < q) {
    std::ostringstream os;
    os << "stein_loss: only " << positive << " of " << q
       << " eigenvalues of Sigma^+ Sigma_hat are positive; the estimate's range is "
          "numerically orthogonal to the range of Sigma";
    throw DegenerateConfigurationError(os.str());
  }
  return values.head(q);
}

}  // namespace

LossValue stein_loss(const EstimatorOutput& estimate, const LossTarget& target,
                     const Dimensions& dims, double tol) {
  const Index q = dims.q();
  const Matrix m = loss_surrogate(spectral_form(estimate, q, tol), target);
  const Vector lambda = positive_spectrum(m, q, tol);

  LossValue loss;
  loss.q = q;
  loss.trace_term = m.trace();
  loss.logdet_term = lambda.array().log().sum();
  loss.value = loss.trace_term - loss.logdet_term - static_cast<double>(q);
  return loss;
}

LossValue stein_loss(const EstimatorOutput& estimate, const SymMatrix& sigma,
                     const Dimensions& dims, double tol) {
  return stein_loss(estimate, LossTarget(sigma, tol), dims, tol);
}

LossValue stein_loss(const EstimatorOutput& estimate, const LossTarget& target,
                     const Dimensions& dims) {
  return stein_loss(estimate, target, dims, default_tolerance(target.dim()));
}

double logdet_factorization_check(const FactorizedEstimate& pieces,
                                  const LossTarget& target, double tol) {
  const Index q = pieces.eigenvalues.size();
  if (pieces.phi.size() != q || pieces.basis.cols() != q) {
    throw DimensionError("logdet_factorization_check: inconsistent piece sizes");
  }
  if ((pieces.phi.array() <= 0.0).any() || (pieces.eigenvalues.array() <= 0.0).any()) {
    throw DomainError("logdet_factorization_check: L and Phi must be positive");
  }

  SpectralForm form{pieces.scale, pieces.basis,
                    pieces.eigenvalues.cwiseProduct(pieces.phi)};
  const double lhs = positive_spectrum(loss_surrogate(form, target), q, tol)
                         .array()
                         .log()
                         .sum();

  const Vector root = pieces.eigenvalues.cwiseSqrt();
  const Matrix g = pieces.basis.transpose() * target.sigma_pinv().matrix() * pieces.basis;
  const Matrix inner = root.asDiagonal() * g * root.asDiagonal();
  Eigen::LLT<Matrix> chol(0.5 * (inner + inner.transpose()));
  if (chol.info() != Eigen::Success) {
    throw DegenerateConfigurationError(
        "logdet_factorization_check: L^{1/2} H^T Sigma^+ H L^{1/2} is singular");
  }
  const double inner_logdet =
      2.0 * chol.matrixLLT().diagonal().array().log().sum();
  const double rhs = static_cast<double>(q) * std::log(pieces.scale) + inner_logdet +
                     pieces.phi.array().log().sum();
  return std::abs(lhs - rhs);
}

}  // namespace steinshrink
