#pragma once

// Stein-type loss for possibly singular Sigma and Sigma_hat:
//
//   L(Sigma_hat, Sigma) = tr(Sigma^+ Sigma_hat) - ln|Lambda(Sigma^+ Sigma_hat)| - q
//
// where Lambda collects the q positive eigenvalues of Sigma^+ Sigma_hat. For
// Sigma_hat = a H D H^T those eigenvalues coincide with the spectrum of the
// symmetric q x q matrix a D^{1/2} H^T Sigma^+ H D^{1/2}, which is what we
// decompose.

#include "steinshrink/estimators.hpp"
#include "steinshrink/linalg.hpp"
#include "steinshrink/model.hpp"

namespace steinshrink {

struct LossValue {
  double value = 0.0;
  double trace_term = 0.0;
  double logdet_term = 0.0;
  Index q = 0;
};

/// Sigma together with its pseudo-inverse, computed once per experiment.
class LossTarget {
 public:
  LossTarget(SymMatrix sigma, double tol);
  explicit LossTarget(SymMatrix sigma);

  const SymMatrix& sigma() const noexcept { return sigma_; }
  const SymMatrix& sigma_pinv() const noexcept { return pinv_; }
  Index dim() const noexcept { return sigma_.dim(); }

 private:
  SymMatrix sigma_;
  SymMatrix pinv_;
};

/// Spectral form of an estimate: the stored one, or the top-q eigenpairs of
/// its matrix when it was built as a plain matrix.
SpectralForm spectral_form(const EstimatorOutput& estimate, Index q, double tol);

/// The q x q matrix a D^{1/2} H^T Sigma^+ H D^{1/2}.
Matrix loss_surrogate(const SpectralForm& form, const LossTarget& target);

/// Throws DegenerateConfigurationError when the surrogate has fewer than q
/// eigenvalues above tol * lambda_max.
LossValue stein_loss(const EstimatorOutput& estimate, const LossTarget& target,
                     const Dimensions& dims, double tol);
LossValue stein_loss(const EstimatorOutput& estimate, const SymMatrix& sigma,
                     const Dimensions& dims, double tol);
LossValue stein_loss(const EstimatorOutput& estimate, const LossTarget& target,
                     const Dimensions& dims);

/// Pieces of a_o H L Phi(L) H^T kept separate.
struct FactorizedEstimate {
  double scale = 1.0;
  Matrix basis;
  Vector eigenvalues;
  Vector phi;
};

/// |logdet_term - (q ln a + ln|L^{1/2} H^T Sigma^+ H L^{1/2}| + ln|Phi|)|.
/// The inner determinant goes through a Cholesky factorization, independent of
/// the eigen route used by stein_loss. A non-positive-definite inner matrix
/// raises DegenerateConfigurationError.
double logdet_factorization_check(const FactorizedEstimate& pieces,
                                  const LossTarget& target, double tol);

}  // namespace steinshrink
