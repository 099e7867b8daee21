#pragma once

// Covariance estimators built from S = H L H^T:
//
//   natural      a S
//   optimal      a_o S,                        a_o = 1 / max(n, r)
//   invariant    a (S + H L Psi(L) H^T)
//   Haff-type    Psi(L) = b L^{-alpha} / tr(L^{-alpha})
//
// Every estimator of the invariant class keeps the eigenbasis of S and only
// rescales its q positive eigenvalues, so it is carried in spectral form.

#include <optional>

#include "steinshrink/linalg.hpp"
#include "steinshrink/model.hpp"

namespace steinshrink {

/// Parameters of the Haff-type correction.
struct ShrinkageRule {
  double alpha = 1.0;
  double b = 0.0;

  /// Throws ParameterError unless alpha > 0 and b > 0.
  void validate() const;
};

/// scale * basis * diag(weights) * basis^T with a p x q semi-orthogonal basis.
struct SpectralForm {
  double scale = 1.0;
  Matrix basis;
  Vector weights;
};

class EstimatorOutput {
 public:
  /// Plain matrix estimate of known rank.
  EstimatorOutput(SymMatrix sigma_hat, Index rank);

  /// Materializes the spectral form.
  explicit EstimatorOutput(SpectralForm form);

  const SymMatrix& sigma_hat() const noexcept { return sigma_hat_; }
  Index rank() const noexcept { return rank_; }
  const std::optional<SpectralForm>& spectral() const noexcept { return spectral_; }

 private:
  SymMatrix sigma_hat_;
  Index rank_;
  std::optional<SpectralForm> spectral_;
};

struct DominanceBound {
  double value = 0.0;
  /// False when q = 1: the bound is zero and no improvement is certified.
  bool improvement_guaranteed = false;
};

/// 1 / max(n, r).
double optimal_constant(const Dimensions& dims);

/// b_o = 2(q-1) / (m-q+1).
DominanceBound dominance_bound(const Dimensions& dims);

/// a S. Rank is the numerical rank of S at the default tolerance.
EstimatorOutput natural_estimate(const SymMatrix& s, double a);

/// psi_i = b l_i^{-alpha} / sum_j l_j^{-alpha}. Throws DomainError on a
/// nonpositive eigenvalue.
Vector psi_haff(const Vector& eigenvalues, const ShrinkageRule& rule);

/// a H diag(L (1 + psi)) H^T.
EstimatorOutput oi_estimate(const EigenSystem& eig, const Vector& psi, double a);

/// a_o S restricted to its rank-q eigenspace.
EstimatorOutput optimal_estimate(const EigenSystem& eig, const Dimensions& dims);

/// Haff-type estimate with a = a_o from an already truncated eigensystem.
EstimatorOutput haff_estimate(const EigenSystem& eig, const Dimensions& dims,
                              const ShrinkageRule& rule);

/// Decomposes S, keeps its top q = min(n, r) eigenpairs and applies the
/// Haff-type rule. Propagates RankDeficiencyError.
EstimatorOutput haff_estimate(const SymMatrix& s, const Dimensions& dims,
                              const ShrinkageRule& rule, double tol);
EstimatorOutput haff_estimate(const SymMatrix& s, const Dimensions& dims,
                              const ShrinkageRule& rule);

}  // namespace steinshrink
