#include "steinshrink/estimators.hpp"

#include <cmath>
#include <sstream>

namespace steinshrink {

void ShrinkageRule::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    std::ostringstream os;
    os << "shrinkage rule: alpha must be positive, got " << alpha;
    throw ParameterError(os.str());
  }
  if (!(b > 0.0) || !std::isfinite(b)) {
    std::ostringstream os;
    os << "shrinkage rule: b must be positive, got " << b;
    throw ParameterError(os.str());
  }
}

EstimatorOutput::EstimatorOutput(SymMatrix sigma_hat, Index rank)
    : sigma_hat_(std::move(sigma_hat)), rank_(rank) {}

EstimatorOutput::EstimatorOutput(SpectralForm form)
    : sigma_hat_(SymMatrix::symmetrized(form.scale * form.basis *
                                        form.weights.asDiagonal() *
                                        form.basis.transpose())),
      rank_(form.weights.size()),
      spectral_(std::move(form)) {}

double optimal_constant(const Dimensions& dims) {
  return 1.0 / static_cast<double>(dims.m());
}

DominanceBound dominance_bound(const Dimensions& dims) {
  const auto q = static_cast<double>(dims.q());
  const auto m = static_cast<double>(dims.m());
  DominanceBound bound;
  bound.value = 2.0 * (q - 1.0) / (m - q + 1.0);
  bound.improvement_guaranteed = dims.q() >= 2;
  return bound;
}

EstimatorOutput natural_estimate(const SymMatrix& s, double a) {
  if (!(a > 0.0)) {
    std::ostringstream os;
    os << "natural_estimate: scale must be positive, got " << a;
    throw ParameterError(os.str());
  }
  const Index rank = numerical_rank(sym_eig(s), default_tolerance(s.dim()));
  return EstimatorOutput(s.scaled(a), rank);
}

Vector psi_haff(const Vector& eigenvalues, const ShrinkageRule& rule) {
  rule.validate();
  const Index q = eigenvalues.size();
  if (q == 0) throw DimensionError("psi_haff: empty eigenvalue vector");
  for (Index i = 0; i < q; ++i) {
    if (!(eigenvalues[i] > 0.0)) {
      std::ostringstream os;
      os << "psi_haff: eigenvalue " << i << " = " << eigenvalues[i]
         << " is not positive";
      throw DomainError(os.str());
    }
  }
  // l_i^{-alpha} relative to the smallest eigenvalue keeps every weight in
  // (0, 1] whatever alpha and the spread of L.
  const double lmin = eigenvalues.minCoeff();
  Vector w(q);
  for (Index i = 0; i < q; ++i) {
    w[i] = std::exp(-rule.alpha * std::log(eigenvalues[i] / lmin));
  }
  return (rule.b / w.sum()) * w;
}

EstimatorOutput oi_estimate(const EigenSystem& eig, const Vector& psi, double a) {
  if (psi.size() != eig.rank()) {
    std::ostringstream os;
    os << "oi_estimate: psi has " << psi.size() << " entries for rank "
       << eig.rank();
    throw DimensionError(os.str());
  }
  if (!(a > 0.0)) throw ParameterError("oi_estimate: scale must be positive");
  SpectralForm form;
  form.scale = a;
  form.basis = eig.vectors();
  form.weights = eig.values().cwiseProduct((Vector::Ones(psi.size()) + psi));
  return EstimatorOutput(std::move(form));
}

EstimatorOutput optimal_estimate(const EigenSystem& eig, const Dimensions& dims) {
  return oi_estimate(eig, Vector::Zero(eig.rank()), optimal_constant(dims));
}

EstimatorOutput haff_estimate(const EigenSystem& eig, const Dimensions& dims,
                              const ShrinkageRule& rule) {
  if (eig.rank() != dims.q()) {
    std::ostringstream os;
    os << "haff_estimate: eigensystem rank " << eig.rank() << " but q=" << dims.q();
    throw DimensionError(os.str());
  }
  return oi_estimate(eig, psi_haff(eig.values(), rule), optimal_constant(dims));
}

EstimatorOutput haff_estimate(const SymMatrix& s, const Dimensions& dims,
                              const ShrinkageRule& rule, double tol) {
  if (s.dim() != dims.p()) {
    std::ostringstream os;
    os << "haff_estimate: S is " << s.dim() << "x" << s.dim() << " but p=" << dims.p();
    throw DimensionError(os.str());
  }
  rule.validate();
  return haff_estimate(truncate_to_rank(sym_eig(s), dims.q(), tol), dims, rule);
}

EstimatorOutput haff_estimate(const SymMatrix& s, const Dimensions& dims,
                              const ShrinkageRule& rule) {
  return haff_estimate(s, dims, rule, default_tolerance(s.dim()));
}

}  // namespace steinshrink
