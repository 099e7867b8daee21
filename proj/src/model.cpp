#include "steinshrink/model.hpp"

#include <cmath>
#include <sstream>

namespace steinshrink {

std::string_view to_string(Structure s) {
  switch (s) {
    case Structure::identity:
      return "identity";
    case Structure::ar:
      return "ar";
  }
  return "unknown";
}

Structure parse_structure(std::string_view text) {
  if (text == "identity" || text == "i") return Structure::identity;
  if (text == "ar" || text == "ii") return Structure::ar;
  throw ParameterError("unknown covariance structure '" + std::string(text) +
                       "' (expected identity or ar)");
}

void CovarianceSpec::validate() const {
  if (p < 1 || r < 1) {
    throw DimensionError("covariance spec: p and r must be positive");
  }
  if (r > p) {
    std::ostringstream os;
    os << "covariance spec: rank r=" << r << " exceeds dimension p=" << p;
    throw DimensionError(os.str());
  }
  if (structure == Structure::ar && !(rho > 0.0 && rho < 1.0)) {
    std::ostringstream os;
    os << "covariance spec: ar structure needs 0 < rho < 1, got " << rho;
    throw ParameterError(os.str());
  }
}

Dimensions::Dimensions(Index p, Index n, Index r) : p_(p), n_(n), r_(r) {
  if (p < 1 || n < 1 || r < 1) {
    std::ostringstream os;
    os << "dimensions must be positive (p=" << p << ", n=" << n << ", r=" << r << ")";
    throw DimensionError(os.str());
  }
  if (r > p) {
    std::ostringstream os;
    os << "rank r=" << r << " exceeds dimension p=" << p;
    throw DimensionError(os.str());
  }
}

SymMatrix build_sigma(const CovarianceSpec& spec) {
  spec.validate();
  const Index p = spec.p;
  const Index r = spec.r;
  if (spec.structure == Structure::identity) {
    Vector d = Vector::Zero(p);
    d.head(r).setOnes();
    return SymMatrix::diagonal(d);
  }

  Matrix full(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      full(i, j) = std::pow(spec.rho, static_cast<double>(std::abs(i - j)));
    }
  }
  if (r == p) return SymMatrix::symmetrized(full);

  const FullEigen eig = sym_eig(SymMatrix::symmetrized(full));
  const Matrix u = eig.vectors.leftCols(r);
  return SymMatrix::symmetrized(u * eig.values.head(r).asDiagonal() * u.transpose());
}

FactorMatrix factorize(const SymMatrix& sigma, Index r, double tol) {
  const FullEigen eig = sym_eig(sigma);
  const Index observed = numerical_rank(eig, tol);
  if (observed != r) {
    std::ostringstream os;
    os << "factorize: expected numerical rank " << r << ", observed " << observed;
    throw RankDeficiencyError(os.str(), static_cast<long>(observed));
  }
  Matrix b = eig.vectors.leftCols(r) * eig.values.head(r).cwiseSqrt().asDiagonal();
  return FactorMatrix(std::move(b));
}

FactorMatrix factorize(const SymMatrix& sigma, Index r) {
  return factorize(sigma, r, default_tolerance(sigma.dim()));
}

Matrix sample_data(const FactorMatrix& b, Index n, RandomStream& stream) {
  if (n < 1) throw DimensionError("sample_data: n must be positive");
  Matrix z(b.r(), n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < b.r(); ++i) z(i, j) = stream.normal();
  }
  return b.matrix() * z;
}

SymMatrix sample_cov(const Matrix& x) {
  Matrix s = Matrix::Zero(x.rows(), x.rows());
  s.selfadjointView<Eigen::Lower>().rankUpdate(x);
  Matrix full = s.selfadjointView<Eigen::Lower>();
  return SymMatrix(std::move(full));
}

}  // namespace steinshrink
