#pragma once

// Rank-r Gaussian model X = B Z with Sigma = B B^T and S = X X^T.

#include <algorithm>
#include <string>
#include <string_view>

#include "steinshrink/linalg.hpp"
#include "steinshrink/random.hpp"

namespace steinshrink {

enum class Structure { identity, ar };

std::string_view to_string(Structure s);
/// Accepts "identity"/"i" and "ar"/"ii"; throws ParameterError otherwise.
Structure parse_structure(std::string_view text);

/// Recipe for a rank-r population covariance.
struct CovarianceSpec {
  Structure structure = Structure::identity;
  double rho = 0.9;  // only read for Structure::ar
  Index p = 1;
  Index r = 1;

  /// Throws DimensionError when r > p or a size is nonpositive, ParameterError
  /// for rho outside (0, 1) with the ar structure.
  void validate() const;
};

/// Problem sizes; q = min(n, r) is the rank of S, m = max(n, r).
class Dimensions {
 public:
  Dimensions(Index p, Index n, Index r);

  Index p() const noexcept { return p_; }
  Index n() const noexcept { return n_; }
  Index r() const noexcept { return r_; }
  Index q() const noexcept { return std::min(n_, r_); }
  Index m() const noexcept { return std::max(n_, r_); }

 private:
  Index p_;
  Index n_;
  Index r_;
};

/// p x r matrix B with B B^T = Sigma.
class FactorMatrix {
 public:
  explicit FactorMatrix(Matrix b) : b_(std::move(b)) {}
  const Matrix& matrix() const noexcept { return b_; }
  Index p() const noexcept { return b_.rows(); }
  Index r() const noexcept { return b_.cols(); }

 private:
  Matrix b_;
};

/// identity: diag(1_r, 0_{p-r}). ar: rho^|i-j| with its p-r smallest
/// eigenvalues set to zero.
SymMatrix build_sigma(const CovarianceSpec& spec);

/// B = U_r Lambda_r^{1/2} from the top-r eigenpairs. Throws RankDeficiencyError
/// when the numerical rank of sigma differs from r.
FactorMatrix factorize(const SymMatrix& sigma, Index r, double tol);
FactorMatrix factorize(const SymMatrix& sigma, Index r);

/// X = B Z, Z an r x n matrix of i.i.d. N(0,1) drawn column by column.
Matrix sample_data(const FactorMatrix& b, Index n, RandomStream& stream);

/// S = X X^T, unnormalized.
SymMatrix sample_cov(const Matrix& x);

}  // namespace steinshrink
