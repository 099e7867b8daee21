#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace steinshrink {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input matrix failed the symmetry check.
class NotSymmetricError : public Error {
 public:
  NotSymmetricError(const std::string& what, long row, long col)
      : Error(what), row_(row), col_(col) {}
  long row() const noexcept { return row_; }
  long col() const noexcept { return col_; }

 private:
  long row_;
  long col_;
};

/// Fewer eigenvalues above the numerical threshold than the requested rank.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& what, long observed_rank)
      : Error(what), observed_rank_(observed_rank) {}
  long observed_rank() const noexcept { return observed_rank_; }

 private:
  long observed_rank_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Value outside the mathematical domain of an operation (nonpositive
/// eigenvalue, indefinite matrix, tied eigenvalues in a quotient).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The estimate's column space is (numerically) too far from the range of
/// the target covariance to produce q positive eigenvalues.
class DegenerateConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A Monte Carlo replication failed; carries its index.
class ReplicationError : public Error {
 public:
  ReplicationError(const std::string& what, std::size_t replication)
      : Error(what), replication_(replication) {}
  std::size_t replication() const noexcept { return replication_; }

 private:
  std::size_t replication_;
};

}  // namespace steinshrink
