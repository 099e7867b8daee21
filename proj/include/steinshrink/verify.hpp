#pragma once

// Numerical checks of the inequalities behind the dominance result for the
// Haff-type estimator. Each check evaluates one inequality on a concrete
// eigenvalue vector; none of them involves an expectation.

#include <cstdint>
#include <vector>

#include "steinshrink/estimators.hpp"
#include "steinshrink/linalg.hpp"
#include "steinshrink/model.hpp"

namespace steinshrink {

inline constexpr double kMajorizationSlack = 1e-10;
inline constexpr double kTraceSubmultSlack = 1e-12;
inline constexpr double kLogBoundSlack = 1e-10;

struct ProofDiagnostics {
  bool majorization_ok = false;
  bool trace_submult_ok = false;
  double log_bound_gap = 0.0;
  double risk_diff_bound = 0.0;
};

/// For i = 1..q: sum_{j>i} (l_i phi_i - l_j phi_j) / (l_i - l_j) with
/// phi = 1 + psi_haff(L). L must be strictly descending (DomainError on ties).
Vector majorization_sums(const Vector& eigenvalues, const ShrinkageRule& rule);

/// Entry i (0-based) is true when the i-th sum is at most q-(i+1), up to
/// kMajorizationSlack.
std::vector<bool> check_majorization(const Vector& eigenvalues, const ShrinkageRule& rule);

/// tr(L^{-2 alpha}) <= tr(L^{-alpha})^2, relative slack kTraceSubmultSlack.
bool check_trace_submult(const Vector& eigenvalues, double alpha);

/// ln|I + Psi(L)| - 2b/(2+b).
double check_log_bound(const Vector& eigenvalues, const ShrinkageRule& rule);

/// b (a_o (m-q+1) - 2/(2+b)); nonpositive exactly for 0 < b <= b_o.
double risk_diff_upper_bound(const Dimensions& dims, double b);

ProofDiagnostics diagnose(const Vector& eigenvalues, const ShrinkageRule& rule,
                          const Dimensions& dims);

/// Randomized sweep over eigenvalue vectors of length q.
struct ProofTrialConfig {
  Index p = 2;
  Index n = 2;
  Index r = 2;
  std::vector<double> alphas{1.0};
  /// Empty: b_o and one uniform draw in (0, b_o]; {1} when q = 1.
  std::vector<double> bs;
  Index trials = 100;
  std::uint64_t seed = 0;
};

struct ProofTrial {
  Index trial = 0;
  double alpha = 0.0;
  double b = 0.0;
  /// Inside the domain where the inequalities are claimed: alpha >= 1 and
  /// 0 < b <= b_o (any b > 0 when q = 1, where majorization is vacuous).
  bool asserted = false;
  bool passed = false;
  ProofDiagnostics diagnostics;
};

/// Log-normal eigenvalues sorted descending, drawn from stream (seed, trial).
Vector random_spectrum(Index q, std::uint64_t seed, std::uint64_t trial);

std::vector<ProofTrial> run_proof_trials(const ProofTrialConfig& config);

}  // namespace steinshrink
