#pragma once

// Monte Carlo risk estimation under Stein loss.
//
// Replication k draws its data from RandomStream(master_seed, k), and every
// estimator of a run is evaluated on that same X (common random numbers).
// Losses are stored by replication index and reduced in index order, so a
// run is bit-identical for any worker count.

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "steinshrink/estimators.hpp"
#include "steinshrink/model.hpp"
#include "steinshrink/report.hpp"

namespace steinshrink {

inline constexpr const char* kThreadsEnvVar = "STEIN_SHRINK_THREADS";

struct ExperimentConfig {
  CovarianceSpec spec;
  Index n = 1;
  std::vector<double> alphas{1.0};
  Index replications = 1000;
  std::uint64_t master_seed = 42;
  /// Relative eigenvalue threshold; 0 selects p * machine epsilon.
  double tol = 0.0;
  /// Haff constant; unset selects b_o.
  std::optional<double> b;

  /// Throws DimensionError / ParameterError.
  void validate() const;
  Dimensions dims() const { return Dimensions(spec.p, n, spec.r); }
  double tolerance() const;
  /// b if set, otherwise b_o. ParameterError when b_o = 0 (q = 1) and b unset.
  double resolved_b() const;
};

struct OptimalEstimator {};
struct NaturalEstimator {
  double a = 1.0;
};
struct HaffEstimator {
  double alpha = 1.0;
  /// Unset: the config's resolved_b().
  std::optional<double> b;
};
using EstimatorKind = std::variant<OptimalEstimator, NaturalEstimator, HaffEstimator>;

struct RiskEstimate {
  double mean_loss = 0.0;
  double std_error = 0.0;
  Index replications = 0;
  /// Per-replication losses, in replication order.
  std::vector<double> losses;
  /// FNV-1a digest of the data matrix of each replication.
  std::vector<std::uint64_t> data_digests;
};

/// Mean and sample-SD / sqrt(N) of the losses.
RiskEstimate summarize(std::vector<double> losses, std::vector<std::uint64_t> digests);

struct RunOptions {
  /// 0: STEIN_SHRINK_THREADS if set, else hardware concurrency.
  unsigned workers = 0;
};

unsigned resolve_workers(const RunOptions& options);

/// One RiskEstimate per estimator, all on shared data. A failing replication
/// raises ReplicationError with the lowest failing index.
std::vector<RiskEstimate> estimate_risks(const ExperimentConfig& config,
                                         std::span<const EstimatorKind> estimators,
                                         const RunOptions& options = {});

RiskEstimate estimate_risk(const ExperimentConfig& config, const EstimatorKind& estimator,
                           const RunOptions& options = {});

struct PrialValue {
  double prial_percent = 0.0;
  double se_percent = 0.0;
};

/// 100 (ref - alt) / ref. The standard error uses the delta method on the
/// paired losses when both estimates carry matching per-replication data;
/// otherwise the two means are treated as independent.
PrialValue prial(const RiskEstimate& ref, const RiskEstimate& alt);

struct PairedDifference {
  double mean = 0.0;
  double std_error = 0.0;
};

/// mean(alt_k - ref_k) and its standard error. Throws ParameterError unless
/// the two estimates were computed on the same data.
PairedDifference paired_difference(const RiskEstimate& ref, const RiskEstimate& alt);

/// Optimal estimator plus one Haff estimator per alpha, for every config.
PrialReport run_table(std::span<const ExperimentConfig> configs,
                      const RunOptions& options = {});

/// The 2 x 10 settings of the reference table, alphas 1..5, b = b_o.
std::vector<ExperimentConfig> table1_preset(Index replications, std::uint64_t seed);

}  // namespace steinshrink
