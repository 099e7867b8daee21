#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "steinshrink/bench.hpp"

namespace steinshrink {
namespace {

ExperimentConfig small_config(Index reps = 200) {
  ExperimentConfig c;
  c.spec = CovarianceSpec{Structure::ar, 0.9, 12, 8};
  c.n = 6;
  c.alphas = {1.0, 2.0};
  c.replications = reps;
  c.master_seed = 7;
  return c;
}

RiskEstimate from_losses(std::vector<double> losses) {
  std::vector<std::uint64_t> digests(losses.size());
  for (std::size_t i = 0; i < digests.size(); ++i) digests[i] = i;
  return summarize(std::move(losses), std::move(digests));
}

TEST(EstimateRisk, OptimalEstimatorHasPositiveRisk) {
  const RiskEstimate r = estimate_risk(small_config(), OptimalEstimator{});
  EXPECT_GT(r.mean_loss, 0.0);
  EXPECT_GT(r.std_error, 0.0);
  EXPECT_EQ(r.replications, 200);
  for (double x : r.losses) EXPECT_GE(x, -1e-10);
}

TEST(EstimateRisk, BitIdenticalAcrossRunsAndWorkerCounts) {
  const std::vector<EstimatorKind> kinds{OptimalEstimator{}, HaffEstimator{3.0, {}}};
  const auto a = estimate_risks(small_config(), kinds, RunOptions{1});
  const auto b = estimate_risks(small_config(), kinds, RunOptions{1});
  const auto c = estimate_risks(small_config(), kinds, RunOptions{5});
  for (std::size_t e = 0; e < kinds.size(); ++e) {
    EXPECT_EQ(a[e].losses, b[e].losses);
    EXPECT_EQ(a[e].losses, c[e].losses);
    EXPECT_EQ(a[e].mean_loss, c[e].mean_loss);
    EXPECT_EQ(a[e].std_error, c[e].std_error);
    EXPECT_EQ(a[e].data_digests, c[e].data_digests);
  }
}

TEST(EstimateRisk, ScalarChiSquareCase) {
  // p = r = n = 1 and a = 1: the loss is x - ln x - 1 with x ~ chi^2_1, whose
  // mean is gamma + ln 2 since E[ln x] = -gamma - ln 2.
  constexpr double kExact = std::numbers::egamma + std::numbers::ln2;

  std::mt19937_64 gen(12345);
  std::chi_squared_distribution<double> chi(1.0);
  const int draws = 1000000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double x = chi(gen);
    sum += x - std::log(x) - 1.0;
  }
  const double oracle = sum / draws;
  EXPECT_NEAR(oracle, 1.2703628454614782, 0.01);
  EXPECT_NEAR(oracle, kExact, 0.01);

  ExperimentConfig c;
  c.spec = CovarianceSpec{Structure::identity, 0.9, 1, 1};
  c.n = 1;
  c.replications = 20000;
  c.master_seed = 99;
  const RiskEstimate r = estimate_risk(c, NaturalEstimator{1.0});
  EXPECT_LT(std::abs(r.mean_loss - oracle), 4.0 * r.std_error + 0.005);
}

TEST(EstimateRisk, CommonRandomNumbersAcrossSeparateCalls) {
  const RiskEstimate opt = estimate_risk(small_config(50), OptimalEstimator{});
  const RiskEstimate haff = estimate_risk(small_config(50), HaffEstimator{2.0, {}});
  const RiskEstimate nat = estimate_risk(small_config(50), NaturalEstimator{0.5});
  EXPECT_EQ(opt.data_digests, haff.data_digests);
  EXPECT_EQ(opt.data_digests, nat.data_digests);
  // Distinct replications draw distinct data.
  EXPECT_NE(opt.data_digests[0], opt.data_digests[1]);
}

TEST(EstimateRisk, OptimalMatchesNaturalAtOptimalConstant) {
  const ExperimentConfig c = small_config(30);
  const std::vector<EstimatorKind> kinds{OptimalEstimator{},
                                         NaturalEstimator{optimal_constant(c.dims())}};
  const auto r = estimate_risks(c, kinds);
  EXPECT_EQ(r[0].losses, r[1].losses);
}

TEST(EstimateRisk, FailingReplicationReportsLowestIndex) {
  // A large rank threshold rejects samples whose eigenvalue ratio is small.
  ExperimentConfig c;
  c.spec = CovarianceSpec{Structure::identity, 0.9, 2, 2};
  c.n = 3;
  c.replications = 400;
  c.tol = 0.3;
  std::size_t first = 0;
  try {
    (void)estimate_risk(c, OptimalEstimator{}, RunOptions{1});
    FAIL() << "expected ReplicationError";
  } catch (const ReplicationError& ex) {
    first = ex.replication();
    EXPECT_NE(std::string(ex.what()).find("replication " + std::to_string(first)),
              std::string::npos);
  }
  try {
    (void)estimate_risk(c, OptimalEstimator{}, RunOptions{4});
    FAIL() << "expected ReplicationError";
  } catch (const ReplicationError& ex) {
    EXPECT_EQ(ex.replication(), first);
  }
}

TEST(ExperimentConfigCheck, Invariants) {
  ExperimentConfig c = small_config();
  c.alphas.clear();
  EXPECT_THROW(c.validate(), ParameterError);
  c = small_config();
  c.replications = 1;
  EXPECT_THROW(c.validate(), ParameterError);
  c = small_config();
  c.spec.r = 13;
  EXPECT_THROW(c.validate(), DimensionError);
  c = small_config();
  c.n = 1;
  EXPECT_THROW((void)c.resolved_b(), ParameterError);
  c.b = 0.5;
  EXPECT_DOUBLE_EQ(c.resolved_b(), 0.5);
}

TEST(Prial, Examples) {
  const RiskEstimate ref = from_losses({2.0, 4.0, 6.0});
  EXPECT_EQ(prial(ref, ref).prial_percent, 0.0);
  EXPECT_EQ(prial(ref, ref).se_percent, 0.0);
  const RiskEstimate half = from_losses({1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(prial(ref, half).prial_percent, 50.0);
  // Exactly proportional paired losses leave no residual variance.
  EXPECT_NEAR(prial(ref, half).se_percent, 0.0, 1e-12);
}

TEST(Prial, RejectsNonPositiveReference) {
  EXPECT_THROW((void)prial(from_losses({0.0, 0.0}), from_losses({1.0, 1.0})), ParameterError);
}

TEST(Prial, DeltaMethodMatchesHandComputation) {
  const RiskEstimate ref = from_losses({1.0, 2.0, 3.0, 4.0});
  const RiskEstimate alt = from_losses({1.0, 1.5, 2.5, 3.0});
  // ratio = 8/10; residuals alt - 0.8 ref = (0.2, -0.1, 0.1, -0.2).
  // sd = sqrt(0.1/3); se = sd / (2 * 2.5).
  const PrialValue v = prial(ref, alt);
  EXPECT_NEAR(v.prial_percent, 20.0, 1e-12);
  EXPECT_NEAR(v.se_percent, 100.0 * std::sqrt(0.1 / 3.0) / 5.0, 1e-12);
}

TEST(Prial, UnpairedFallsBackToIndependentError) {
  RiskEstimate ref = from_losses({1.0, 3.0});
  RiskEstimate alt = from_losses({1.0, 2.0});
  alt.data_digests = {5, 6};
  const PrialValue v = prial(ref, alt);
  const double rel_ref = ref.std_error / ref.mean_loss, rel_alt = alt.std_error / alt.mean_loss;
  EXPECT_NEAR(v.se_percent,
              100.0 * (1.5 / 2.0) * std::sqrt(rel_ref * rel_ref + rel_alt * rel_alt), 1e-12);
  EXPECT_THROW((void)paired_difference(ref, alt), ParameterError);
}

TEST(RunTable, MinimalRun) {
  ExperimentConfig c = small_config(2);
  c.alphas = {1.0, 2.0, 3.0};
  const std::vector<ExperimentConfig> configs{c};
  const PrialReport report = run_table(configs);
  ASSERT_EQ(report.rows.size(), 3u);
  for (const PrialRow& row : report.rows) {
    EXPECT_EQ(row.replications, 2);
    EXPECT_NEAR(row.prial_percent, 100.0 * (row.risk_ref - row.risk_alt) / row.risk_ref, 1e-10);
  }
}

TEST(RunTable, EmptyAlphaListRejected) {
  ExperimentConfig c = small_config(2);
  c.alphas.clear();
  const std::vector<ExperimentConfig> configs{c};
  EXPECT_THROW((void)run_table(configs), ParameterError);
}

TEST(RunTable, HaffDoesNotLoseToOptimal) {
  const std::vector<ExperimentConfig> configs{small_config(500)};
  const PrialReport report = run_table(configs);
  for (const PrialRow& row : report.rows) {
    EXPECT_LE(row.diff_mean, 3.0 * row.diff_se) << "alpha " << row.alpha;
    EXPECT_GT(row.prial_percent, 0.0);
    EXPECT_NEAR(row.b, dominance_bound(Dimensions(12, 6, 8)).value, 1e-15);
  }
}

TEST(Table1Preset, Layout) {
  const auto configs = table1_preset(1000, 42);
  ASSERT_EQ(configs.size(), 20u);
  std::size_t rows = 0;
  for (const ExperimentConfig& c : configs) {
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.alphas, (std::vector<double>{1, 2, 3, 4, 5}));
    EXPECT_EQ(c.spec.rho, 0.9);
    rows += c.alphas.size();
  }
  EXPECT_EQ(rows, 100u);
  EXPECT_EQ(configs[0].spec.structure, Structure::identity);
  EXPECT_EQ(configs[10].spec.structure, Structure::ar);
  EXPECT_EQ(configs[9].spec.p, 150);
  EXPECT_EQ(configs[9].spec.r, 150);
  EXPECT_EQ(configs[9].n, 30);
}

TEST(ResolveWorkers, ExplicitValueWins) {
  EXPECT_EQ(resolve_workers(RunOptions{3}), 3u);
  EXPECT_GE(resolve_workers(RunOptions{}), 1u);
}

}  // namespace
}  // namespace steinshrink
