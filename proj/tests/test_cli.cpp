#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "steinshrink/cli.hpp"
#include "steinshrink/model.hpp"
#include "steinshrink/report.hpp"

namespace steinshrink::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "steinshrink");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("steinshrink_test_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

TEST(MatrixCsv, RoundTrip) {
  const Matrix m{{1.0, -2.5, 1e-300}, {0.1, 3.0, 7.0}};
  EXPECT_EQ(parse_matrix_csv(format_matrix_csv(m)), m);
}

TEST(MatrixCsv, TrailingBlankLinesAndCrlf) {
  const Matrix m = parse_matrix_csv("1,2\r\n3,4\n\n\n");
  EXPECT_EQ(m, (Matrix{{1.0, 2.0}, {3.0, 4.0}}));
}

TEST(MatrixCsv, RaggedRowIsNamed) {
  try {
    (void)parse_matrix_csv("1,2,3\n4,5,6\n7,8\n");
    FAIL();
  } catch (const Error& ex) {
    EXPECT_NE(std::string(ex.what()).find("row 3"), std::string::npos) << ex.what();
  }
  EXPECT_THROW((void)parse_matrix_csv("1,x\n"), Error);
  EXPECT_THROW((void)parse_matrix_csv(""), Error);
}

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(invoke({"--help"}).code, kExitOk);
  EXPECT_EQ(invoke({}).code, kExitUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(invoke({"bench", "--p", "x"}).code, kExitUsage);
}

TEST(CliBench, WritesFiveRowCsv) {
  TempDir dir;
  const Result r = invoke({"bench", "--structure", "ar", "--p", "10", "--n", "6", "--r", "8",
                           "--reps", "20", "--threads", "2", "--out", dir.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string csv = slurp(dir.path() / "prial.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "structure,p,n,r,alpha,prial_percent,se_percent,replications,seed");
  const PrialReport report = PrialReport::from_csv(csv);
  ASSERT_EQ(report.rows.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(report.rows[i].structure, Structure::ar);
    EXPECT_EQ(report.rows[i].alpha, static_cast<double>(i + 1));
    EXPECT_EQ(report.rows[i].replications, 20);
    EXPECT_EQ(report.rows[i].seed, 42u);
  }
  EXPECT_EQ(report.to_csv(), csv);
  EXPECT_TRUE(fs::exists(dir.path() / "prial.md"));
  EXPECT_FALSE(fs::exists(dir.path() / "prial.csv.partial"));
  EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(CliBench, RankAboveDimensionIsUsageError) {
  TempDir dir;
  const Result r = invoke({"bench", "--p", "30", "--n", "10", "--r", "40", "--reps", "2", "--out",
                           dir.path().string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(fs::exists(dir.path() / "prial.csv"));
}

TEST(CliBench, MissingSettingIsUsageError) {
  EXPECT_EQ(invoke({"bench", "--p", "30", "--n", "10"}).code, kExitUsage);
  EXPECT_EQ(invoke({"bench", "--preset", "table9"}).code, kExitUsage);
  EXPECT_EQ(invoke({"bench", "--p", "5", "--n", "4", "--r", "3", "--reps", "1"}).code,
            kExitUsage);
}

TEST(CliBench, RankOneWithoutBIsUsageError) {
  TempDir dir;
  EXPECT_EQ(invoke({"bench", "--p", "5", "--n", "1", "--r", "3", "--reps", "2", "--out",
                    dir.path().string()})
                .code,
            kExitUsage);
  EXPECT_EQ(invoke({"bench", "--p", "5", "--n", "1", "--r", "3", "--reps", "2", "--b", "0.5",
                    "--out", dir.path().string()})
                .code,
            kExitOk);
}

TEST(CliBench, PresetFilteredBySettingFlags) {
  TempDir dir;
  const Result r = invoke({"bench", "--preset", "table1", "--structure", "identity", "--p", "30",
                           "--n", "50", "--r", "10", "--alphas", "1,3", "--reps", "4", "--out",
                           dir.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const PrialReport report = PrialReport::from_csv(slurp(dir.path() / "prial.csv"));
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_EQ(report.rows[0].p, 30);
  EXPECT_EQ(report.rows[0].r, 10);
  EXPECT_EQ(report.rows[1].alpha, 3.0);
  EXPECT_EQ(report.rows[1].replications, 4);

  EXPECT_EQ(invoke({"bench", "--preset", "table1", "--p", "31", "--out", dir.path().string()})
                .code,
            kExitUsage);
}

TEST(CliBench, RuntimeFailureRemovesOutputs) {
  TempDir dir;
  spit(dir.path() / "prial.csv", "stale\n");
  // A rank threshold this large rejects some sample covariance.
  const Result r = invoke({"bench", "--p", "2", "--n", "3", "--r", "2", "--reps", "200",
                           "--tol", "0.3", "--out", dir.path().string()});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("replication"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir.path() / "prial.csv"));
  EXPECT_FALSE(fs::exists(dir.path() / "prial.csv.partial"));
  EXPECT_FALSE(fs::exists(dir.path() / "prial.md"));
}

TEST(CliBench, ConfigFileValuesYieldToFlags) {
  TempDir dir;
  spit(dir.path() / "run.toml",
       "[bench]\nstructure = \"ar\"\np = 8\nn = 5\nr = 6\nreps = 7\nalphas = [2.0]\n");
  const Result r = invoke({"--config", dir / "run.toml", "bench", "--reps", "3", "--out",
                           dir.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const PrialReport report = PrialReport::from_csv(slurp(dir.path() / "prial.csv"));
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_EQ(report.rows[0].structure, Structure::ar);
  EXPECT_EQ(report.rows[0].p, 8);
  EXPECT_EQ(report.rows[0].alpha, 2.0);
  EXPECT_EQ(report.rows[0].replications, 3);
}

TEST(CliBench, ThreadCountDoesNotChangeOutput) {
  TempDir a, b;
  const std::vector<std::string> base{"bench", "--structure", "ar", "--p", "12", "--n", "7",
                                      "--r", "9", "--reps", "40", "--seed", "5"};
  auto one = base, many = base;
  one.insert(one.end(), {"--threads", "1", "--out", a.path().string()});
  many.insert(many.end(), {"--threads", "6", "--out", b.path().string()});
  ASSERT_EQ(invoke(one).code, kExitOk);
  ASSERT_EQ(invoke(many).code, kExitOk);
  EXPECT_EQ(slurp(a.path() / "prial.csv"), slurp(b.path() / "prial.csv"));
  EXPECT_EQ(slurp(a.path() / "prial.md"), slurp(b.path() / "prial.md"));
}

class CliEstimate : public ::testing::Test {
 protected:
  void SetUp() override {
    RandomStream rs(3, 0);
    const FactorMatrix b = factorize(build_sigma({Structure::ar, 0.9, 8, 6}), 6);
    spit(dir_.path() / "x.csv", format_matrix_csv(sample_data(b, 4, rs)));
  }
  TempDir dir_;
};

TEST_F(CliEstimate, OutputIsPsdOfRankQ) {
  const Result r = invoke({"estimate", "--input", dir_ / "x.csv", "--r", "6", "--alpha", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Matrix est = parse_matrix_csv(r.out);
  ASSERT_EQ(est.rows(), 8);
  ASSERT_EQ(est.cols(), 8);
  EXPECT_EQ(est, est.transpose());
  const FullEigen e = sym_eig(SymMatrix(est));
  EXPECT_EQ(numerical_rank(e, default_tolerance(8)), 4);
  EXPECT_GE(e.values.minCoeff(), -1e-12 * e.values[0]);
}

TEST_F(CliEstimate, ByteIdenticalAcrossRuns) {
  const std::vector<std::string> args{"estimate", "--input", dir_ / "x.csv", "--r", "6",
                                      "--out", dir_ / "est.csv"};
  ASSERT_EQ(invoke(args).code, kExitOk);
  const std::string first = slurp(dir_.path() / "est.csv");
  ASSERT_EQ(invoke(args).code, kExitOk);
  EXPECT_EQ(slurp(dir_.path() / "est.csv"), first);
  EXPECT_EQ(invoke({"estimate", "--input", dir_ / "x.csv", "--r", "6"}).out, first);
}

TEST_F(CliEstimate, UsageErrors) {
  EXPECT_EQ(invoke({"estimate", "--input", dir_ / "x.csv"}).code, kExitUsage);
  EXPECT_EQ(invoke({"estimate", "--input", dir_ / "x.csv", "--r", "9"}).code, kExitUsage);
  EXPECT_EQ(invoke({"estimate", "--input", dir_ / "x.csv", "--r", "6", "--n", "5"}).code,
            kExitUsage);
  EXPECT_EQ(invoke({"estimate", "--input", dir_ / "x.csv", "--r", "6", "--alpha", "0"}).code,
            kExitUsage);
}

TEST_F(CliEstimate, RaggedInputNamesRow) {
  spit(dir_.path() / "bad.csv", "1,2,3\n4,5,6\n7,8\n");
  const Result r = invoke({"estimate", "--input", dir_ / "bad.csv", "--r", "2"});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("row 3"), std::string::npos) << r.err;
}

TEST_F(CliEstimate, MissingInputIsRuntimeError) {
  EXPECT_EQ(invoke({"estimate", "--input", dir_ / "nope.csv", "--r", "2"}).code, kExitRuntime);
}

TEST_F(CliEstimate, RankOneFallsBackToScaledS) {
  spit(dir_.path() / "one.csv", "1\n2\n0\n");
  const Result r = invoke({"estimate", "--input", dir_ / "one.csv", "--r", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("note"), std::string::npos);
  const Matrix est = parse_matrix_csv(r.out);
  // m = max(1, 2) = 2, so a_o S = S / 2.
  EXPECT_NEAR(est(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(est(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(est(1, 1), 2.0, 1e-15);
}

TEST(CliVerify, AlphaOnePasses) {
  const Result r = invoke({"verify", "--p", "30", "--n", "50", "--r", "10", "--alphas", "1",
                           "--trials", "50"});
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_EQ(r.out.rfind("trial,alpha,b,asserted,majorization_ok,trace_submult_ok,log_bound_gap,"
                        "risk_diff_bound,passed\n",
                        0),
            0u);
  EXPECT_NE(r.out.find("0 asserted failures"), std::string::npos) << r.out;
}

TEST(CliVerify, AlphaBelowOneIsReportedNotAsserted) {
  const Result r = invoke({"verify", "--p", "10", "--n", "8", "--r", "6", "--alphas", "0.5",
                           "--trials", "10"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("0 asserted"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("20 failures outside the asserted domain"), std::string::npos) << r.out;
}

TEST(CliVerify, RankOne) {
  const Result r = invoke({"verify", "--p", "5", "--n", "1", "--r", "3", "--trials", "3"});
  EXPECT_EQ(r.code, kExitOk) << r.out;
}

TEST(CliVerify, UsageErrors) {
  EXPECT_EQ(invoke({"verify", "--p", "5", "--n", "3"}).code, kExitUsage);
  EXPECT_EQ(invoke({"verify", "--p", "5", "--n", "3", "--r", "6"}).code, kExitUsage);
  EXPECT_EQ(invoke({"verify", "--p", "5", "--n", "3", "--r", "3", "--b", "-1"}).code, kExitUsage);
  EXPECT_EQ(invoke({"verify", "--p", "5", "--n", "3", "--r", "3", "--trials", "0"}).code,
            kExitUsage);
}

TEST(CliVerify, WritesTableToFile) {
  TempDir dir;
  const Result r = invoke({"verify", "--p", "6", "--n", "4", "--r", "5", "--trials", "4", "--out",
                           dir / "v.csv"});
  ASSERT_EQ(r.code, kExitOk);
  const std::string table = slurp(dir.path() / "v.csv");
  EXPECT_EQ(static_cast<int>(std::count(table.begin(), table.end(), '\n')), 1 + 8);
}

}  // namespace
}  // namespace steinshrink::cli
