#include "steinshrink/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <sstream>
#include <string>
#include <thread>

#include "steinshrink/loss.hpp"
#include "steinshrink/random.hpp"

namespace steinshrink {

void ExperimentConfig::validate() const {
  spec.validate();
  (void)dims();
  if (alphas.empty()) throw ParameterError("experiment: alpha list is empty");
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      std::ostringstream os;
      os << "experiment: alpha must be positive, got " << a;
      throw ParameterError(os.str());
    }
  }
  if (replications < 2) {
    throw ParameterError("experiment: need at least 2 replications for a standard error");
  }
  if (tol < 0.0 || !std::isfinite(tol)) throw ParameterError("experiment: tol must be >= 0");
  if (b && !(*b > 0.0)) throw ParameterError("experiment: b must be positive");
}

double ExperimentConfig::tolerance() const {
  return tol > 0.0 ? tol : default_tolerance(spec.p);
}

double ExperimentConfig::resolved_b() const {
  if (b) return *b;
  const DominanceBound bound = dominance_bound(dims());
  if (!bound.improvement_guaranteed) {
    throw ParameterError(
        "experiment: q = min(n, r) = 1 gives b_o = 0; pass b explicitly");
  }
  return bound.value;
}

RiskEstimate summarize(std::vector<double> losses, std::vector<std::uint64_t> digests) {
  RiskEstimate est;
  const auto n = static_cast<Index>(losses.size());
  est.replications = n;
  if (n > 0) {
    double sum = 0.0;
    for (double x : losses) sum += x;
    est.mean_loss = sum / static_cast<double>(n);
  }
  if (n > 1) {
    double ss = 0.0;
    for (double x : losses) ss += (x - est.mean_loss) * (x - est.mean_loss);
    est.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  }
  est.losses = std::move(losses);
  est.data_digests = std::move(digests);
  return est;
}

unsigned resolve_workers(const RunOptions& options) {
  if (options.workers > 0) return options.workers;
  if (const char* env = std::getenv(kThreadsEnvVar); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

namespace {

std::uint64_t fnv1a(const Matrix& x) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const auto* bytes = reinterpret_cast<const unsigned char*>(x.data());
  const std::size_t len = static_cast<std::size_t>(x.size()) * sizeof(double);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

struct ResolvedEstimator {
  enum class Kind { optimal, natural, haff } kind;
  double a = 0.0;
  ShrinkageRule rule;
};

std::vector<ResolvedEstimator> resolve(const ExperimentConfig& config,
                                       std::span<const EstimatorKind> estimators) {
  std::vector<ResolvedEstimator> out;
  for (const EstimatorKind& kind : estimators) {
    ResolvedEstimator r{};
    if (std::holds_alternative<OptimalEstimator>(kind)) {
      r.kind = ResolvedEstimator::Kind::optimal;
    } else if (const auto* nat = std::get_if<NaturalEstimator>(&kind)) {
      if (!(nat->a > 0.0)) throw ParameterError("natural estimator: a must be positive");
      r.kind = ResolvedEstimator::Kind::natural;
      r.a = nat->a;
    } else {
      const auto& haff = std::get<HaffEstimator>(kind);
      r.kind = ResolvedEstimator::Kind::haff;
      r.rule = ShrinkageRule{haff.alpha, haff.b ? *haff.b : config.resolved_b()};
      r.rule.validate();
    }
    out.push_back(r);
  }
  return out;
}

EstimatorOutput build(const ResolvedEstimator& est, const EigenSystem& eig,
                      const Dimensions& dims) {
  switch (est.kind) {
    case ResolvedEstimator::Kind::optimal:
      return optimal_estimate(eig, dims);
    case ResolvedEstimator::Kind::natural:
      return oi_estimate(eig, Vector::Zero(eig.rank()), est.a);
    case ResolvedEstimator::Kind::haff:
      return haff_estimate(eig, dims, est.rule);
  }
  throw Error("unreachable estimator kind");
}

}  // namespace

std::vector<RiskEstimate> estimate_risks(const ExperimentConfig& config,
                                         std::span<const EstimatorKind> estimators,
                                         const RunOptions& options) {
  config.validate();
  const std::vector<ResolvedEstimator> resolved = resolve(config, estimators);
  const Dimensions dims = config.dims();
  const double tol = config.tolerance();
  const SymMatrix sigma = build_sigma(config.spec);
  const FactorMatrix factor = factorize(sigma, config.spec.r, tol);
  const LossTarget target(sigma, tol);

  const auto reps = static_cast<std::size_t>(config.replications);
  const std::size_t n_est = resolved.size();
  std::vector<double> losses(reps * n_est);
  std::vector<std::uint64_t> digests(reps);
  std::vector<std::exception_ptr> errors(reps);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto work = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t k = next.fetch_add(1);
      if (k >= reps) return;
      try {
        RandomStream stream(config.master_seed, k);
        const Matrix x = sample_data(factor, config.n, stream);
        digests[k] = fnv1a(x);
        const EigenSystem eig = truncate_to_rank(sym_eig(sample_cov(x)), dims.q(), tol);
        for (std::size_t e = 0; e < n_est; ++e) {
          losses[k * n_est + e] =
              stein_loss(build(resolved[e], eig, dims), target, dims, tol).value;
        }
      } catch (...) {
        errors[k] = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_workers(options), reps));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  // Indices are handed out in increasing order and every claimed index runs to
  // completion, so the first recorded failure is the lowest failing index.
  for (std::size_t k = 0; k < reps; ++k) {
    if (!errors[k]) continue;
    std::string what = "unknown error";
    try {
      std::rethrow_exception(errors[k]);
    } catch (const std::exception& ex) {
      what = ex.what();
    } catch (...) {
    }
    throw ReplicationError("replication " + std::to_string(k) + ": " + what, k);
  }

  std::vector<RiskEstimate> out;
  out.reserve(n_est);
  for (std::size_t e = 0; e < n_est; ++e) {
    std::vector<double> column(reps);
    for (std::size_t k = 0; k < reps; ++k) column[k] = losses[k * n_est + e];
    out.push_back(summarize(std::move(column), digests));
  }
  return out;
}

RiskEstimate estimate_risk(const ExperimentConfig& config, const EstimatorKind& estimator,
                           const RunOptions& options) {
  return estimate_risks(config, std::span<const EstimatorKind>(&estimator, 1), options)
      .front();
}

namespace {

bool is_paired(const RiskEstimate& a, const RiskEstimate& b) {
  return !a.losses.empty() && a.losses.size() == b.losses.size() &&
         a.data_digests.size() == a.losses.size() && a.data_digests == b.data_digests;
}

double sample_sd(const std::vector<double>& v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

PrialValue prial(const RiskEstimate& ref, const RiskEstimate& alt) {
  if (!(ref.mean_loss > 0.0)) {
    std::ostringstream os;
    os << "prial: reference risk must be positive, got " << ref.mean_loss;
    throw ParameterError(os.str());
  }
  PrialValue out;
  const double ratio = alt.mean_loss / ref.mean_loss;
  out.prial_percent = 100.0 * (ref.mean_loss - alt.mean_loss) / ref.mean_loss;

  if (is_paired(ref, alt) && ref.losses.size() > 1) {
    // Linearization of alt_bar / ref_bar around the means:
    //   var ~ var(alt_k - ratio * ref_k) / (N ref_bar^2).
    std::vector<double> resid(ref.losses.size());
    for (std::size_t k = 0; k < resid.size(); ++k) {
      resid[k] = alt.losses[k] - ratio * ref.losses[k];
    }
    double mean = 0.0;
    for (double x : resid) mean += x;
    mean /= static_cast<double>(resid.size());
    const double se = sample_sd(resid, mean) /
                      std::sqrt(static_cast<double>(resid.size())) / ref.mean_loss;
    out.se_percent = 100.0 * se;
  } else {
    const double rel_ref = ref.std_error / ref.mean_loss;
    const double rel_alt = alt.mean_loss != 0.0 ? alt.std_error / alt.mean_loss : 0.0;
    out.se_percent = 100.0 * std::abs(ratio) * std::sqrt(rel_ref * rel_ref + rel_alt * rel_alt);
  }
  return out;
}

PairedDifference paired_difference(const RiskEstimate& ref, const RiskEstimate& alt) {
  if (!is_paired(ref, alt)) {
    throw ParameterError("paired_difference: estimates were not computed on the same data");
  }
  std::vector<double> diff(ref.losses.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = alt.losses[k] - ref.losses[k];
  const RiskEstimate d = summarize(std::move(diff), {});
  return PairedDifference{d.mean_loss, d.std_error};
}

PrialReport run_table(std::span<const ExperimentConfig> configs, const RunOptions& options) {
  PrialReport report;
  for (const ExperimentConfig& config : configs) {
    config.validate();
    const double b = config.resolved_b();
    std::vector<EstimatorKind> kinds{OptimalEstimator{}};
    for (double alpha : config.alphas) kinds.emplace_back(HaffEstimator{alpha, b});
    const std::vector<RiskEstimate> risks = estimate_risks(config, kinds, options);
    const RiskEstimate& ref = risks.front();

    for (std::size_t i = 0; i < config.alphas.size(); ++i) {
      const RiskEstimate& alt = risks[i + 1];
      const PrialValue pv = prial(ref, alt);
      const PairedDifference diff = paired_difference(ref, alt);
      PrialRow row;
      row.structure = config.spec.structure;
      row.p = config.spec.p;
      row.n = config.n;
      row.r = config.spec.r;
      row.alpha = config.alphas[i];
      row.prial_percent = pv.prial_percent;
      row.se_percent = pv.se_percent;
      row.replications = config.replications;
      row.seed = config.master_seed;
      row.b = b;
      row.risk_ref = ref.mean_loss;
      row.risk_alt = alt.mean_loss;
      row.diff_mean = diff.mean;
      row.diff_se = diff.std_error;
      report.rows.push_back(row);
    }
  }
  return report;
}

std::vector<ExperimentConfig> table1_preset(Index replications, std::uint64_t seed) {
  struct Setting {
    Index p, n, r;
  };
  static constexpr Setting kSettings[] = {
      {30, 50, 10},  {30, 50, 20},  {30, 50, 30},  {50, 30, 20},   {50, 30, 40},
      {50, 30, 50},  {150, 30, 20}, {150, 30, 40}, {150, 30, 60}, {150, 30, 150},
  };
  std::vector<ExperimentConfig> out;
  for (Structure structure : {Structure::identity, Structure::ar}) {
    for (const Setting& s : kSettings) {
      ExperimentConfig c;
      c.spec = CovarianceSpec{structure, 0.9, s.p, s.r};
      c.n = s.n;
      c.alphas = {1.0, 2.0, 3.0, 4.0, 5.0};
      c.replications = replications;
      c.master_seed = seed;
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace steinshrink
