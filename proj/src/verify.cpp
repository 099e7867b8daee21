#include "steinshrink/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "steinshrink/random.hpp"

namespace steinshrink {
namespace {

void require_positive(const Vector& l, const char* who) {
  if (l.size() == 0) throw DimensionError(std::string(who) + ": empty eigenvalue vector");
  for (Index i = 0; i < l.size(); ++i) {
    if (!(l[i] > 0.0)) {
      std::ostringstream os;
      os << who << ": eigenvalue " << i << " = " << l[i] << " is not positive";
      throw DomainError(os.str());
    }
  }
}

// (l_min / l_i)^alpha, i.e. l_i^{-alpha} up to the common factor l_min^{-alpha}.
Vector relative_inverse_powers(const Vector& l, double alpha) {
  const double lmin = l.minCoeff();
  Vector w(l.size());
  for (Index i = 0; i < l.size(); ++i) w[i] = std::exp(-alpha * std::log(l[i] / lmin));
  return w;
}

}  // namespace

Vector majorization_sums(const Vector& l, const ShrinkageRule& rule) {
  rule.validate();
  require_positive(l, "majorization_sums");
  const Index q = l.size();
  for (Index i = 1; i < q; ++i) {
    if (!(l[i] < l[i - 1])) {
      std::ostringstream os;
      os << "majorization_sums: eigenvalues " << i - 1 << " and " << i
         << " are not strictly descending (" << l[i - 1] << ", " << l[i] << ")";
      throw DomainError(os.str());
    }
  }
  const Vector w = relative_inverse_powers(l, rule.alpha);
  const double coeff = rule.b / w.sum();

  // (l_i phi_i - l_j phi_j) / (l_i - l_j)
  //   = 1 + (b / tr L^{-alpha}) (l_i^{1-alpha} - l_j^{1-alpha}) / (l_i - l_j),
  // with the power difference written as l_j^{1-alpha} expm1(...) so that
  // close eigenvalues do not cancel.
  Vector sums = Vector::Zero(q);
  for (Index i = 0; i < q; ++i) {
    for (Index j = i + 1; j < q; ++j) {
      const double gap = l[i] - l[j];
      const double diff =
          l[j] * w[j] * std::expm1((1.0 - rule.alpha) * std::log1p(gap / l[j]));
      sums[i] += 1.0 + coeff * diff / gap;
    }
  }
  return sums;
}

std::vector<bool> check_majorization(const Vector& l, const ShrinkageRule& rule) {
  const Vector sums = majorization_sums(l, rule);
  const Index q = l.size();
  std::vector<bool> ok(static_cast<std::size_t>(q));
  for (Index i = 0; i < q; ++i) {
    ok[static_cast<std::size_t>(i)] =
        sums[i] <= static_cast<double>(q - (i + 1)) + kMajorizationSlack;
  }
  return ok;
}

bool check_trace_submult(const Vector& l, double alpha) {
  require_positive(l, "check_trace_submult");
  if (!(alpha > 0.0)) throw ParameterError("check_trace_submult: alpha must be positive");
  // Both sides carry the factor l_min^{-2 alpha}; compare the rescaled traces.
  const Vector w = relative_inverse_powers(l, alpha);
  const double lhs = w.squaredNorm();
  const double tr = w.sum();
  return lhs <= tr * tr * (1.0 + kTraceSubmultSlack);
}

double check_log_bound(const Vector& l, const ShrinkageRule& rule) {
  const Vector psi = psi_haff(l, rule);
  double log_det_phi = 0.0;
  for (Index i = 0; i < psi.size(); ++i) log_det_phi += std::log1p(psi[i]);
  return log_det_phi - 2.0 * rule.b / (2.0 + rule.b);
}

double risk_diff_upper_bound(const Dimensions& dims, double b) {
  if (!(b > 0.0)) throw ParameterError("risk_diff_upper_bound: b must be positive");
  const double a_o = optimal_constant(dims);
  const auto slack = static_cast<double>(dims.m() - dims.q() + 1);
  return b * (a_o * slack - 2.0 / (2.0 + b));
}

ProofDiagnostics diagnose(const Vector& l, const ShrinkageRule& rule,
                          const Dimensions& dims) {
  if (l.size() != dims.q()) {
    std::ostringstream os;
    os << "diagnose: " << l.size() << " eigenvalues for q=" << dims.q();
    throw DimensionError(os.str());
  }
  ProofDiagnostics d;
  const std::vector<bool> maj = check_majorization(l, rule);
  d.majorization_ok = std::all_of(maj.begin(), maj.end(), std::identity{});
  d.trace_submult_ok = check_trace_submult(l, rule.alpha);
  d.log_bound_gap = check_log_bound(l, rule);
  d.risk_diff_bound = risk_diff_upper_bound(dims, rule.b);
  return d;
}

Vector random_spectrum(Index q, std::uint64_t seed, std::uint64_t trial) {
  RandomStream stream(seed, trial);
  Vector l(q);
  for (Index i = 0; i < q; ++i) l[i] = std::exp(2.0 * stream.normal());
  std::sort(l.begin(), l.end(), std::greater<>());
  return l;
}

std::vector<ProofTrial> run_proof_trials(const ProofTrialConfig& config) {
  const Dimensions dims(config.p, config.n, config.r);
  if (config.alphas.empty()) throw ParameterError("proof trials: alpha list is empty");
  if (config.trials < 1) throw ParameterError("proof trials: need at least one trial");
  const Index q = dims.q();
  const double b_o = dominance_bound(dims).value;

  std::vector<ProofTrial> out;
  for (Index t = 0; t < config.trials; ++t) {
    const auto trial = static_cast<std::uint64_t>(t);
    const Vector l = random_spectrum(q, config.seed, trial);

    std::vector<double> bs = config.bs;
    if (bs.empty()) {
      if (q == 1) {
        bs = {1.0};
      } else {
        // Separate stream family so the b draw does not perturb L.
        RandomStream extra(config.seed ^ 0x9E3779B97F4A7C15ull, trial);
        bs = {b_o, b_o * (1.0 - extra.uniform())};
      }
    }
    for (double alpha : config.alphas) {
      for (double b : bs) {
        ProofTrial rec;
        rec.trial = t;
        rec.alpha = alpha;
        rec.b = b;
        rec.diagnostics = diagnose(l, ShrinkageRule{alpha, b}, dims);
        rec.asserted = alpha >= 1.0 && b > 0.0 && (q == 1 || b <= b_o);
        rec.passed = rec.diagnostics.majorization_ok && rec.diagnostics.trace_submult_ok &&
                     rec.diagnostics.log_bound_gap >= -kLogBoundSlack;
        out.push_back(rec);
      }
    }
  }
  return out;
}

}  // namespace steinshrink
