#include "sparse_limits/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sparse_limits/errors.hpp"
#include "sparse_limits/numeric.hpp"

namespace sparse_limits {

using detail::require;

BoundResult BoundResult::from_exponents(std::vector<double> exponents, int first_i) {
  BoundResult r;
  r.first_error_count = first_i;
  std::vector<double> neg(exponents.size());
  for (std::size_t j = 0; j < exponents.size(); ++j) neg[j] = -exponents[j];
  const double log2_sum = numeric::log2_sum_exp2(neg);
  r.clamped = log2_sum > 0.0;
  r.value = r.clamped ? 1.0 : std::exp2(log2_sum);
  r.exponent_terms = std::move(exponents);
  return r;
}

namespace bounds {
namespace {

constexpr double kLn2 = std::numbers::ln2;

// N * 0.5 * log2(1 + a / N), stable as N grows.
double scaled_half_log2(double n, double a) {
  return 0.5 * n * std::log1p(a / n) / kLn2;
}

void check_error_count(int i, const ProblemConfig& cfg) {
  require(i >= 1 && i <= cfg.sparsity, "error count i must lie in [1, K]");
}

int first_error_count(double alpha, int k) {
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  const int start = static_cast<int>(std::floor(alpha * k + 1e-9));
  return std::max(1, start);
}

// Generalized Gauss-Laguerre rules are reused across calls; the table is keyed
// by the error count i (alpha = i/2 - 1).
}  // namespace

double log2_binomial(long long n, long long k) {
  require(n >= 0 && k >= 0, "log2_binomial: arguments must be nonnegative");
  require(k <= n, "log2_binomial: k must not exceed n");
  if (k == 0 || k == n) return 0.0;
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return (std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0)) /
         kLn2;
}

double log2_wrong_supports(long long d, long long k, long long i) {
  if (i > d - k) return 0.0;
  return log2_binomial(d - k, i) + log2_binomial(k, i);
}

double exponent_linear(int i, const ProblemConfig& cfg) {
  cfg.validate();
  check_error_count(i, cfg);
  const double n = cfg.n_samples;
  const double a = (1.0 - cfg.rho) * 2.0 * i * cfg.sigma2 * cfg.snr;
  return scaled_half_log2(n, a) - (i / 4.0) * std::log2(4.0) -
         log2_wrong_supports(cfg.dimension, cfg.sparsity, i);
}

double f_rho(int i, const ProblemConfig& cfg) {
  return exponent_linear(i, cfg) / cfg.n_samples;
}

BoundResult error_bound_linear(const ProblemConfig& cfg) {
  return partial_recovery_bound(cfg, 1.0 / cfg.sparsity);
}

double exponent_noisy(int i, const ProblemConfig& cfg) {
  cfg.validate();
  check_error_count(i, cfg);
  const double n = cfg.n_samples;
  // nu / (1 + nu) and 1 / (1 + nu), with nu = inf handled as the limit.
  const double nu_share = std::isinf(cfg.nu) ? 1.0 : cfg.nu / (1.0 + cfg.nu);
  const double clean_share = std::isinf(cfg.nu) ? 0.0 : 1.0 / (1.0 + cfg.nu);
  const double xi =
      1.0 + (1.0 - cfg.rho) * nu_share * cfg.sparsity * cfg.snr * cfg.sigma2 / n;
  const double a = (1.0 - cfg.rho) * clean_share * 2.0 * i * cfg.sigma2 * cfg.snr / xi;
  return scaled_half_log2(n, a) - (i / 4.0) * std::log2(4.0) -
         log2_wrong_supports(cfg.dimension, cfg.sparsity, i);
}

double f_rho_nu(int i, const ProblemConfig& cfg) {
  return exponent_noisy(i, cfg) / cfg.n_samples;
}

BoundResult error_bound_noisy(const ProblemConfig& cfg) {
  return partial_recovery_bound_noisy(cfg, 1.0 / cfg.sparsity);
}

BoundResult partial_recovery_bound(const ProblemConfig& cfg, double alpha) {
  cfg.validate();
  const int start = first_error_count(alpha, cfg.sparsity);
  std::vector<double> e;
  e.reserve(cfg.sparsity - start + 1);
  for (int i = start; i <= cfg.sparsity; ++i) e.push_back(exponent_linear(i, cfg));
  return BoundResult::from_exponents(std::move(e), start);
}

BoundResult partial_recovery_bound_noisy(const ProblemConfig& cfg, double alpha) {
  cfg.validate();
  const int start = first_error_count(alpha, cfg.sparsity);
  std::vector<double> e;
  e.reserve(cfg.sparsity - start + 1);
  for (int i = start; i <= cfg.sparsity; ++i) e.push_back(exponent_noisy(i, cfg));
  return BoundResult::from_exponents(std::move(e), start);
}

double mutual_info_linear(int i, const ProblemConfig& cfg) {
  cfg.validate();
  check_error_count(i, cfg);
  const double scale = (1.0 - cfg.rho) * cfg.snr / cfg.n_samples;
  if (scale == 0.0) return 0.0;
  switch (cfg.coeff_model) {
    case CoeffModel::FixedSigns:
      return 0.5 * std::log1p(scale * i * cfg.sigma2) / kLn2;
    case CoeffModel::GaussianIID: {
      // ||beta_S1||^2 = 2 sigma^2 u with u ~ Gamma(i/2, 1).
      return 0.5 * numeric::gamma_log1p_mean(0.5 * i, 2.0 * scale * cfg.sigma2) / kLn2;
    }
  }
  return 0.0;
}

namespace {

// Smallest n in [1, kMaxSamples] with ok(n), given ok is monotone; nullopt if
// ok(kMaxSamples) fails.
template <class Pred>
std::optional<long long> smallest_satisfying(Pred ok) {
  if (!ok(kMaxSamples)) return std::nullopt;
  long long lo = 1, hi = kMaxSamples;
  if (ok(lo)) return lo;
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

SampleComplexityResult necessary_samples(const ProblemConfig& cfg) {
  cfg.validate();
  const int k = cfg.sparsity;
  std::vector<double> bits(k + 1);
  for (int i = 1; i <= k; ++i) bits[i] = log2_binomial(cfg.dimension - k + i, i);

  auto satisfied = [&](long long n) {
    const auto at_n = cfg.with_samples(static_cast<int>(n));
    for (int i = 1; i <= k; ++i)
      if (static_cast<double>(n) * mutual_info_linear(i, at_n) < bits[i]) return false;
    return true;
  };

  SampleComplexityResult r;
  r.criterion = SampleCriterion::Necessary;
  r.n_required = smallest_satisfying(satisfied);
  r.feasible = r.n_required.has_value();

  // The binding error count maximizes bits_i / I_i at the reported N (or at
  // the search cap when infeasible).
  const auto at_n = cfg.with_samples(static_cast<int>(r.n_required.value_or(kMaxSamples)));
  double worst = -1.0;
  for (int i = 1; i <= k; ++i) {
    const double info = mutual_info_linear(i, at_n);
    const double ratio = info > 0.0 ? bits[i] / info
                         : bits[i] > 0.0 ? std::numeric_limits<double>::infinity()
                                         : 0.0;
    if (ratio > worst) {
      worst = ratio;
      r.binding_i = i;
    }
  }
  return r;
}

SampleComplexityResult sufficient_samples(const ProblemConfig& cfg, double target_pe) {
  cfg.validate();
  require(target_pe > 0.0 && target_pe <= 1.0, "target_pe must lie in (0, 1]");

  auto satisfied = [&](long long n) {
    return error_bound_linear(cfg.with_samples(static_cast<int>(n))).value <= target_pe;
  };

  SampleComplexityResult r;
  r.criterion = SampleCriterion::Sufficient;
  r.n_required = smallest_satisfying(satisfied);
  r.feasible = r.n_required.has_value();

  const auto bound = error_bound_linear(
      cfg.with_samples(static_cast<int>(r.n_required.value_or(kMaxSamples))));
  // Largest term 2^-e_i.
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < bound.exponent_terms.size(); ++j) {
    if (bound.exponent_terms[j] < smallest) {
      smallest = bound.exponent_terms[j];
      r.binding_i = bound.first_error_count + static_cast<int>(j);
    }
  }
  return r;
}

std::optional<double> snr_cutoff(const ProblemConfig& cfg) {
  cfg.validate();
  if (cfg.rho >= 1.0) return std::nullopt;
  double cutoff = 0.0;
  for (int i = 1; i <= cfg.sparsity; ++i) {
    const double penalty =
        (i / 4.0) * std::log2(4.0) + log2_wrong_supports(cfg.dimension, cfg.sparsity, i);
    cutoff = std::max(cutoff, penalty * kLn2 / ((1.0 - cfg.rho) * i * cfg.sigma2));
  }
  return cutoff;
}

}  // namespace bounds
}  // namespace sparse_limits
