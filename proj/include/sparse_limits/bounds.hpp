#pragma once

#include <optional>
#include <vector>

#include "sparse_limits/model.hpp"

namespace sparse_limits {

// A probability upper bound of the form min(1, sum_i 2^-e_i).
struct BoundResult {
  double value = 1.0;
  // e_i for i = first_error_count, ..., K.
  std::vector<double> exponent_terms;
  int first_error_count = 1;
  // True iff the unclamped sum exceeded 1.
  bool clamped = false;

  // Builds value and clamp flag from the exponents, summing in log domain.
  static BoundResult from_exponents(std::vector<double> exponents, int first_i = 1);
};

enum class SampleCriterion { Necessary, Sufficient };

struct SampleComplexityResult {
  std::optional<long long> n_required;
  bool feasible = false;
  int binding_i = 1;
  SampleCriterion criterion = SampleCriterion::Necessary;
};

namespace bounds {

// Largest N considered by the sample-complexity searches; no N at or below
// it satisfying the condition means infeasible.
inline constexpr long long kMaxSamples = 1'000'000'000LL;

// log2 C(n, k) via lgamma.
double log2_binomial(long long n, long long k);

// log2( C(D-K, i) C(K, i) ): the number of wrong supports at distance i.
// Zero when no such support exists (i > D - K).
double log2_wrong_supports(long long d, long long k, long long i);

// Per-letter exponent f(rho) for an i-error event in the correlated linear
// model.
double f_rho(int i, const ProblemConfig& cfg);

// N * f(rho), accurate for very large N.
double exponent_linear(int i, const ProblemConfig& cfg);

BoundResult error_bound_linear(const ProblemConfig& cfg);

// Noisy-data model (decoder sees z = x + v, v ~ N(0, nu/N)).
double f_rho_nu(int i, const ProblemConfig& cfg);
double exponent_noisy(int i, const ProblemConfig& cfg);
BoundResult error_bound_noisy(const ProblemConfig& cfg);

// Bound on the probability of at least floor(alpha K) support errors.
BoundResult partial_recovery_bound(const ProblemConfig& cfg, double alpha);
// Same with the noisy-data exponent.
BoundResult partial_recovery_bound_noisy(const ProblemConfig& cfg, double alpha);

// Conditional mutual information per sample, in bits, for an i-subset of the
// support given the rest.
double mutual_info_linear(int i, const ProblemConfig& cfg);

SampleComplexityResult necessary_samples(const ProblemConfig& cfg);
// target_pe in (0, 1]; target 1 is met by N = 1.
SampleComplexityResult sufficient_samples(const ProblemConfig& cfg, double target_pe);

// Smallest SNR above which the large-N exponent is positive for every i.
// nullopt when no finite SNR suffices (rho = 1).
std::optional<double> snr_cutoff(const ProblemConfig& cfg);

}  // namespace bounds
}  // namespace sparse_limits
