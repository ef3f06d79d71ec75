#pragma once

#include <optional>

#include "sparse_limits/model.hpp"

namespace sparse_limits {

struct DecoderOutput {
  SupportSet support_estimate;
  std::optional<Vector> beta_estimate;
  int iterations = 0;
  std::optional<double> objective;
  bool converged = true;
};

struct LassoSettings {
  double lambda = 1.0;
  double tol = 1e-8;   // stop when the largest coordinate change falls below
  int max_iter = 10'000;

  void validate() const;
};

enum class LambdaLog { Natural, Base2 };

namespace decoders {

// Exhaustive decoders refuse problems with more candidate supports.
inline constexpr double kMaxSubsets = 1e6;
inline constexpr int kMaxSignPatterns = 4096;

// lambda = 2 sqrt(2 log D) / sqrt(SNR).
double default_lambda(int d, double snr, LambdaLog log_kind = LambdaLog::Natural);

// Maximum marginal likelihood over all K-subsets, beta marginalized under the
// configured coefficient model. Uses the matrix a decoder may observe.
DecoderOutput ml_decode_marginal(const Dataset& ds, const ProblemConfig& cfg);

// K-subset minimizing the least-squares residual.
DecoderOutput ml_decode_ls(const Matrix& x, const Vector& y, int k);

// Cyclic coordinate descent for 0.5 ||y - x b||^2 + lambda sum_j w_j |b_j|.
// `weights` defaults to all ones; `warm_start` to zero. Support is the k
// largest magnitudes.
DecoderOutput lasso(const Matrix& x, const Vector& y, const LassoSettings& settings, int k,
                    const Vector* weights = nullptr, const Vector* warm_start = nullptr);

struct ReweightSettings {
  double eps = 1.0;
  int outer_max = 10;
  double outer_tol = 1e-6;
};

// Lasso followed by outer reweighting steps with w_j = 1 / (|b_j| + eps).
DecoderOutput reweighted_lasso(const Matrix& x, const Vector& y, const LassoSettings& settings,
                               const ReweightSettings& reweight, int k);

// Greedy orthogonal matching pursuit with least-squares refits, applied to the
// observed matrix (stands in for support-OMP on noisy designs).
DecoderOutput omp(const Matrix& z, const Vector& y, int k);

// Indices of the k largest |v_j|, ties to the lower index, sorted.
SupportSet top_k_support(const Vector& v, int k);

// 0.5 ||y - x b||^2 + lambda sum_j w_j |b_j|.
double lasso_objective(const Matrix& x, const Vector& y, const Vector& b, double lambda,
                       const Vector* weights = nullptr);

}  // namespace decoders
}  // namespace sparse_limits
