#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sparse_limits/rng.hpp"

namespace sparse_limits {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class CoeffModel {
  FixedSigns,   // beta_k = +-sigma with equal probability
  GaussianIID,  // beta_k ~ N(0, sigma^2)
};

std::string_view to_string(CoeffModel m);
CoeffModel coeff_model_from_string(std::string_view s);

// Scalar parameters of one recovery problem. snr is linear; the observation
// noise variance is 1/snr and every sensing entry has variance 1/n_samples.
struct ProblemConfig {
  int n_samples = 1;
  int dimension = 1;
  int sparsity = 1;
  double snr = 1.0;
  double sigma2 = 1.0;
  double rho = 0.0;
  double nu = 0.0;
  CoeffModel coeff_model = CoeffModel::FixedSigns;
  std::uint64_t seed = 0;

  // Throws ParameterError naming the first violated invariant.
  void validate() const;

  ProblemConfig with_samples(int n) const {
    ProblemConfig c = *this;
    c.n_samples = n;
    return c;
  }
};

// Strictly increasing indices in [0, D).
class SupportSet {
 public:
  SupportSet() = default;
  // Sorts and validates; throws ParameterError on duplicates or negatives.
  explicit SupportSet(std::vector<int> indices);

  const std::vector<int>& indices() const noexcept { return indices_; }
  int size() const noexcept { return static_cast<int>(indices_.size()); }
  bool contains(int k) const;

  // Number of indices shared with `other`.
  int overlap(const SupportSet& other) const;

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<int> indices_;
};

struct Dataset {
  Matrix x;                // clean sensing matrix, N x D
  std::optional<Matrix> z; // observed noisy matrix z = x + v, when nu > 0
  Vector y;                // observations, length N
  SupportSet support;
  Vector beta;             // length D, zero off the support

  // The matrix a decoder is allowed to see.
  const Matrix& observed_matrix() const { return z ? *z : x; }
};

namespace model {

// Rows IID; entry (n, k) = mu_n + u_{n,k} with mu_n ~ N(0, rho/N) shared
// across the row and u ~ N(0, (1-rho)/N).
Matrix generate_sensing_matrix(int n, int d, double rho, std::uint64_t seed);

// Uniform k-subset of [0, d) by partial Fisher-Yates, returned sorted.
SupportSet sample_support(int d, int k, Rng& rng);

struct Signal {
  SupportSet support;
  Vector beta;
};

Signal generate_signal(int d, int k, double sigma2, CoeffModel coeff_model,
                       std::uint64_t seed);

// y = x beta + w, w ~ N(0, 1/snr).
Vector generate_observations(const Matrix& x, const Vector& beta, double snr,
                             std::uint64_t seed);

// z = x + v, v ~ N(0, nu/N) with N = rows(x).
Matrix corrupt_matrix(const Matrix& x, double nu, std::uint64_t seed);

// Full instance. Each component draws from its own substream of cfg.seed, so
// sweeping N regenerates the matrix at the new normalization.
Dataset generate_dataset(const ProblemConfig& cfg);

}  // namespace model
}  // namespace sparse_limits
