#include "sparse_limits/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparse_limits/errors.hpp"
#include "sparse_limits/rng.hpp"

namespace sparse_limits {

using detail::require;

std::string_view to_string(CoeffModel m) {
  switch (m) {
    case CoeffModel::FixedSigns:
      return "fixed_signs";
    case CoeffModel::GaussianIID:
      return "gaussian_iid";
  }
  return "unknown";
}

CoeffModel coeff_model_from_string(std::string_view s) {
  if (s == "fixed_signs" || s == "fixed") return CoeffModel::FixedSigns;
  if (s == "gaussian_iid" || s == "gaussian") return CoeffModel::GaussianIID;
  throw ParameterError("unknown coefficient model '" + std::string(s) +
                       "' (expected fixed_signs or gaussian_iid)");
}

void ProblemConfig::validate() const {
  require(n_samples >= 1, "n_samples must be >= 1");
  require(dimension >= 1, "dimension must be >= 1");
  require(sparsity >= 1, "sparsity must be >= 1");
  require(sparsity <= dimension, "sparsity must not exceed dimension");
  require(std::isfinite(snr) && snr > 0.0, "snr must be positive");
  require(std::isfinite(sigma2) && sigma2 > 0.0, "sigma2 must be positive");
  require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0, 1]");
  require(nu >= 0.0 && !std::isnan(nu), "nu must be nonnegative");
}

SupportSet::SupportSet(std::vector<int> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  require(std::adjacent_find(indices_.begin(), indices_.end()) == indices_.end(),
          "support indices must be distinct");
  require(indices_.empty() || indices_.front() >= 0,
          "support indices must be nonnegative");
}

bool SupportSet::contains(int k) const {
  return std::binary_search(indices_.begin(), indices_.end(), k);
}

int SupportSet::overlap(const SupportSet& other) const {
  int count = 0;
  auto a = indices_.begin();
  auto b = other.indices_.begin();
  while (a != indices_.end() && b != other.indices_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++count;
      ++a;
      ++b;
    }
  }
  return count;
}

namespace model {

Matrix generate_sensing_matrix(int n, int d, double rho, std::uint64_t seed) {
  require(n >= 1 && d >= 1, "generate_sensing_matrix: dimensions must be positive");
  require(rho >= 0.0 && rho <= 1.0, "generate_sensing_matrix: rho must lie in [0, 1]");
  Rng rng(seed);
  const double shared_sd = std::sqrt(rho / n);
  const double own_sd = std::sqrt((1.0 - rho) / n);
  Matrix x(n, d);
  for (int r = 0; r < n; ++r) {
    const double mu = shared_sd * rng.normal();
    for (int k = 0; k < d; ++k) x(r, k) = mu + own_sd * rng.normal();
  }
  return x;
}

SupportSet sample_support(int d, int k, Rng& rng) {
  require(d >= 1 && k >= 1, "sample_support: D and K must be positive");
  require(k <= d, "sample_support: K must not exceed D");
  // The first k slots of a partial shuffle are a uniform k-subset.
  std::vector<int> pool(d);
  std::iota(pool.begin(), pool.end(), 0);
  for (int j = 0; j < k; ++j) {
    const auto pick = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(d - j)));
    std::swap(pool[j], pool[pick]);
  }
  pool.resize(k);
  return SupportSet(std::move(pool));
}

Signal generate_signal(int d, int k, double sigma2, CoeffModel coeff_model,
                       std::uint64_t seed) {
  require(d >= 1 && k >= 1, "generate_signal: D and K must be positive");
  require(k <= d, "generate_signal: K must not exceed D");
  require(sigma2 > 0.0, "generate_signal: sigma2 must be positive");
  Rng rng(seed);
  Signal s{sample_support(d, k, rng), Vector::Zero(d)};
  const double sigma = std::sqrt(sigma2);
  for (int idx : s.support.indices()) {
    switch (coeff_model) {
      case CoeffModel::FixedSigns:
        s.beta(idx) = rng.coin() ? sigma : -sigma;
        break;
      case CoeffModel::GaussianIID:
        s.beta(idx) = sigma * rng.normal();
        break;
    }
  }
  return s;
}

Vector generate_observations(const Matrix& x, const Vector& beta, double snr,
                             std::uint64_t seed) {
  require(snr > 0.0, "generate_observations: snr must be positive");
  require(x.cols() == beta.size(),
          "generate_observations: beta length must equal the number of columns");
  Rng rng(seed);
  const double noise_sd = 1.0 / std::sqrt(snr);
  Vector y = x * beta;
  for (Eigen::Index r = 0; r < y.size(); ++r) y(r) += noise_sd * rng.normal();
  return y;
}

Matrix corrupt_matrix(const Matrix& x, double nu, std::uint64_t seed) {
  require(nu >= 0.0, "corrupt_matrix: nu must be nonnegative");
  if (nu == 0.0) return x;
  Rng rng(seed);
  const double sd = std::sqrt(nu / static_cast<double>(x.rows()));
  Matrix z = x;
  // Row-major draw order, matching generate_sensing_matrix.
  for (Eigen::Index r = 0; r < z.rows(); ++r)
    for (Eigen::Index c = 0; c < z.cols(); ++c) z(r, c) += sd * rng.normal();
  return z;
}

Dataset generate_dataset(const ProblemConfig& cfg) {
  cfg.validate();
  const auto seed = cfg.seed;
  Dataset ds;
  ds.x = generate_sensing_matrix(cfg.n_samples, cfg.dimension, cfg.rho,
                                 derive_seed(seed, StreamTag::Matrix));
  auto signal = generate_signal(cfg.dimension, cfg.sparsity, cfg.sigma2,
                                cfg.coeff_model, derive_seed(seed, StreamTag::Signal));
  ds.support = std::move(signal.support);
  ds.beta = std::move(signal.beta);
  ds.y = generate_observations(ds.x, ds.beta, cfg.snr,
                               derive_seed(seed, StreamTag::Noise));
  if (cfg.nu > 0.0)
    ds.z = corrupt_matrix(ds.x, cfg.nu, derive_seed(seed, StreamTag::Corruption));
  return ds;
}

}  // namespace model
}  // namespace sparse_limits
