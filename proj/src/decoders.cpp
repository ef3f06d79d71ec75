#include "sparse_limits/decoders.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "sparse_limits/combinatorics.hpp"
#include "sparse_limits/errors.hpp"
#include "sparse_limits/numeric.hpp"

namespace sparse_limits {

using detail::require;

void LassoSettings::validate() const {
  require(lambda >= 0.0 && std::isfinite(lambda), "lasso: lambda must be finite and >= 0");
  require(tol > 0.0, "lasso: tol must be positive");
  require(max_iter >= 1, "lasso: max_iter must be >= 1");
}

namespace decoders {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_subset_capacity(int d, int k, const char* who) {
  require(k >= 1 && k <= d, std::string(who) + ": need 1 <= K <= D");
  if (binomial(d, k) > kMaxSubsets)
    throw CapacityError(std::string(who) + ": C(" + std::to_string(d) + ", " +
                        std::to_string(k) + ") exceeds 1e6 candidate supports");
}

Matrix gather_columns(const Matrix& x, const std::vector<int>& cols) {
  Matrix out(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(j) = x.col(cols[j]);
  return out;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

double default_lambda(int d, double snr, LambdaLog log_kind) {
  require(d >= 1 && snr > 0.0, "default_lambda: need D >= 1 and snr > 0");
  const double log_d = log_kind == LambdaLog::Natural ? std::log(static_cast<double>(d))
                                                      : std::log2(static_cast<double>(d));
  return 2.0 * std::sqrt(2.0 * log_d) / std::sqrt(snr);
}

SupportSet top_k_support(const Vector& v, int k) {
  require(k >= 0 && k <= v.size(), "top_k_support: k out of range");
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
    const double fa = std::abs(v(a)), fb = std::abs(v(b));
    return fa > fb || (fa == fb && a < b);
  });
  idx.resize(k);
  return SupportSet(std::move(idx));
}

double lasso_objective(const Matrix& x, const Vector& y, const Vector& b, double lambda,
                       const Vector* weights) {
  const double fit = 0.5 * (y - x * b).squaredNorm();
  const double penalty = weights ? weights->cwiseProduct(b.cwiseAbs()).sum() : b.lpNorm<1>();
  return fit + lambda * penalty;
}

DecoderOutput ml_decode_marginal(const Dataset& ds, const ProblemConfig& cfg) {
  cfg.validate();
  const Matrix& x = ds.observed_matrix();
  const int d = static_cast<int>(x.cols());
  const int k = cfg.sparsity;
  require(d == cfg.dimension && x.rows() == ds.y.size(),
          "ml_decode_marginal: dataset does not match the configuration");
  check_subset_capacity(d, k, "ml_decode_marginal");
  const bool fixed = cfg.coeff_model == CoeffModel::FixedSigns;
  if (fixed && k > 12)
    throw CapacityError("ml_decode_marginal: 2^K sign patterns exceed 4096");

  const Matrix gram = x.transpose() * x;
  const Vector corr = x.transpose() * ds.y;
  const double yy = ds.y.squaredNorm();
  const double sigma = std::sqrt(cfg.sigma2);
  const double snr = cfg.snr;
  const auto n = static_cast<double>(x.rows());

  // FixedSigns: log mean over sign patterns of exp(-snr/2 ||y - sigma X_S s||^2).
  auto fixed_score = [&](const std::vector<int>& s) {
    numeric::LogSumExp acc;
    const unsigned patterns = 1u << k;
    Eigen::VectorXd sg(k);
    for (unsigned m = 0; m < patterns; ++m) {
      for (int j = 0; j < k; ++j) sg(j) = (m >> j) & 1u ? -sigma : sigma;
      double quad = yy;
      for (int a = 0; a < k; ++a) {
        quad -= 2.0 * sg(a) * corr(s[a]);
        for (int b = 0; b < k; ++b) quad += sg(a) * sg(b) * gram(s[a], s[b]);
      }
      acc.add(-0.5 * snr * quad);
    }
    return acc.value();
  };

  // GaussianIID: log N(y; 0, sigma^2 X_S X_S' + I/snr) up to a constant, via
  // the determinant lemma and Woodbury on the K x K matrix
  // M = I + snr sigma^2 X_S' X_S.
  auto gaussian_score = [&](const std::vector<int>& s) {
    Matrix m = Matrix::Identity(k, k);
    Vector c(k);
    for (int a = 0; a < k; ++a) {
      c(a) = corr(s[a]);
      for (int b = 0; b < k; ++b) m(a, b) += snr * cfg.sigma2 * gram(s[a], s[b]);
    }
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) llt.compute(m + 1e-12 * Matrix::Identity(k, k));
    const Matrix& l = llt.matrixL();
    double logdet_m = 0.0;
    for (int a = 0; a < k; ++a) logdet_m += 2.0 * std::log(l(a, a));
    const double logdet = -n * std::log(snr) + logdet_m;
    const double quad = snr * yy - snr * snr * cfg.sigma2 * c.dot(llt.solve(c));
    return -0.5 * (logdet + quad);
  };

  std::vector<int> best;
  double best_score = kNegInf;
  for_each_combination(d, k, [&](const std::vector<int>& s) {
    const double score = fixed ? fixed_score(s) : gaussian_score(s);
    if (best.empty() || score > best_score) {
      best_score = score;
      best = s;
    }
  });

  DecoderOutput out;
  out.support_estimate = SupportSet(best);
  out.iterations = static_cast<int>(binomial(d, k));
  out.objective = best_score;
  return out;
}

DecoderOutput ml_decode_ls(const Matrix& x, const Vector& y, int k) {
  require(x.rows() == y.size(), "ml_decode_ls: rows of x must match length of y");
  const int d = static_cast<int>(x.cols());
  check_subset_capacity(d, k, "ml_decode_ls");

  std::vector<int> best;
  Vector best_coef;
  double best_rss = std::numeric_limits<double>::infinity();
  for_each_combination(d, k, [&](const std::vector<int>& s) {
    const Matrix xs = gather_columns(x, s);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(xs);
    Vector coef = cod.solve(y);
    const double rss = (y - xs * coef).squaredNorm();
    if (best.empty() || rss < best_rss) {
      best_rss = rss;
      best = s;
      best_coef = std::move(coef);
    }
  });

  DecoderOutput out;
  out.support_estimate = SupportSet(best);
  Vector beta = Vector::Zero(d);
  for (int j = 0; j < k; ++j) beta(best[j]) = best_coef(j);
  out.beta_estimate = std::move(beta);
  out.iterations = static_cast<int>(binomial(d, k));
  out.objective = best_rss;
  return out;
}

DecoderOutput lasso(const Matrix& x, const Vector& y, const LassoSettings& settings, int k,
                    const Vector* weights, const Vector* warm_start) {
  settings.validate();
  const auto d = x.cols();
  require(x.rows() == y.size(), "lasso: rows of x must match length of y");
  require(k >= 0 && k <= d, "lasso: k out of range");
  require(!weights || weights->size() == d, "lasso: weights must have length D");
  require(!warm_start || warm_start->size() == d, "lasso: warm start must have length D");

  Vector b = warm_start ? *warm_start : Vector::Zero(d);
  Vector r = y - x * b;
  const Vector col_sq = x.colwise().squaredNorm().transpose();

  DecoderOutput out;
  out.converged = false;
#ifndef NDEBUG
  double previous = lasso_objective(x, y, b, settings.lambda, weights);
#endif
  for (int cycle = 1; cycle <= settings.max_iter; ++cycle) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      double updated = 0.0;
      if (col_sq(j) > 0.0) {
        const double threshold = settings.lambda * (weights ? (*weights)(j) : 1.0);
        const double rho = x.col(j).dot(r) + col_sq(j) * b(j);
        updated = soft_threshold(rho, threshold) / col_sq(j);
      }
      const double change = updated - b(j);
      if (change != 0.0) {
        r.noalias() -= change * x.col(j);
        b(j) = updated;
        max_change = std::max(max_change, std::abs(change));
      }
    }
    out.iterations = cycle;
#ifndef NDEBUG
    const double current = lasso_objective(x, y, b, settings.lambda, weights);
    assert(current <= previous + 1e-9 * std::max(1.0, std::abs(previous)));
    previous = current;
#endif
    if (max_change < settings.tol) {
      out.converged = true;
      break;
    }
  }

  out.objective = lasso_objective(x, y, b, settings.lambda, weights);
  out.support_estimate = top_k_support(b, k);
  out.beta_estimate = std::move(b);
  return out;
}

DecoderOutput reweighted_lasso(const Matrix& x, const Vector& y, const LassoSettings& settings,
                               const ReweightSettings& reweight, int k) {
  require(reweight.eps > 0.0, "reweighted_lasso: eps must be positive");
  require(reweight.outer_max >= 0, "reweighted_lasso: outer_max must be >= 0");

  DecoderOutput out = lasso(x, y, settings, k);
  int cycles = out.iterations;
  bool inner_ok = out.converged;
  bool settled = reweight.outer_max == 0;

  for (int step = 0; step < reweight.outer_max; ++step) {
    const Vector& prev = *out.beta_estimate;
    const Vector w = (prev.cwiseAbs().array() + reweight.eps).inverse().matrix();
    DecoderOutput next = lasso(x, y, settings, k, &w, &prev);
    cycles += next.iterations;
    inner_ok = inner_ok && next.converged;
    const double moved = (*next.beta_estimate - prev).norm();
    out = std::move(next);
    if (moved < reweight.outer_tol) {
      settled = true;
      break;
    }
  }
  out.iterations = cycles;
  out.converged = inner_ok && settled;
  return out;
}

DecoderOutput omp(const Matrix& z, const Vector& y, int k) {
  require(z.rows() == y.size(), "omp: rows of z must match length of y");
  const auto d = z.cols();
  require(k >= 1 && k <= d, "omp: need 1 <= K <= D");

  std::vector<int> chosen;
  std::vector<char> taken(d, 0);
  Vector r = y;
  Vector coef;
  bool full_rank = true;
  for (int step = 0; step < k; ++step) {
    const Vector corr = z.transpose() * r;
    Eigen::Index pick = -1;
    double best = -1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (taken[j]) continue;
      const double v = std::abs(corr(j));
      if (v > best) {
        best = v;
        pick = j;
      }
    }
    taken[pick] = 1;
    chosen.push_back(static_cast<int>(pick));

    const Matrix zs = gather_columns(z, chosen);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(zs);
    if (cod.rank() < static_cast<Eigen::Index>(chosen.size())) full_rank = false;
    coef = cod.solve(y);
    r = y - zs * coef;
  }

  DecoderOutput out;
  Vector beta = Vector::Zero(d);
  for (std::size_t j = 0; j < chosen.size(); ++j) beta(chosen[j]) = coef(j);
  out.support_estimate = SupportSet(chosen);
  out.beta_estimate = std::move(beta);
  out.iterations = k;
  out.objective = r.squaredNorm();
  out.converged = full_rank;
  return out;
}

}  // namespace decoders
}  // namespace sparse_limits
