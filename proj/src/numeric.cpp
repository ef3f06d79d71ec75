#include "sparse_limits/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "sparse_limits/errors.hpp"

namespace sparse_limits::numeric {

double log_sum_exp(std::span<const double> x) {
  LogSumExp acc;
  for (double v : x) acc.add(v);
  return acc.value();
}

double log2_sum_exp2(std::span<const double> x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(x.begin(), x.end());
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp2(v - m);
  return m + std::log2(s);
}

void LogSumExp::add(double x) {
  if (x == -std::numeric_limits<double>::infinity()) return;
  if (x <= max_) {
    sum_ += std::exp(x - max_);
  } else {
    sum_ = sum_ * std::exp(max_ - x) + 1.0;
    max_ = x;
  }
}

double LogSumExp::value() const {
  if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
  return max_ + std::log(sum_);
}

double gamma_log1p_mean(double shape, double c) {
  detail::require(shape > 0.0, "gamma_log1p_mean: shape must be positive");
  detail::require(c >= 0.0 && std::isfinite(c), "gamma_log1p_mean: c must be finite and >= 0");
  if (c == 0.0) return 0.0;
  const double h = std::min(0.1, 0.4 / std::sqrt(shape));
  const double t_lo = std::max(-60.0, -90.0 / (shape + 1.0));
  const double t_hi = std::log(shape + 40.0 + 12.0 * std::sqrt(shape));
  const double log_norm = std::lgamma(shape);
  double sum = 0.0;
  for (double t = t_hi; t >= t_lo; t -= h) {
    const double log_w = shape * t - std::exp(t) - log_norm;
    if (log_w < -745.0) continue;
    sum += std::exp(log_w) * std::log1p(c * std::exp(t));
  }
  return h * sum;
}

}  // namespace sparse_limits::numeric
