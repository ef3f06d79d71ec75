#pragma once

#include <limits>
#include <span>
#include <vector>

namespace sparse_limits::numeric {

// log(sum_i exp(x_i)). Entries equal to -inf contribute nothing; an empty or
// all -inf input yields -inf.
double log_sum_exp(std::span<const double> x);

// Base-2 analogue: log2(sum_i 2^(x_i)).
double log2_sum_exp2(std::span<const double> x);

// Streaming log-sum-exp accumulator (natural log).
class LogSumExp {
 public:
  void add(double x);
  double value() const;

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

// E[log(1 + c U)] for U ~ Gamma(shape, 1), c >= 0. Trapezoid rule in t = log u
// with a step that shrinks as 1/sqrt(shape); the integrand is analytic in a
// strip around the real axis, so the error decays exponentially in 1/step.
double gamma_log1p_mean(double shape, double c);

}  // namespace sparse_limits::numeric
