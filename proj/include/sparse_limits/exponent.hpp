#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sparse_limits/bounds.hpp"
#include "sparse_limits/model.hpp"

namespace sparse_limits {

// Finite-alphabet observation model P(Y | X_S) with variables that are IID
// given a latent theta drawn from a finite mixture.
//
// Symbols are integers 0..|alphabet|-1. The conditional table is indexed by
// the K-tuple of support symbols in mixed radix (first position most
// significant) and must be invariant under permutations of the tuple.
class DiscreteChannelModel {
 public:
  struct Theta {
    double probability;
    std::vector<double> x_pmf;  // P(X = a | theta), one entry per symbol
  };

  // Validates every pmf (sums to 1 within 1e-12, nonnegative) and the
  // permutation symmetry of y_given_xs; throws ParameterError otherwise.
  // y_given_xs is row-major: |X|^K rows of |Y| probabilities.
  DiscreteChannelModel(int k, int x_alphabet_size, int y_alphabet_size,
                       std::vector<Theta> thetas, std::vector<double> y_given_xs);

  // Boolean group testing: X_k ~ Bernoulli(p) test inclusion, Y = OR over the
  // support, optionally passed through a binary symmetric channel with
  // crossover probability `flip`.
  static DiscreteChannelModel group_testing(int k, double p, double flip = 0.0);

  int k() const noexcept { return k_; }
  int x_size() const noexcept { return x_size_; }
  int y_size() const noexcept { return y_size_; }
  const std::vector<Theta>& thetas() const noexcept { return thetas_; }

  std::uint64_t tuple_count() const noexcept { return tuple_count_; }
  double p_y(std::uint64_t tuple, int y) const {
    return y_given_xs_[tuple * static_cast<std::uint64_t>(y_size_) + y];
  }
  // Mixed-radix index of a K-tuple of symbols.
  std::uint64_t tuple_index(const std::vector<int>& symbols) const;

  // Number of summands a full enumeration visits.
  double enumeration_size() const;

 private:
  int k_;
  int x_size_;
  int y_size_;
  std::vector<Theta> thetas_;
  std::vector<double> y_given_xs_;
  std::uint64_t tuple_count_;
};

// Exponent values over a grid of delta in [0, 1].
struct ExponentCurve {
  std::vector<double> deltas;
  std::vector<double> values;
  int i_errors = 1;
};

enum class BoundForm {
  Stated,  // delta multiplies the combinatorial penalty
  Weak,    // penalty enters undiminished
};

namespace exponent {

// Enumerations larger than this are refused with CapacityError.
inline constexpr double kMaxEnumeration = 1e8;

// Single-letter error exponent E_o(delta) in bits for i support errors.
double error_exponent(const DiscreteChannelModel& model, int i, double delta);

ExponentCurve exponent_curve(const DiscreteChannelModel& model, int i,
                             const std::vector<double>& deltas);

// I(X_S1; Y | X_S2, theta) in bits, |S1| = i.
double mutual_information(const DiscreteChannelModel& model, int i);

struct DerivativeCheck {
  double lhs;  // one-sided second-order difference of E_o at delta = 0
  double rhs;  // mutual information
};

DerivativeCheck derivative_check(const DiscreteChannelModel& model, int i, double h);

// Error-probability bound for N samples over D variables, with delta optimized
// separately for every error count i.
BoundResult error_bound_general(const DiscreteChannelModel& model, long long n, int d,
                                BoundForm form = BoundForm::Stated);

// One simulated instance: x is N x D symbols (row-major), y has N symbols.
struct DiscreteDataset {
  int n = 0;
  int d = 0;
  std::vector<int> x;
  std::vector<int> y;
  SupportSet support;

  int at(int row, int col) const { return x[static_cast<std::size_t>(row) * d + col]; }
};

// theta is drawn independently for each sample row; variables are IID given
// theta; Y is drawn from P(Y | X_S) for a uniform random support.
DiscreteDataset sample_dataset(const DiscreteChannelModel& model, int n, int d,
                               std::uint64_t seed);

// Exhaustive maximum-likelihood support decoder. Ties resolve to the
// lexicographically smallest support.
SupportSet ml_decode(const DiscreteChannelModel& model, const DiscreteDataset& data);

}  // namespace exponent
}  // namespace sparse_limits
