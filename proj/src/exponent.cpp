#include "sparse_limits/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sparse_limits/combinatorics.hpp"
#include "sparse_limits/errors.hpp"
#include "sparse_limits/numeric.hpp"
#include "sparse_limits/rng.hpp"

namespace sparse_limits {

using detail::require;

namespace {

constexpr double kPmfTolerance = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_pmf(const double* p, int size, const std::string& what) {
  double sum = 0.0;
  for (int j = 0; j < size; ++j) {
    require(p[j] >= 0.0 && std::isfinite(p[j]), what + " has a negative or non-finite entry");
    sum += p[j];
  }
  require(std::abs(sum - 1.0) <= kPmfTolerance, what + " does not sum to 1");
}

std::vector<int> digits_of(std::uint64_t index, int base, int count) {
  std::vector<int> d(count);
  for (int j = count - 1; j >= 0; --j) {
    d[j] = static_cast<int>(index % base);
    index /= base;
  }
  return d;
}

// log P(tuple | theta) for every tuple of `length` IID symbols.
std::vector<double> tuple_log_probs(const std::vector<double>& pmf, int length) {
  const int base = static_cast<int>(pmf.size());
  const auto count = int_pow_saturating(base, length);
  std::vector<double> out(count, 0.0);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    std::uint64_t rest = idx;
    for (int j = 0; j < length; ++j) {
      out[idx] += std::log(pmf[rest % base]);
      rest /= base;
    }
  }
  return out;
}

}  // namespace

DiscreteChannelModel::DiscreteChannelModel(int k, int x_alphabet_size, int y_alphabet_size,
                                           std::vector<Theta> thetas,
                                           std::vector<double> y_given_xs)
    : k_(k),
      x_size_(x_alphabet_size),
      y_size_(y_alphabet_size),
      thetas_(std::move(thetas)),
      y_given_xs_(std::move(y_given_xs)) {
  require(k_ >= 1, "model: k must be >= 1");
  require(x_size_ >= 1 && y_size_ >= 1, "model: alphabets must be nonempty");
  require(!thetas_.empty(), "model: theta support must be nonempty");
  tuple_count_ = int_pow_saturating(x_size_, k_);
  require(static_cast<double>(tuple_count_) * y_size_ <= exponent::kMaxEnumeration,
          "model: conditional table too large");
  require(y_given_xs_.size() == tuple_count_ * static_cast<std::uint64_t>(y_size_),
          "model: y_given_xs must have |X|^K rows of |Y| entries");

  double theta_total = 0.0;
  for (std::size_t t = 0; t < thetas_.size(); ++t) {
    const auto& th = thetas_[t];
    require(th.probability >= 0.0, "model: theta probabilities must be nonnegative");
    theta_total += th.probability;
    require(static_cast<int>(th.x_pmf.size()) == x_size_,
            "model: x pmf size must match the x alphabet");
    check_pmf(th.x_pmf.data(), x_size_, "model: x pmf for theta " + std::to_string(t));
  }
  require(std::abs(theta_total - 1.0) <= kPmfTolerance,
          "model: theta probabilities do not sum to 1");

  for (std::uint64_t t = 0; t < tuple_count_; ++t) {
    check_pmf(&y_given_xs_[t * y_size_], y_size_,
              "model: y pmf for tuple " + std::to_string(t));
    auto sym = digits_of(t, x_size_, k_);
    std::sort(sym.begin(), sym.end());
    const auto canon = tuple_index(sym);
    for (int y = 0; y < y_size_; ++y) {
      require(std::abs(p_y(t, y) - p_y(canon, y)) <= kPmfTolerance,
              "model: y_given_xs is not symmetric under permutations of the support "
              "(tuple " + std::to_string(t) + ")");
    }
  }
}

DiscreteChannelModel DiscreteChannelModel::group_testing(int k, double p, double flip) {
  require(p >= 0.0 && p <= 1.0, "group_testing: p must lie in [0, 1]");
  require(flip >= 0.0 && flip <= 1.0, "group_testing: flip must lie in [0, 1]");
  require(k >= 1 && k <= 40, "group_testing: k must lie in [1, 40]");
  const std::uint64_t tuples = std::uint64_t{1} << k;
  if (static_cast<double>(tuples) * 2 > exponent::kMaxEnumeration)
    throw CapacityError("group_testing: 2^K outcome table exceeds 1e8 entries");
  std::vector<double> table(tuples * 2);
  for (std::uint64_t t = 0; t < tuples; ++t) {
    const bool positive = t != 0;
    table[2 * t + (positive ? 1 : 0)] = 1.0 - flip;
    table[2 * t + (positive ? 0 : 1)] = flip;
  }
  return DiscreteChannelModel(k, 2, 2, {Theta{1.0, {1.0 - p, p}}}, std::move(table));
}

std::uint64_t DiscreteChannelModel::tuple_index(const std::vector<int>& symbols) const {
  std::uint64_t idx = 0;
  for (int s : symbols) idx = idx * x_size_ + static_cast<std::uint64_t>(s);
  return idx;
}

double DiscreteChannelModel::enumeration_size() const {
  return static_cast<double>(thetas_.size()) * static_cast<double>(tuple_count_) * y_size_;
}

namespace exponent {
namespace {

void check_enumeration(const DiscreteChannelModel& model, int i) {
  require(i >= 1 && i <= model.k(), "error count i must lie in [1, K]");
  if (model.enumeration_size() > kMaxEnumeration)
    throw CapacityError("exact enumeration needs " +
                        std::to_string(model.enumeration_size()) +
                        " terms, above the limit of 1e8");
}

std::vector<double> log_table(const DiscreteChannelModel& model) {
  std::vector<double> out(model.tuple_count() * model.y_size());
  for (std::uint64_t t = 0; t < model.tuple_count(); ++t)
    for (int y = 0; y < model.y_size(); ++y)
      out[t * model.y_size() + y] = std::log(model.p_y(t, y));
  return out;
}

// argmax of a concave function on [lo, hi] by golden-section search.
template <class Fn>
std::pair<double, double> golden_max(Fn f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace

double error_exponent(const DiscreteChannelModel& model, int i, double delta) {
  require(delta >= 0.0 && delta <= 1.0, "delta must lie in [0, 1]");
  check_enumeration(model, i);

  const int a = model.x_size();
  const int ny = model.y_size();
  const std::uint64_t n1 = int_pow_saturating(a, i);
  const std::uint64_t n2 = int_pow_saturating(a, model.k() - i);
  const auto log_py = log_table(model);
  const double s = 1.0 / (1.0 + delta);

  numeric::LogSumExp outer;
  for (const auto& th : model.thetas()) {
    if (th.probability == 0.0) continue;
    const double log_theta = std::log(th.probability);
    const auto log_p1 = tuple_log_probs(th.x_pmf, i);
    const auto log_p2 = tuple_log_probs(th.x_pmf, model.k() - i);
    for (std::uint64_t idx2 = 0; idx2 < n2; ++idx2) {
      if (log_p2[idx2] == kNegInf) continue;
      for (int y = 0; y < ny; ++y) {
        numeric::LogSumExp inner;
        for (std::uint64_t idx1 = 0; idx1 < n1; ++idx1) {
          // S1 occupies the leading i positions of the tuple.
          const double lp = log_py[(idx1 * n2 + idx2) * ny + y];
          if (lp == kNegInf) continue;
          inner.add(log_p1[idx1] + s * lp);
        }
        outer.add(log_theta + log_p2[idx2] + (1.0 + delta) * inner.value());
      }
    }
  }
  return -outer.value() / std::numbers::ln2;
}

ExponentCurve exponent_curve(const DiscreteChannelModel& model, int i,
                             const std::vector<double>& deltas) {
  ExponentCurve c;
  c.i_errors = i;
  c.deltas = deltas;
  c.values.reserve(deltas.size());
  for (double d : deltas) c.values.push_back(error_exponent(model, i, d));
  return c;
}

double mutual_information(const DiscreteChannelModel& model, int i) {
  check_enumeration(model, i);

  const int a = model.x_size();
  const int ny = model.y_size();
  const std::uint64_t n1 = int_pow_saturating(a, i);
  const std::uint64_t n2 = int_pow_saturating(a, model.k() - i);

  double info = 0.0;
  std::vector<double> p_y_given_s2(ny);
  for (const auto& th : model.thetas()) {
    if (th.probability == 0.0) continue;
    const auto log_p1 = tuple_log_probs(th.x_pmf, i);
    const auto log_p2 = tuple_log_probs(th.x_pmf, model.k() - i);
    double info_theta = 0.0;
    for (std::uint64_t idx2 = 0; idx2 < n2; ++idx2) {
      const double p2 = std::exp(log_p2[idx2]);
      if (p2 == 0.0) continue;
      std::fill(p_y_given_s2.begin(), p_y_given_s2.end(), 0.0);
      for (std::uint64_t idx1 = 0; idx1 < n1; ++idx1) {
        const double p1 = std::exp(log_p1[idx1]);
        for (int y = 0; y < ny; ++y) p_y_given_s2[y] += p1 * model.p_y(idx1 * n2 + idx2, y);
      }
      double cond = 0.0;
      for (std::uint64_t idx1 = 0; idx1 < n1; ++idx1) {
        const double p1 = std::exp(log_p1[idx1]);
        if (p1 == 0.0) continue;
        for (int y = 0; y < ny; ++y) {
          const double py = model.p_y(idx1 * n2 + idx2, y);
          if (py == 0.0) continue;
          cond += p1 * py * std::log2(py / p_y_given_s2[y]);
        }
      }
      info_theta += p2 * cond;
    }
    info += th.probability * info_theta;
  }
  return std::max(0.0, info);
}

DerivativeCheck derivative_check(const DiscreteChannelModel& model, int i, double h) {
  require(h > 0.0 && h <= 1e-2, "derivative step h must lie in (0, 1e-2]");
  const double e0 = error_exponent(model, i, 0.0);
  const double e1 = error_exponent(model, i, h);
  const double e2 = error_exponent(model, i, 2.0 * h);
  return {(-3.0 * e0 + 4.0 * e1 - e2) / (2.0 * h), mutual_information(model, i)};
}

BoundResult error_bound_general(const DiscreteChannelModel& model, long long n, int d,
                                BoundForm form) {
  const int k = model.k();
  require(n >= 0, "N must be nonnegative");
  require(k <= d, "K must not exceed D");

  std::vector<double> exponents;
  exponents.reserve(k);
  for (int i = 1; i <= k; ++i) {
    const double penalty = bounds::log2_wrong_supports(d, k, i);
    auto objective = [&](double delta) {
      const double weight = form == BoundForm::Stated ? delta : 1.0;
      return static_cast<double>(n) * error_exponent(model, i, delta) - weight * penalty;
    };

    constexpr int kGrid = 101;
    int best_j = 0;
    double best = kNegInf;
    std::vector<double> grid(kGrid);
    for (int j = 0; j < kGrid; ++j) {
      grid[j] = objective(j / 100.0);
      if (grid[j] > best) {
        best = grid[j];
        best_j = j;
      }
    }
    const double lo = std::max(0, best_j - 1) / 100.0;
    const double hi = std::min(kGrid - 1, best_j + 1) / 100.0;
    const auto [delta_star, refined] = golden_max(objective, lo, hi, 1e-6);
    (void)delta_star;
    exponents.push_back(std::max(best, refined));
  }
  return BoundResult::from_exponents(std::move(exponents), 1);
}

DiscreteDataset sample_dataset(const DiscreteChannelModel& model, int n, int d,
                               std::uint64_t seed) {
  require(n >= 0 && d >= model.k(), "sample_dataset: need N >= 0 and D >= K");
  Rng rng(seed);

  auto categorical = [&rng](const double* pmf, int size) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (int j = 0; j < size; ++j) {
      acc += pmf[j];
      if (u < acc) return j;
    }
    // Rounding left u above the cumulative sum; take the last positive entry.
    for (int j = size - 1; j >= 0; --j)
      if (pmf[j] > 0.0) return j;
    return size - 1;
  };

  DiscreteDataset out;
  out.n = n;
  out.d = d;
  out.support = model::sample_support(d, model.k(), rng);
  out.x.resize(static_cast<std::size_t>(n) * d);
  out.y.resize(n);

  std::vector<double> theta_pmf;
  for (const auto& th : model.thetas()) theta_pmf.push_back(th.probability);

  std::vector<int> tuple(model.k());
  for (int r = 0; r < n; ++r) {
    const auto& th = model.thetas()[categorical(theta_pmf.data(), static_cast<int>(theta_pmf.size()))];
    for (int c = 0; c < d; ++c)
      out.x[static_cast<std::size_t>(r) * d + c] = categorical(th.x_pmf.data(), model.x_size());
    for (int j = 0; j < model.k(); ++j) tuple[j] = out.at(r, out.support.indices()[j]);
    const auto t = model.tuple_index(tuple);
    std::vector<double> py(model.y_size());
    for (int y = 0; y < model.y_size(); ++y) py[y] = model.p_y(t, y);
    out.y[r] = categorical(py.data(), model.y_size());
  }
  return out;
}

SupportSet ml_decode(const DiscreteChannelModel& model, const DiscreteDataset& data) {
  const int k = model.k();
  require(data.d >= k, "ml_decode: D must be >= K");
  if (binomial(data.d, k) > 1e6)
    throw CapacityError("ml_decode: C(D, K) exceeds 1e6 candidate supports");
  const auto log_py = log_table(model);

  std::vector<int> best;
  double best_score = kNegInf;
  std::vector<int> tuple(k);
  for_each_combination(data.d, k, [&](const std::vector<int>& cand) {
    if (best.empty()) best = cand;
    double score = 0.0;
    for (int r = 0; r < data.n; ++r) {
      for (int j = 0; j < k; ++j) tuple[j] = data.at(r, cand[j]);
      score += log_py[model.tuple_index(tuple) * model.y_size() + data.y[r]];
      // Log-likelihood terms are <= 0, so the candidate can no longer win.
      if (score <= best_score) return;
    }
    if (score > best_score) {
      best_score = score;
      best = cand;
    }
  });
  return SupportSet(best);
}

}  // namespace exponent
}  // namespace sparse_limits
