#pragma once

#include <cmath>
#include <cstdint>
#include <type_traits>
#include <vector>

namespace sparse_limits {

// C(n, k) as a double; exact for the sizes the exhaustive decoders accept.
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                             std::lgamma(n - k + 1.0)));
}

// Calls fn(const std::vector<int>&) for every k-subset of [0, n) in
// lexicographic order. Stops early if fn returns false.
template <class Fn>
void for_each_combination(int n, int k, Fn&& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> c(k);
  for (int j = 0; j < k; ++j) c[j] = j;
  while (true) {
    if constexpr (std::is_same_v<decltype(fn(c)), bool>) {
      if (!fn(static_cast<const std::vector<int>&>(c))) return;
    } else {
      fn(static_cast<const std::vector<int>&>(c));
    }
    int j = k - 1;
    while (j >= 0 && c[j] == n - k + j) --j;
    if (j < 0) return;
    ++c[j];
    for (int m = j + 1; m < k; ++m) c[m] = c[m - 1] + 1;
  }
}

// base^exp for small nonnegative integers, saturating at UINT64_MAX.
inline std::uint64_t int_pow_saturating(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int j = 0; j < exp; ++j) {
    if (base != 0 && r > UINT64_MAX / base) return UINT64_MAX;
    r *= base;
  }
  return r;
}

}  // namespace sparse_limits
