#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace sparse_limits {

// SplitMix64 finalizer. Used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Logical draw streams. Every random quantity in a trial is drawn from the
// substream keyed by (master seed, tag, index), so results never depend on
// the order in which trials are scheduled.
enum class StreamTag : std::uint64_t {
  Matrix = 1,
  Signal = 2,
  Noise = 3,
  Corruption = 4,
  Trial = 5,
  Discrete = 6,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, StreamTag tag,
                                    std::uint64_t index = 0) noexcept {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ (static_cast<std::uint64_t>(tag) * 0xd1b54a32d192ed03ULL));
  return mix64(h ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// Deterministic generator: std::mt19937_64 is bit-specified by the standard,
// and the uniform/normal transforms below are fixed (53-bit mantissa uniform,
// Box-Muller with the cosine branch only), so outputs are identical across
// platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  Rng(std::uint64_t master, StreamTag tag, std::uint64_t index = 0)
      : engine_(derive_seed(master, tag, index)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }

  // Uniform integer on [0, n). Lemire-style rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  bool coin(double p = 0.5) { return uniform() < p; }

  double normal() {
    const double u1 = uniform_open0();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) {
    return mean + stddev * normal();
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sparse_limits
