#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace dapip {

// Portable random source. std::mt19937_64 output is fixed by the standard;
// the bounded/real draws below are implemented here instead of using the
// <random> distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Independent stream derived from (seed, stream id).
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform_index(static_cast<std::size_t>(hi - lo + 1)));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Index drawn proportionally to non-negative weights (at least one > 0).
  std::size_t weighted_index(std::span<const double> weights);

  template <class T>
  const T& pick(std::span<const T> items) {
    return items[uniform_index(items.size())];
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a over bytes; used for grammar fingerprints and benchmark streams.
std::uint64_t fnv1a(std::span<const char> bytes,
                    std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace dapip
