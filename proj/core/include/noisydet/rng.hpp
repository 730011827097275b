#pragma once

#include <cstdint>

namespace noisydet {

/// Counter-based 64-bit generator: the k-th output is the SplitMix64
/// finalizer applied to `seed + (k + 1) * 0x9E3779B97F4A7C15`. Any position
/// in the stream can be reached in O(1) with seek(), which is what lets
/// parallel workers reproduce the sequential stream exactly.
///
/// Derived draws have fixed consumption:
///   next_uniform  1 word, 53-bit mantissa in [0, 1)
///   next_normal   2 words, Box-Muller cosine branch
///   next_below    1+ words (rejection on the biased tail)
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) noexcept
      : seed_(seed), counter_(counter) {}

  /// Independent stream for work item `index` under `seed`.
  static CounterRng substream(std::uint64_t seed, std::uint64_t index) noexcept;

  std::uint64_t next_u64() noexcept;
  double next_uniform() noexcept;
  double next_normal(double mean, double stddev) noexcept;
  std::uint64_t next_below(std::uint64_t bound) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }
  void seek(std::uint64_t counter) noexcept { counter_ = counter; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

}  // namespace noisydet
