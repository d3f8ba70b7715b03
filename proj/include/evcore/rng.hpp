#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace evcore {

// splitmix64: z += 0x9E3779B97F4A7C15; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
// z = (z ^ (z >> 27)) * 0x94D049BB133111EB; return z ^ (z >> 31).
std::uint64_t splitmix64(std::uint64_t& state);

// xoshiro256** seeded by four splitmix64 draws. Every derived quantity below is
// defined by explicit arithmetic so streams are reproducible in any language.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for (seed, stream), e.g. the per-epoch shuffle.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  // (next_u64() >> 11) * 2^-53, in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  // Box-Muller using two uniforms; the second variate is discarded.
  double normal();
  // Uniform integer in [0, n): mask to the next power of two and reject.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates from the back.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t s_[4];
};

}  // namespace evcore
