#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace digeco {

// splitmix64 finaliser, used to derive independent seeds.
std::uint64_t mix64(std::uint64_t x);

// Deterministic generator: std::mt19937_64 (fully specified by the C++
// standard) seeded with a single splitmix64-derived word. The distribution
// helpers below are implemented here rather than via <random> distributions,
// whose output is library-specific.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  // Independent sub-stream keyed by the given ids, e.g. derive({run, habitat}).
  Rng derive(std::initializer_list<std::uint64_t> keys) const;

  std::uint64_t next() { return engine_(); }
  // Uniform integer in [lo, hi] inclusive, unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1)); }
  // Uniform in [0,1) with 53 random bits.
  double uniform01();
  bool bernoulli(double p) { return uniform01() < p; }
  // Standard normal via Box-Muller (one value per call, no caching).
  double normal();

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Fisher-Yates using Rng::index, so results do not depend on std::shuffle.
template <class It>
void shuffle(It first, It last, Rng& rng) {
  auto n = static_cast<std::size_t>(last - first);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = rng.index(i);
    std::swap(first[i - 1], first[j]);
  }
}

}  // namespace digeco
