#pragma once

#include <cmath>
#include <cstdint>

namespace ebdim {

// Counter-based generator (splitmix64 finalizer over seed + i*golden).
// The i-th draw depends only on (seed, i), so parallel consumers derived
// from disjoint streams reproduce bit-identically regardless of scheduling.
// The identifier is recorded in run manifests and must stay stable.
inline constexpr const char* kRngAlgorithm = "splitmix64";

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t at(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + counter * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Independent stream for ensemble member / sub-task `id`.
  CounterRng stream(std::uint64_t id) const {
    return CounterRng(at(seed_, 0xD1B54A32D192ED03ull + id));
  }

  std::uint64_t next_u64() { return at(seed_, ++counter_); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Exp with scale lambda (mean lambda)
  double exponential(double scale) { return -scale * std::log1p(-uniform()); }

  bool bernoulli(double p = 0.5) { return uniform() < p; }

  std::uint64_t next_below(std::uint64_t n) { return n ? next_u64() % n : 0; }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace ebdim
