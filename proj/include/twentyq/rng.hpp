#pragma once

#include <cstdint>
#include <random>

namespace twentyq {

/// Seedable deterministic generator used by every stochastic component.
///
/// All simulation code draws through this wrapper (never through raw
/// std::random distributions with unspecified draw counts for the core
/// Bernoulli/uniform paths), so a fixed seed reproduces a trial exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // modulo bias is irrelevant at our n << 2^64 scales
    return engine_() % n;
  }

  /// Binomial draw; O(1) rejection sampler from the standard library.
  std::uint64_t binomial(std::uint64_t n, double p) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    std::binomial_distribution<std::uint64_t> dist(n, p);
    return dist(engine_);
  }

  double normal(double mean, double stddev) {
    std::normal_distribution<double> dist(mean, stddev);
    return dist(engine_);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace twentyq
