#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "franson/constants.hpp"

namespace franson {

// splitmix64 finalizer; bijective on u64.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based generator: the output sequence is a pure function of
// (seed, stream ids), so chunk-sharded simulation reproduces bit-identically
// for any thread count. Streams are keyed splitmix64 sequences; keys are
// hash-separated so distinct (seed, id...) tuples give unrelated streams.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream_ids) {
    key_ = mix64(seed ^ 0x7F4A7C15F39CC060ULL);
    for (std::uint64_t id : stream_ids) key_ = mix64(key_ ^ id);
  }

  std::uint64_t next_u64() { return mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  // uniform on (0,1]; never returns 0 so log() is safe
  double uniform01() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  // Box-Muller, pair cached
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform01()));
    const double a = kTwoPi * uniform01();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  // Counts arrivals of a unit-rate exponential walk; exact for all lambda,
  // O(lambda) draws.
  std::uint64_t poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    std::uint64_t k = 0;
    double sum = 0.0;
    while (true) {
      sum += exponential(1.0);
      if (sum >= lambda) break;
      ++k;
    }
    return k;
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stream-id tags; keep disjoint so substreams never collide.
namespace stream_tag {
inline constexpr std::uint64_t kSourcePairs = 0x10;
inline constexpr std::uint64_t kSourceSinglesA = 0x11;
inline constexpr std::uint64_t kSourceSinglesB = 0x12;
inline constexpr std::uint64_t kDetection = 0x20;
inline constexpr std::uint64_t kScanPoint = 0x30;
inline constexpr std::uint64_t kMonteCarlo = 0x40;
}  // namespace stream_tag

}  // namespace franson
