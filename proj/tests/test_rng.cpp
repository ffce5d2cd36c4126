#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "franson/rng.hpp"

using namespace franson;

TEST_CASE("counter rng is a pure function of seed and stream ids") {
  CounterRng a(42, {1, 2});
  CounterRng b(42, {1, 2});
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  CounterRng c(42, {1, 3});
  CounterRng d(43, {1, 2});
  CounterRng e(42, {1, 2});
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 10; ++i) {
    const std::uint64_t r = e.next_u64();
    differs_c = differs_c || c.next_u64() != r;
    differs_d = differs_d || d.next_u64() != r;
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("id list chaining differs from id concatenation") {
  // {a, b} must not collide with {a ^ b} or {b, a}
  CounterRng ab(7, {11, 22});
  CounterRng ba(7, {22, 11});
  bool differs = false;
  for (int i = 0; i < 10; ++i) differs = differs || ab.next_u64() != ba.next_u64();
  CHECK(differs);
}

TEST_CASE("uniform01 lies in (0, 1]") {
  CounterRng rng(1, {0});
  for (int i = 0; i < 200000; ++i) {
    const double u = rng.uniform01();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("normal moments") {
  CounterRng rng(5, {9});
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("exponential mean") {
  CounterRng rng(5, {10});
  const int n = 100000;
  const double rate = 3.0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.exponential(rate);
  CHECK(std::abs(sum / n - 1.0 / rate) < 4.0 / (rate * std::sqrt(static_cast<double>(n))));
}

TEST_CASE("poisson moments and edge cases") {
  CounterRng rng(5, {11});
  const int n = 100000;
  const double lambda = 3.7;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = static_cast<double>(rng.poisson(lambda));
    sum += k;
    sum2 += k * k;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean - lambda) < 4.0 * std::sqrt(lambda / n));
  CHECK(std::abs(var - lambda) < 5.0 * lambda / std::sqrt(static_cast<double>(n)));
  CHECK(rng.poisson(0.0) == 0);
  CHECK(rng.poisson(-1.0) == 0);
}

TEST_CASE("mix64 separates neighbouring inputs") {
  CHECK(mix64(0) != mix64(1));
  CHECK(mix64(1) != mix64(2));
  // avalanche: flipping one input bit flips a lot of output bits
  const std::uint64_t d = mix64(12345) ^ mix64(12345 ^ 1ULL);
  int bits = 0;
  for (int i = 0; i < 64; ++i) bits += (d >> i) & 1u;
  CHECK(bits > 16);
  CHECK(bits < 48);
}
