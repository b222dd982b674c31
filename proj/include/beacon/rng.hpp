#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace beacon {

// Seeded random source whose output is identical on every platform.
// std::mt19937_64 is fully specified by the standard; the distributions in
// <random> are not, so the draws below are written out explicitly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [lo, hi] (inclusive), by rejection.
  std::uint64_t uniform_u64(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo;
    if (span == std::numeric_limits<std::uint64_t>::max()) return next();
    const std::uint64_t range = span + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return lo + x % range;
  }

  std::int64_t uniform_i64(std::int64_t lo, std::int64_t hi) {
    const auto ulo = static_cast<std::uint64_t>(lo);
    const auto span = static_cast<std::uint64_t>(hi) - ulo;
    return static_cast<std::int64_t>(ulo + uniform_u64(0, span));
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform_u64(0, n - 1)); }

  // Uniform real in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool coin() { return (next() >> 63) != 0; }

  // Marsaglia polar method; caches the second deviate.
  double normal(double mean, double stddev) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + stddev * spare_;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return mean + stddev * u * m;
  }

  template <typename Container>
  void shuffle(Container& c) {
    for (std::size_t i = c.size(); i > 1; --i) {
      std::size_t j = index(i);
      using std::swap;
      swap(c[i - 1], c[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace beacon
