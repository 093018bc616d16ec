#pragma once

#include <complex>
#include <cstdint>

namespace gl3 {

// Counter-based generator: draw k of stream s depends only on (seed, s, k).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t next() { return mix(seed_ ^ mix(stream_ + 0x632be59bd9b4e019ULL) ^ mix(++counter_)); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::complex<double> complex_box(double half_width) {
    const double re = uniform(-half_width, half_width);
    return {re, uniform(-half_width, half_width)};
  }

  CounterRng fork(std::uint64_t sub) const { return CounterRng(seed_, mix(stream_ * 0x9e3779b97f4a7c15ULL + sub)); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace gl3
