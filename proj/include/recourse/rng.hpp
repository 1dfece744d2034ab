#pragma once

#include <cmath>
#include <cstdint>

namespace recourse {

// splitmix64. Used instead of <random> distributions wherever results must be
// reproducible bit-for-bit: libstdc++ does not pin down distribution
// internals, this does.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform integer in [0, n); n == 0 yields 0
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

  // uniform in [0, 1)
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

  bool chance(double p) { return unit() < p; }

  // standard normal (Box-Muller, one draw per call for simplicity)
  double normal() {
    double u1 = 1.0 - unit();  // (0, 1]
    double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace recourse
