#pragma once

// Counter-based splittable random streams.  A stream is keyed by
// (seed, stream index); drawing advances a 64-bit counter by the golden
// ratio and pushes it through the splitmix64 finalizer, so any path's
// sequence is reproducible in isolation and parallel consumers stay
// bit-stable under every thread count.

#include <cmath>
#include <cstdint>
#include <utility>

namespace heatlab {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

class CounterRng {
 public:
  // The stream index enters through the mixer rather than as a multiple of
  // the increment: a linear offset would make neighboring streams shifted
  // copies of one sequence, correlating every pair of paths.
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : counter_(detail::mix64(detail::mix64(seed + kGolden) ^
                               detail::mix64(stream + kGolden))) {}

  std::uint64_t next_u64() {
    counter_ += kGolden;
    return detail::mix64(counter_);
  }

  // uniform on (0, 1]: the top 53 bits, shifted off zero so log() is safe
  double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  // uniform on [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller; the partner value is cached
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    constexpr double kTwoPi = 6.28318530717958647692;
    double radius = std::sqrt(-2.0 * std::log(uniform_pos()));
    double angle = kTwoPi * uniform();
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t counter_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace heatlab
