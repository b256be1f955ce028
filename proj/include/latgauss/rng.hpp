#pragma once

#include <cstdint>
#include <limits>

namespace latgauss {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-keyed stream: Rng(seed, k) is the same sequence no matter which thread
// or in which order streams are created.
class Rng {
 public:
  using result_type = std::uint64_t;
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    std::uint64_t t = stream ^ 0xD1B54A32D192ED03ULL;
    std::uint64_t b = splitmix64(t);
    state_ = a ^ (b * 0xA24BAED4963EE407ULL);
  }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return splitmix64(state_); }

  // Uniform in [0, 1) with a full 64-bit mantissa.
  long double uniform() { return static_cast<long double>((*this)()) * 0x1p-64L; }

  // Uniform in [0, n), unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = max() - max() % n;
    for (;;) {
      std::uint64_t v = (*this)();
      if (v < limit) return v % n;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace latgauss
