#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace merw {

// SplitMix64 step; used only to expand seeds into generator state.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// One reproducible random stream, addressed by (root seed, stream index).
//
// Stream derivation: the stream index is avalanched through the SplitMix64
// finalizer, xored into the root seed, and the resulting value seeds a
// SplitMix64 chain whose first four outputs become the xoshiro256++ state.
// Distinct indices therefore start from unrelated 256-bit states, and a
// given (seed, index) pair reproduces the same sequence on every platform.
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, std::uint64_t stream_index)
      : root_(root_seed), index_(stream_index) {
    std::uint64_t tag = stream_index;
    std::uint64_t mixed = splitmix64_next(tag);
    std::uint64_t sm = root_seed ^ mixed;
    for (auto& word : s_) word = splitmix64_next(sm);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9E3779B97F4A7C15ULL;
  }

  std::uint64_t root_seed() const { return root_; }
  std::uint64_t stream_index() const { return index_; }

  // xoshiro256++ core.
  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 significant bits, one draw.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), one draw.  n must be positive and small
  // enough (n <= 2^53) that the scaled draw cannot round up to n.
  std::uint64_t uniform_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
  }

  // Two independent standard normals (Box-Muller), two draws in fixed order.
  std::pair<double, double> gaussian_pair() {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
  std::uint64_t root_;
  std::uint64_t index_;
};

}  // namespace merw
