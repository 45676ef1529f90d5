#pragma once

#include <cstdint>

namespace iffca {

// SplitMix64. Small, fast, and fully specified here so that every
// platform produces bit-identical streams; the standard library
// distributions are implementation-defined and would break replays.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0,1), 53 bits of mantissa.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0,n), n >= 1. Multiply-shift; the bias for the
  // tiny n used here (< 2^32) is far below anything observable.
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace detail

// Stream tags. Every random decision in a run is drawn from a substream
// keyed by (run seed, tag, a, b); no generator is shared across concerns,
// so adding or removing draws in one place never shifts another.
inline constexpr std::uint64_t kStreamDecision = 0xD1;   // a = step, b = pedestrian id
inline constexpr std::uint64_t kStreamConflict = 0xC0;   // a = step, b = target cell
inline constexpr std::uint64_t kStreamTrace = 0x7A;      // a = step
inline constexpr std::uint64_t kStreamPlacement = 0xB5;  // placement of pedestrians

inline SplitMix64 substream(std::uint64_t seed, std::uint64_t tag,
                            std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t s = detail::mix64(seed + 0x9E3779B97F4A7C15ull);
  s = detail::mix64(s ^ (tag + 0x9E3779B97F4A7C15ull));
  s = detail::mix64(s ^ (a + 0xBF58476D1CE4E5B9ull));
  s = detail::mix64(s ^ (b + 0x94D049BB133111EBull));
  return SplitMix64(s);
}

}  // namespace iffca
