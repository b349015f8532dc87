#pragma once

#include <cstdint>

namespace orff::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// splitmix64 finalizer; also used to derive substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Seed of the idx-th substream of a base stream.  Substreams are used for
/// per-frequency, per-grid-point and per-sample draws so results do not
/// depend on evaluation order.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t idx) {
  return mix64(seed + (idx + 1) * kGolden);
}

// Stream purpose tags, so unrelated draws made from one user seed never
// share a substream.
enum Tag : std::uint64_t {
  kFrequencies = 0x11,
  kInputs = 0x22,
  kNoise = 0x33,
  kTheta = 0x44,
  kShuffle = 0x55,
  kPairs = 0x66,
  kDeltas = 0x77,
  kMoments = 0x88,
  kSplit = 0x99,
};

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += kGolden);
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1); safe input for the normal quantile.
  double next_open() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  /// Uniform on [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

/// Standard normal quantile (inverse CDF), Wichura's PPND16 rational
/// approximation, |error| < 1e-15 over (0,1).  Gaussian variates are drawn
/// exclusively through this function: one uniform consumed per variate, so
/// substream layouts are stable and model files can regenerate frequencies
/// from a stored seed.
double normal_quantile(double u);

/// One standard normal variate.
inline double next_normal(SplitMix64& gen) {
  return normal_quantile(gen.next_open());
}

}  // namespace orff::rng
