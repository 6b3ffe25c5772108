#pragma once

#include <cstdint>

namespace crested {

// Counter-based SplitMix64 generator (Steele, Lea & Flood 2014).
// The i-th output is mix64(seed + (i+1) * 0x9E3779B97F4A7C15), so a stream is
// fully determined by its 64-bit seed and the draw counter; seeds are portable
// across implementations of the same algorithm.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in {0, ..., n-1}; n is expected to be small, so the
  // floor(u * n) bias (~n / 2^53) is negligible for simulation purposes.
  int below(int n) {
    int v = static_cast<int>(uniform() * n);
    return v < n ? v : n - 1;
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream from (seed, stream index), e.g. one stream per
// simulation replica. Streams with distinct indices are decorrelated by the
// double application of the finalizer.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(SplitMix64::mix(seed ^ SplitMix64::mix(stream + 0xA5A5A5A5A5A5A5A5ULL)));
}

// Inverse-CDF draw from a probability row; u in [0,1).
inline int sample_index(const double* prob, int n, double u) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += prob[i];
    if (u < acc) return i;
  }
  return n - 1;
}

}  // namespace crested
