#pragma once

#include <cstdint>

namespace freeseg {

/// Deterministic generator used for every random draw in the pipeline.
///
/// The core is splitmix64. All derived draws (bounded integers, reals,
/// Bernoulli) are fully specified here rather than delegated to <random>
/// distributions, so a given seed reproduces byte-identical output on any
/// platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, n). n must be > 0. Multiply-shift bounding; the bias is
  /// below 2^-32 for any n this pipeline draws.
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    uniform_index(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) { return lo + uniform_real() * (hi - lo); }

  /// True with probability p. p = 0 never fires, p = 1 always fires.
  bool bernoulli(double p) { return uniform_real() < p; }

 private:
  std::uint64_t state_;
};

/// Mixes (root_seed, index) into one substream seed with two splitmix64
/// steps. Scene index i always draws from substream(seed, i), which makes
/// parallel generation order-independent.
inline Rng substream(std::uint64_t root_seed, std::uint64_t index) {
  Rng mixer(root_seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  std::uint64_t s = mixer.next_u64();
  Rng stream(s);
  return Rng(stream.next_u64());
}

}  // namespace freeseg
