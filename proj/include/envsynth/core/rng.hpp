#pragma once

#include <cstdint>
#include <cstddef>

namespace envsynth {

// Deterministic splittable RNG used everywhere randomness is needed.
//
// The core stream is SplitMix64: the 64-bit state advances by the fixed
// increment 0x9E3779B97F4A7C15 and each output is a bijective mix of the
// state, so the generator is effectively counter-based. Child streams are
// derived from the *construction* seed (not the current state), which makes
// stream layouts independent of how much the parent has been consumed:
//
//   child_seed = mix64(base_seed ^ mix64(stream_id + 0x9E3779B97F4A7C15))
//
// The u64 stream is bit-exact on every platform. Derived doubles use only
// exact IEEE-754 operations (53-bit mantissa scaling); normal deviates use
// Box-Muller on top of that.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed)
      : base_seed_(seed), state_(seed), cached_normal_(0.0), has_cached_(false) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // Uniform in [0, 1), 53 random mantissa bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1]; safe as a log() argument.
  double next_double_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (pairs cached).
  double next_normal();

  // Unbiased uniform index in [0, n); n must be > 0.
  std::size_t next_index(std::size_t n);

  // Independent child stream keyed by (base seed, stream id).
  SeededRng split(std::uint64_t stream_id) const {
    return SeededRng(mix64(base_seed_ ^ mix64(stream_id + 0x9E3779B97F4A7C15ULL)));
  }

  std::uint64_t base_seed() const { return base_seed_; }

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t base_seed_;
  std::uint64_t state_;
  double cached_normal_;
  bool has_cached_;
};

}  // namespace envsynth
