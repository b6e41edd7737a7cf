// rng.hpp
//
// Seeded pseudo-random generation used across the library. The generator is
// pinned to PCG-XSL-RR-128/64 ("pcg64"), seeded exactly like the reference
// pcg_setseq_128 routine with a 64-bit seed and a 64-bit stream selector:
//
//   state = 0; inc = (stream << 1) | 1; step(); state += seed; step();
//   step:   state = state * 0x2360ED051FC65DA44385DF649FCCF645 + inc
//   output: rotr64(hi64(state) ^ lo64(state), state >> 122)   (after step)
//
// Doubles are drawn as (next() >> 11) * 2^-53. Only integer arithmetic is
// involved, so (seed, stream) reproduces the same stream on every platform.
#pragma once

#include <bit>
#include <cstdint>

namespace lacunary {

/// Identifies one independent random stream.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

class Pcg64 {
 public:
  using result_type = std::uint64_t;
  using u128 = unsigned __int128;

  explicit Pcg64(RngSpec spec) {
    inc_ = (static_cast<u128>(spec.stream) << 1) | 1u;
    step();
    state_ += spec.seed;
    step();
  }
  Pcg64(std::uint64_t seed, std::uint64_t stream) : Pcg64(RngSpec{seed, stream}) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return next(); }

  std::uint64_t next() {
    step();
    const auto hi = static_cast<std::uint64_t>(state_ >> 64);
    const auto lo = static_cast<std::uint64_t>(state_);
    const auto rot = static_cast<int>(state_ >> 122);
    return std::rotr(hi ^ lo, rot);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static constexpr u128 kMultiplier =
      (static_cast<u128>(2549297995355413924ULL) << 64) + 4865540595714422341ULL;

  void step() { state_ = state_ * kMultiplier + inc_; }

  u128 state_ = 0;
  u128 inc_ = 1;
};

}  // namespace lacunary
