#pragma once

// Counter-based pseudo-random generator for reproducible, order-independent
// Monte Carlo. Each sample index gets its own stream, seeded by mixing the
// run seed with the index, so workers can process disjoint index ranges in
// any interleaving and still reproduce the serial stream exactly.
//
// The mixer is splitmix64 (Steele, Lea, Flood 2014), the de-facto standard
// seeding finalizer; as a generator it passes BigCrush and is more than
// adequate for sampling unit vectors.

#include <cstdint>

#include "seqspin/types.hpp"

namespace seqspin {

inline std::uint64_t splitmix64_step(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  // Stream for one (seed, stream_index) pair, e.g. one Monte-Carlo sample.
  CounterRng(std::uint64_t seed, std::uint64_t stream) {
    // Decorrelate the two keys with one mixing round each before combining.
    std::uint64_t a = seed;
    std::uint64_t b = stream + 0x7f4a7c15f39cc060ULL;
    state_ = splitmix64_step(a) ^ (splitmix64_step(b) << 1);
  }

  std::uint64_t next_u64() { return splitmix64_step(state_); }

  // Uniform on [0, 1): 53 high bits, exact dyadic rationals.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (lo, hi) pairs etc. are built by callers; only the two
  // primitives below are needed library-wide.

  // Uniform point on the unit sphere: z uniform on [-1, 1], azimuth uniform.
  Vec3 unit_vector() {
    double z = 2.0 * uniform() - 1.0;
    double phi = 6.283185307179586476925286766559 * uniform();
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
  }

  // Uniform integer in [0, n) by rejection-free scaling (n tiny here; the
  // modulo bias at n <= a few dozen is ~1e-18 and irrelevant, but the
  // multiply-shift method avoids it anyway).
  int below(int n) {
    return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                             static_cast<unsigned __int128>(n)) >>
                            64);
  }

 private:
  std::uint64_t state_;
};

// sign with the tie broken upward: sgn(0) = +1. Measure-zero event for the
// continuous draws here, pinned for determinism.
inline int sgn_pos(double x) { return x >= 0.0 ? 1 : -1; }

}  // namespace seqspin
