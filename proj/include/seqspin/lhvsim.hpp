#pragma once

// Monte-Carlo simulation of the classical protocol that reproduces the
// spin-1/2 sequential correlations with two bits of communication per round:
// shared uniform unit vectors, a sign readout against the first vector
// shifted by the preparation axis, and per step two sign bits that carry the
// previous outcome forward.

#include <array>
#include <cstdint>
#include <vector>

#include "seqspin/types.hpp"

namespace seqspin::lhvsim {

struct ProtocolConfig {
  Direction a0;                 // preparation axis
  std::vector<Direction> dirs;  // measurement axes, in order
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 12345;
  double p_minus = 0.0;  // weight of the spin-down preparation

  int n() const { return static_cast<int>(dirs.size()); }
  void validate() const;
};

// Transcript of a single protocol round. cbits[i] holds the two bits sent
// before measurement i+1; cbits[0] is unused (the first measurement receives
// no message).
struct SampleRecord {
  std::vector<int> alphas;
  std::vector<std::array<int, 2>> cbits;
  bool flipped;  // preparation axis inverted for this round
};

SampleRecord run_sample(const ProtocolConfig& cfg, std::uint64_t index);

struct Estimate {
  double mean;
  double se;  // exact binomial standard error for a +-1 product
  std::uint64_t count;
};

// Mean outcome products for the requested subsets (bit i of a mask selects
// measurement i+1). Deterministic for a given seed: sample index keys the
// generator, and sums of +-1 products are integers, so the parallel and
// serial paths agree bit for bit.
std::vector<Estimate> estimate_correlations(
    const ProtocolConfig& cfg, const std::vector<std::uint32_t>& subsets,
    bool parallel = true);

struct QuantumComparison {
  std::uint32_t subset;
  double lhv_mean;
  double lhv_se;
  double quantum;  // exact sequential value for the same configuration
  double z;        // (lhv_mean - quantum) / lhv_se
};

// Estimates every nonempty subset moment and compares against the exact
// spin-1/2 sequential values for the matching preparation.
std::vector<QuantumComparison> verify_against_quantum(const ProtocolConfig& cfg,
                                                      bool parallel = true);

struct NoSignalingCheck {
  std::uint64_t counts[2][4];  // alpha_1 x (c1, c2) contingency at step 2
  double chi_square;           // independence statistic, 3 degrees of freedom
  double p_value;
};

// The two bits sent into step 2 are individually uniform and carry no
// marginal information about the first outcome; this tests that
// independence on the sampled transcripts.
NoSignalingCheck no_signaling_check(const ProtocolConfig& cfg,
                                    bool parallel = true);

}  // namespace seqspin::lhvsim
