#pragma once

// Joint statistics of n successive projective (Lüders) spin measurements.
//
// The initial state is diagonal in the eigenbasis of S.a0 for some axis a0
// (the only states a Stern-Gerlach preparation can produce). Measuring
// S.a1, ..., S.an in sequence gives the joint outcome distribution
//
//   p(j1, ..., jn) = sum_j0 p_{j0} |<a0,m_j0|a1,m_j1>|^2
//                              * prod_i |<a_{i-1},m_{j_{i-1}}|a_i,m_{j_i}>|^2
//
// i.e. a Markov chain over outcome indices whose step kernels are the
// doubly stochastic transition matrices from spinmath. Two engines compute
// moments of this distribution: a brute-force enumeration over all
// dim^n outcome sequences (the reference; OpenMP-parallel over a fixed
// partition grid with a serial twin), and a transfer-matrix contraction
// (the fast path; the same sum reassociated, exact up to rounding).

#include <cstdint>
#include <vector>

#include "seqspin/types.hpp"

namespace seqspin::sequential {

// Mixed state diagonal in the S.axis eigenbasis. populations[k] is the
// weight of |axis, m_k> with m_k = s - k (index 0 <-> m = +s).
struct DiagonalState {
  SpinSystem sys;
  Direction axis;
  std::vector<double> populations;

  // Spectral moment sum_k p_k m_k^power of the preparation.
  double moment(int power) const;
  // Normalized second moment xi = chi / s^2 in [0 or 1/(4s^2), 1].
  double xi() const;
  void validate() const;

  static DiagonalState pure(const SpinSystem& sys, int twice_m,
                            const Direction& axis = {});
  static DiagonalState pure_max(const SpinSystem& sys,
                                const Direction& axis = {});
  // State with prescribed xi: weight spread over m = +/-s plus either m = 0
  // (integer s) or m = +/-1/2 (half-integer s, which bounds xi below by
  // 1/(4s^2) since m^2 >= 1/4 for every level).
  static DiagonalState from_xi(const SpinSystem& sys, double xi,
                               const Direction& axis = {});
  // (1-f) . this + f/dim . identity
  DiagonalState with_noise(double f) const;
};

// The measurement sequence: axes in the order they are applied.
struct MeasurementChain {
  SpinSystem sys;
  std::vector<Direction> dirs;
  Convention conv = Convention::physical;

  int n() const { return static_cast<int>(dirs.size()); }
  void validate() const;

  // Axes in the x-z plane at cumulative polar angles; step_angles[i] is the
  // angle from axis i to axis i+1 (step_angles[0] from +z).
  static MeasurementChain coplanar(const SpinSystem& sys,
                                   const std::vector<double>& step_angles,
                                   Convention conv = Convention::physical);
};

// One factor alpha_step^power inside a correlation, step in 1..n.
struct Moment {
  int step;
  int power = 1;
};

// Probability of one complete outcome sequence (outcome index per step).
double joint_probability(const DiagonalState& state,
                         const MeasurementChain& chain,
                         const std::vector<int>& outcomes);

// <prod_i alpha_{step_i}^{power_i}> by full enumeration of all dim^n
// outcome sequences. Reference engine: refuses chains with more than
// kEnumerationCap sequences. The parallel flag switches the OpenMP kernel
// on; both paths sum the same fixed 256-partition grid in the same order,
// so their results are bit-identical.
double correlation_enumerated(const DiagonalState& state,
                              const MeasurementChain& chain,
                              const std::vector<Moment>& moments,
                              bool parallel = true);

inline constexpr std::uint64_t kEnumerationCap = 10'000'000;

// Same moment via transfer-matrix contraction, O(n dim^2). Production path.
double correlation(const DiagonalState& state, const MeasurementChain& chain,
                   const std::vector<Moment>& moments);

// Closed forms for the first three chain moments on a coplanar-reduced
// geometry: theta1 = angle(a0, a1), theta12 = angle(a1, a2),
// theta23 = angle(a2, a3). Exact for arbitrary 3D geometry, since each
// depends only on the successive relative angles.
double closed_one(const DiagonalState& state, double theta1,
                  Convention conv = Convention::physical);
double closed_two(const DiagonalState& state, double theta1, double theta12,
                  Convention conv = Convention::physical);
double closed_three(const DiagonalState& state, double theta1, double theta12,
                    double theta23, Convention conv = Convention::physical);

// Third-moment coefficients of the first-measurement outcome distribution,
// <alpha_1^3> = P cos^3(theta1) + Q cos(theta1), as consumed by
// closed_three. P vanishes identically for s <= 1, where m^3 = m/4 resp.
// m^3 = m on every level.
void third_moment_coefficients(const DiagonalState& state, double* p_coeff,
                               double* q_coeff);

// n-step correlation <alpha_1 ... alpha_n> with the first n-3 axes parallel
// to a0 on the pure m = +s state: collapses to s^{n-3} times the three-step
// closed form of the trailing angles.
double closed_n_aligned(const SpinSystem& sys, int n, double theta1,
                        double theta12, double theta23);

// Spin-1/2 product identities in the {-1,+1} convention: p(alpha_vec)
// factorizes over links, pair moments telescope to single cosines, and a
// general subset moment is a product over link chains with the initial
// polarization attached when the subset has odd size. Returns the largest
// absolute deviation between the enumerated distribution and these
// products, over all outcome sequences and all non-empty subsets.
double chain_identities_check(const DiagonalState& state,
                              const MeasurementChain& chain);

}  // namespace seqspin::sequential
