#pragma once

// Bell-type inequalities on sequential measurement outcomes: the
// two-measurement Bell combination, the three-measurement Mermin-Klyshko
// combination, their n-measurement recursion, the Svetlichny sum, the
// hybrid two-plus-three combinations, and checks of the hidden-variable
// bound s^n over deterministic outcome assignments.

#include <cstdint>
#include <vector>

#include "seqspin/sequential.hpp"
#include "seqspin/types.hpp"

namespace seqspin::inequalities {

// One measurement slot with its two alternative axes.
struct SettingsPair {
  Direction unprimed;
  Direction primed;
};

// A full inequality configuration: preparation plus n settings pairs.
struct MKSettings {
  sequential::DiagonalState state;
  std::vector<SettingsPair> pairs;
  Convention conv = Convention::physical;

  int n() const { return static_cast<int>(pairs.size()); }
  void validate() const;
};

// One signed term of the expanded MK polynomial: coefficient times the
// product of outcomes, where bit i of mask selects the primed axis for
// measurement i+1.
struct MKTerm {
  double coeff;
  std::uint32_t mask;
};

// Expansion of M_n from the recursion
//   M_1 = alpha_1,  M_n = (M_{n-1}(alpha_n + alpha_n')
//                          + M_{n-1}'(alpha_n - alpha_n')) / 2,
// with M' denoting the prime-swap. Cached per n; n <= 10.
const std::vector<MKTerm>& mk_expansion(int n);

// Evaluate M_n on a deterministic outcome assignment; values[i] is the
// outcome of measurement i+1 on the unprimed axis, values_primed[i] on the
// primed one.
double mk_assignment_value(int n, const std::vector<double>& values,
                           const std::vector<double>& values_primed);

struct MKValue {
  double value;          // <M_n>
  double value_swapped;  // <M_n'>, all primes exchanged
  double hvt_bound;      // s^n (1 for the pm_one convention)
  double eta;            // |value| / hvt_bound
};

// Quantum value of the MK combination: each expansion term is the n-step
// chain moment along its selected axes. The enumerate flag switches the
// per-term engine from transfer contraction to brute-force enumeration.
MKValue mk_expectation(const MKSettings& settings, bool enumerate = false);

// n = 2 and n = 3 specializations (validated), for readable call sites.
MKValue bell_bi(const MKSettings& settings, bool enumerate = false);
MKValue mk_mki(const MKSettings& settings, bool enumerate = false);

struct SvetlichnyValue {
  double value;   // <M_3> + <M_3'>
  double bound;   // 2 s^3
  bool satisfied; // |value| <= bound
};

SvetlichnyValue svetlichny(const MKSettings& settings, bool enumerate = false);

// The two combinations mixing three-measurement and two-measurement chain
// moments (spin 1/2, pm_one):
//   E1 = <123'> - <12'3'> - <1'23'> - <1'2'3> - <12'> - <13'> - <23>
//   E2 = same triples - 2<12'> - 2<13'> - 2<23>
// Pair moments are genuine two-measurement chains of the named axes.
// stated_* are the bounds the combinations were proposed with; the
// deterministic_* fields hold the actual extrema over all 64 deterministic
// +-1 assignments, which disagree with the stated upper bounds.
struct HybridValue {
  double value1, value2;
  double stated_lo1 = -5.0, stated_hi1 = 3.0;
  double stated_lo2 = -8.0, stated_hi2 = 4.0;
  double deterministic_lo1, deterministic_hi1;
  double deterministic_lo2, deterministic_hi2;
};

HybridValue hybrid_inequalities(const MKSettings& settings);

// Extrema of the two hybrid combinations over deterministic assignments.
void hybrid_deterministic_bounds(double* lo1, double* hi1, double* lo2,
                                 double* hi2);

struct HvtBoundCheck {
  double bound;        // s^n
  double max_random;   // largest |M_n| over random ladder assignments
  double max_corner;   // largest |M_n| over all corner assignments (+-s)
  bool attained;       // corner max reaches the bound
  bool exceeded;       // any assignment beat the bound
};

// Evaluates M_n on `trials` random assignments (each slot drawn uniformly
// from the eigenvalue ladder) and on the full 2^(2n) grid of +-s corners.
// The multilinearity of M_n puts its maximum over the outcome box at a
// corner, so together these certify the hidden-variable bound s^n.
HvtBoundCheck hvt_bound_check(const SpinSystem& sys, int n, Convention conv,
                              std::uint64_t trials, std::uint64_t seed);

}  // namespace seqspin::inequalities
