#pragma once

// Maximization of violation ratios over measurement settings: the reduced
// single-angle closed forms with their companion cubics, free numeric
// searches over coplanar and fully spherical settings, threshold scans in
// the state parameter xi and the noise fraction f, the n-invariance of the
// aligned MK optimum, the spin-1/2 MK ceiling, and the hybrid combinations.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "seqspin/inequalities.hpp"
#include "seqspin/sequential.hpp"
#include "seqspin/types.hpp"

namespace seqspin::optimizer {

// Coefficients of c3 t^3 + c2 t^2 + c1 t + c0 in t = tan(theta).
struct Cubic {
  double c3, c2, c1, c0;
  double operator()(double t) const {
    return ((c3 * t + c2) * t + c1) * t + c0;
  }
};

// Stationarity cubic of h(theta) = (sin + cos)(K cos^2 + L) on (0, pi/2):
//   L t^3 + (2K - L) t^2 + (3K + L) t - (K + L) = 0.
// The same shape serves the two-measurement reduction (K, L) = (A, B), its
// noisy variant (A', B'), and the three-measurement reduction (M, N).
Cubic reduced_cubic(double k, double l);

// Roots of the cubic inside (lo, hi), found by sign-change bracketing on a
// 10^4-point grid followed by bisection to 1e-12.
std::vector<double> cubic_roots(const Cubic& cubic, double lo, double hi);

struct ReducedOptimum {
  double value;     // max of scale * (sin + cos)(K cos^2 + L), boundary included
  double theta;     // argmax in [0, pi/2]
  double residual;  // |cubic(tan theta)| at an interior optimum, 0 at a boundary
};

ReducedOptimum maximize_reduced(double k, double l, double scale);

struct SearchOptions {
  int restarts = 50;          // random multistarts for the numeric paths
  std::uint64_t seed = 2024;  // seed for the restart draws
  double angle_tol = 1e-10;   // golden-section termination per coordinate
  bool full_sphere = false;   // free the azimuths too (default: coplanar)
};

struct OptimizationResult {
  double eta_max;              // closed-form reduction value (the headline)
  std::vector<double> argmax;  // canonical coplanar polar angles per axis
  double eta_at_argmax;        // exact quantum eta at those settings
  double eta_numeric;          // best eta found by free numeric search
  std::vector<double> argmax_numeric;
  std::string method;          // "closed_form" or "numeric"
  double residual;             // cubic residual at the reduced optimum
};

// Two-measurement Bell ratio over a diagonal state. Closed path: the
// mirror-symmetric coplanar family (theta, pi - theta, pi/2, 0) with
// K = 3 chi - s(s+1), L = s(s+1) - chi. Exact for this family, and the
// numeric path confirms the family is not undershot.
OptimizationResult maximize_bi(const sequential::DiagonalState& state,
                               const SearchOptions& opts = {});

// Three-measurement MK ratio. The closed path evaluates the linearized
// third-moment reduction with
//   M = 9 m3 + m1 (s(s+1) - 3),  N = -3 m3 + m1 (5 s(s+1) + 1)
// on the family (0, 0, theta, pi - theta, pi/2, 0); those are the
// coefficients behind the tabulated reference values, exact only for
// s <= 1. eta_at_argmax and eta_numeric are exact quantum values, so for
// s >= 3/2 they sit above eta_max (see README on the discrepancy).
OptimizationResult maximize_mki(const sequential::DiagonalState& state,
                                const SearchOptions& opts = {});

// The (M, N) pair above, from the state's first and third moments.
std::pair<double, double> mki_reduction_coefficients(
    const sequential::DiagonalState& state);

// Intervals of xi = chi/s^2 in [0, 1] where the closed-form Bell ratio
// exceeds 1, endpoints bisected to 1e-6.
std::vector<std::pair<double, double>> xi_violation_range(const SpinSystem& sys);

// Largest noise fraction f for which the noisy top state still violates
// (1.0 when even the fully mixed state does, as at s = 1/2).
double noise_threshold(const SpinSystem& sys);

struct EtaInvariance {
  int n;
  double eta3;          // numeric three-measurement optimum (exact quantum)
  double eta_n_aligned; // numeric optimum with the first n-3 pairs on a0
  double eta_n_free;    // unconstrained numeric optimum over all n pairs
  double deviation;     // |eta_n_aligned - eta3|
};

// Confirms that pinning the first n-3 settings pairs to the preparation
// axis reduces the n-measurement MK optimum to the three-measurement one on
// the pure m = +s state.
EtaInvariance eta_n_invariance(const SpinSystem& sys, int n,
                               const SearchOptions& opts = {});

struct CeilingReport {
  int n;
  double max_found;      // best |<M_n>| located by the search
  double max_evaluated;  // largest |<M_n>| seen across every evaluation
};

// Spin-1/2 pm_one MK maximum for an n-measurement chain; the quantum
// ceiling is sqrt(2) for every n.
CeilingReport mk_ceiling_search(int n, const SearchOptions& opts = {});

struct HybridSearch {
  inequalities::HybridValue best;  // values at the located optimum of E1
  std::vector<double> argmax1;     // coplanar polar angles for the E1 optimum
  double best2;                    // separately maximized E2
  std::vector<double> argmax2;
};

// Maximizes the two hybrid combinations for spin 1/2 (pm_one) over coplanar
// settings of three pairs.
HybridSearch hybrid_search(const SearchOptions& opts = {});

}  // namespace seqspin::optimizer
