#pragma once

// Published reference values the tool compares its own results against
// (--compare-paper). Stored verbatim at the precision they were published
// with; see the README for the cells our computation disagrees with.

#include <vector>

namespace seqspin::baselines {

struct SpinValue {
  int twice_s;
  double value;
};

struct XiInterval {
  int twice_s;
  double lo;
  double hi;
};

// Two-measurement eta_max per spin, s = 1/2 .. 6.
const std::vector<SpinValue>& bell_eta_table();

// Three-measurement eta_max per spin as published, s = 1/2 .. 6. Exact only
// for s <= 1; kept verbatim as the comparison target.
const std::vector<SpinValue>& mk3_eta_table();

// Intervals of xi with a two-measurement violation, per spin. Spin 1 has
// two rows (a low and a high interval).
const std::vector<XiInterval>& xi_interval_table();

// Largest depolarizing-noise fraction with a surviving violation, per spin.
const std::vector<SpinValue>& noise_threshold_table();

// Lookup helpers; throw config_error when the spin is not tabulated.
double bell_eta(int twice_s);
double mk3_eta(int twice_s);
std::vector<XiInterval> xi_intervals(int twice_s);
double noise_threshold(int twice_s);

}  // namespace seqspin::baselines
