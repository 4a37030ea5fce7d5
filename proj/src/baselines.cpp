#include "seqspin/baselines.hpp"

#include "seqspin/types.hpp"

namespace seqspin::baselines {

const std::vector<SpinValue>& bell_eta_table() {
  static const std::vector<SpinValue> table = {
      {1, 1.4142}, {2, 1.2112}, {3, 1.1817}, {4, 1.17},
      {5, 1.1638}, {6, 1.1599}, {7, 1.1572}, {8, 1.1553},
      {9, 1.1538}, {10, 1.1526}, {11, 1.1517}, {12, 1.1509},
  };
  return table;
}

const std::vector<SpinValue>& mk3_eta_table() {
  static const std::vector<SpinValue> table = {
      {1, 1.4142}, {2, 1.2112}, {3, 1.1234}, {4, 1.0702},
      {5, 1.0351}, {6, 1.0103}, {7, 0.9919}, {8, 0.9778},
      {9, 0.9666}, {10, 0.9575}, {11, 0.9499}, {12, 0.9436},
  };
  return table;
}

const std::vector<XiInterval>& xi_interval_table() {
  static const std::vector<XiInterval> table = {
      {1, 0.0, 1.0},
      {2, 0.0, 0.33},  {2, 0.77, 1.0},
      {3, 0.824, 1.0}, {4, 0.84, 1.0},
      {5, 0.847, 1.0}, {6, 0.851, 1.0},
      {7, 0.854, 1.0}, {8, 0.856, 1.0},
      {9, 0.858, 1.0}, {10, 0.859, 1.0},
      {11, 0.860, 1.0}, {12, 0.862, 1.0},
  };
  return table;
}

const std::vector<SpinValue>& noise_threshold_table() {
  static const std::vector<SpinValue> table = {
      {1, 1.0},   {2, 0.696}, {3, 0.395}, {4, 0.321},
      {5, 0.287}, {6, 0.267}, {7, 0.254}, {8, 0.245},
      {9, 0.239}, {10, 0.234}, {11, 0.230}, {12, 0.227},
  };
  return table;
}

namespace {

double lookup(const std::vector<SpinValue>& table, int twice_s,
              const char* what) {
  for (const SpinValue& e : table)
    if (e.twice_s == twice_s) return e.value;
  throw config_error(std::string("no tabulated ") + what +
                     " for twice_s = " + std::to_string(twice_s));
}

}  // namespace

double bell_eta(int twice_s) {
  return lookup(bell_eta_table(), twice_s, "two-measurement eta");
}

double mk3_eta(int twice_s) {
  return lookup(mk3_eta_table(), twice_s, "three-measurement eta");
}

std::vector<XiInterval> xi_intervals(int twice_s) {
  std::vector<XiInterval> out;
  for (const XiInterval& e : xi_interval_table())
    if (e.twice_s == twice_s) out.push_back(e);
  if (out.empty())
    throw config_error("no tabulated xi intervals for twice_s = " +
                       std::to_string(twice_s));
  return out;
}

double noise_threshold(int twice_s) {
  return lookup(noise_threshold_table(), twice_s, "noise threshold");
}

}  // namespace seqspin::baselines
