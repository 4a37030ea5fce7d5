#include "seqspin/sequential.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "seqspin/spinmath.hpp"

namespace seqspin::sequential {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// DiagonalState

double DiagonalState::moment(int power) const {
  double acc = 0.0;
  for (int k = 0; k < sys.dim(); ++k) {
    double m = sys.eigenvalue(k);
    double term = populations[k];
    for (int p = 0; p < power; ++p) term *= m;
    acc += term;
  }
  return acc;
}

double DiagonalState::xi() const { return moment(2) / (sys.s() * sys.s()); }

void DiagonalState::validate() const {
  if (static_cast<int>(populations.size()) != sys.dim())
    throw config_error("state needs one population per spin level");
  double sum = 0.0;
  for (double p : populations) {
    if (p < -1e-12 || p > 1.0 + 1e-12)
      throw config_error("state populations must lie in [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw config_error("state populations must sum to 1 (got " +
                       std::to_string(sum) + ")");
}

DiagonalState DiagonalState::pure(const SpinSystem& sys, int twice_m,
                                  const Direction& axis) {
  if (twice_m > sys.twice_s || twice_m < -sys.twice_s ||
      (sys.twice_s - twice_m) % 2 != 0)
    throw config_error("pure level must be a valid eigenvalue of the spin");
  DiagonalState st{sys, axis, std::vector<double>(sys.dim(), 0.0)};
  st.populations[(sys.twice_s - twice_m) / 2] = 1.0;
  return st;
}

DiagonalState DiagonalState::pure_max(const SpinSystem& sys,
                                      const Direction& axis) {
  return pure(sys, sys.twice_s, axis);
}

DiagonalState DiagonalState::from_xi(const SpinSystem& sys, double xi,
                                     const Direction& axis) {
  if (xi < 0.0 || xi > 1.0 + 1e-12)
    throw config_error("xi must lie in [0, 1]");
  const double s = sys.s();
  DiagonalState st{sys, axis, std::vector<double>(sys.dim(), 0.0)};
  if (sys.twice_s % 2 == 0) {
    st.populations[0] = 0.5 * xi;
    st.populations[sys.dim() - 1] = 0.5 * xi;
    st.populations[sys.twice_s / 2] += 1.0 - xi;  // the m = 0 level
  } else {
    // Half-integer spins have m^2 >= 1/4 on every level, so chi >= 1/4.
    double w = (xi * s * s - 0.25) / (s * s - 0.25);
    if (w < -1e-12)
      throw config_error(
          "xi below the reachable floor 1/(4 s^2) for a half-integer spin");
    w = std::clamp(w, 0.0, 1.0);
    st.populations[0] = 0.5 * w;
    st.populations[sys.dim() - 1] = 0.5 * w;
    st.populations[(sys.twice_s - 1) / 2] += 0.5 * (1.0 - w);  // m = +1/2
    st.populations[(sys.twice_s + 1) / 2] += 0.5 * (1.0 - w);  // m = -1/2
  }
  return st;
}

DiagonalState DiagonalState::with_noise(double f) const {
  if (f < 0.0 || f > 1.0) throw config_error("noise fraction must be in [0, 1]");
  DiagonalState st = *this;
  const double uniform = f / sys.dim();
  for (double& p : st.populations) p = (1.0 - f) * p + uniform;
  return st;
}

// ---------------------------------------------------------------------------
// MeasurementChain

void MeasurementChain::validate() const {
  if (dirs.empty()) throw config_error("measurement chain needs at least one axis");
  if (conv == Convention::pm_one && sys.twice_s != 1)
    throw config_error("pm_one outcome convention requires spin 1/2");
}

MeasurementChain MeasurementChain::coplanar(
    const SpinSystem& sys, const std::vector<double>& step_angles,
    Convention conv) {
  MeasurementChain chain{sys, {}, conv};
  double polar = 0.0;
  for (double step : step_angles) {
    polar += step;
    chain.dirs.push_back(Direction::coplanar(polar));
  }
  chain.validate();
  return chain;
}

// ---------------------------------------------------------------------------
// Engines

namespace {

constexpr int kPartitions = 256;

void check_compatible(const DiagonalState& state,
                      const MeasurementChain& chain) {
  state.validate();
  chain.validate();
  if (!(state.sys == chain.sys))
    throw config_error("state and chain refer to different spins");
}

// Per-step outcome weights w[i][k] = value(m_k)^(total power on step i+1),
// defaulting to 1 for steps outside the moment subset.
std::vector<std::vector<double>> step_weights(const MeasurementChain& chain,
                                              const std::vector<Moment>& moments) {
  const int d = chain.sys.dim();
  const int n = chain.n();
  std::vector<std::vector<double>> w(n, std::vector<double>(d, 1.0));
  for (const Moment& mom : moments) {
    if (mom.step < 1 || mom.step > n)
      throw config_error("moment step outside the chain");
    if (mom.power < 1) throw config_error("moment power must be >= 1");
    for (int k = 0; k < d; ++k) {
      double v = chain.sys.outcome_value(k, chain.conv);
      for (int p = 0; p < mom.power; ++p) w[mom.step - 1][k] *= v;
    }
  }
  return w;
}

}  // namespace

double joint_probability(const DiagonalState& state,
                         const MeasurementChain& chain,
                         const std::vector<int>& outcomes) {
  check_compatible(state, chain);
  const int d = chain.sys.dim();
  const int n = chain.n();
  if (static_cast<int>(outcomes.size()) != n)
    throw config_error("need exactly one outcome per measurement");
  for (int j : outcomes)
    if (j < 0 || j >= d) throw config_error("outcome index out of range");

  MatrixXd t0 = spinmath::transition_matrix(chain.sys, state.axis, chain.dirs[0]);
  double p = 0.0;
  for (int k = 0; k < d; ++k) p += state.populations[k] * t0(k, outcomes[0]);
  for (int i = 1; i < n; ++i) {
    MatrixXd t =
        spinmath::transition_matrix(chain.sys, chain.dirs[i - 1], chain.dirs[i]);
    p *= t(outcomes[i - 1], outcomes[i]);
  }
  return p;
}

double correlation_enumerated(const DiagonalState& state,
                              const MeasurementChain& chain,
                              const std::vector<Moment>& moments,
                              bool parallel) {
  check_compatible(state, chain);
  const int d = chain.sys.dim();
  const int n = chain.n();

  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    total *= static_cast<std::uint64_t>(d);
    if (total > kEnumerationCap)
      throw config_error("enumeration refused: more than 1e7 outcome sequences");
  }

  auto w = step_weights(chain, moments);

  // First-step marginal with the preparation folded in, then the step
  // kernels; outcome weights are folded into columns so the inner loop is a
  // single multiply per step.
  MatrixXd t0 = spinmath::transition_matrix(chain.sys, state.axis, chain.dirs[0]);
  VectorXd q1 = VectorXd::Zero(d);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) q1(j) += state.populations[k] * t0(k, j);
    q1(j) *= w[0][j];
  }
  std::vector<MatrixXd> ts;
  ts.reserve(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    MatrixXd t =
        spinmath::transition_matrix(chain.sys, chain.dirs[i], chain.dirs[i + 1]);
    for (int k = 0; k < d; ++k) t.col(k) *= w[i + 1][k];
    ts.push_back(std::move(t));
  }

  // Fixed 256-partition grid; each partition accumulates serially and the
  // partials combine in partition order, so the result is bit-identical
  // whether or not the OpenMP kernel runs (and for any thread count).
  std::vector<double> partial(kPartitions, 0.0);
  const std::uint64_t block = (total + kPartitions - 1) / kPartitions;

#pragma omp parallel for schedule(static) if (parallel)
  for (int part = 0; part < kPartitions; ++part) {
    const std::uint64_t lo = block * static_cast<std::uint64_t>(part);
    if (lo >= total) continue;
    const std::uint64_t hi = std::min(total, lo + block);

    // Odometer over outcome digits, least-significant digit last; prefix
    // products are patched from the lowest changed digit on increment.
    std::vector<int> digit(n, 0);
    std::uint64_t rem = lo;
    for (int i = n - 1; i >= 0; --i) {
      digit[i] = static_cast<int>(rem % d);
      rem /= d;
    }
    std::vector<double> prefix(n);
    auto rebuild = [&](int from) {
      for (int i = from; i < n; ++i)
        prefix[i] = (i == 0) ? q1(digit[0])
                             : prefix[i - 1] * ts[i - 1](digit[i - 1], digit[i]);
    };
    rebuild(0);

    double sum = 0.0;
    for (std::uint64_t idx = lo;;) {
      sum += prefix[n - 1];
      if (++idx == hi) break;
      int i = n - 1;
      while (++digit[i] == d) {
        digit[i] = 0;
        --i;
      }
      rebuild(i);
    }
    partial[part] = sum;
  }

  double result = 0.0;
  for (double p : partial) result += p;
  return result;
}

double correlation(const DiagonalState& state, const MeasurementChain& chain,
                   const std::vector<Moment>& moments) {
  check_compatible(state, chain);
  const int d = chain.sys.dim();
  const int n = chain.n();
  auto w = step_weights(chain, moments);

  // Transfer contraction: push the outcome distribution through the chain,
  // weighting each step by its outcome factor. Same sum as the enumeration,
  // reassociated to O(n dim^2).
  RowVectorXd r(d);
  for (int k = 0; k < d; ++k) r(k) = state.populations[k];

  Direction prev = state.axis;
  for (int i = 0; i < n; ++i) {
    r = r * spinmath::transition_matrix(chain.sys, prev, chain.dirs[i]);
    for (int k = 0; k < d; ++k) r(k) *= w[i][k];
    prev = chain.dirs[i];
  }
  return r.sum();
}

// ---------------------------------------------------------------------------
// Closed forms

namespace {

double pm_scale(const DiagonalState& state, Convention conv, int factors) {
  if (conv != Convention::pm_one) return 1.0;
  if (state.sys.twice_s != 1)
    throw config_error("pm_one outcome convention requires spin 1/2");
  double scale = 1.0;
  for (int i = 0; i < factors; ++i) scale *= 2.0;
  return scale;
}

}  // namespace

double closed_one(const DiagonalState& state, double theta1, Convention conv) {
  state.validate();
  return pm_scale(state, conv, 1) * state.moment(1) * std::cos(theta1);
}

double closed_two(const DiagonalState& state, double theta1, double theta12,
                  Convention conv) {
  state.validate();
  const double ss1 = state.sys.s() * (state.sys.s() + 1.0);
  const double chi = state.moment(2);
  const double a = 3.0 * chi - ss1;
  const double b = ss1 - chi;
  const double c1 = std::cos(theta1);
  return pm_scale(state, conv, 2) * 0.5 * std::cos(theta12) *
         (a * c1 * c1 + b);
}

void third_moment_coefficients(const DiagonalState& state, double* p_coeff,
                               double* q_coeff) {
  const double ss1 = state.sys.s() * (state.sys.s() + 1.0);
  const double m1 = state.moment(1);
  const double m3 = state.moment(3);
  *p_coeff = 0.5 * (5.0 * m3 + m1) - 1.5 * m1 * ss1;
  *q_coeff = 1.5 * m1 * ss1 - 1.5 * m3 - 0.5 * m1;
}

double closed_three(const DiagonalState& state, double theta1, double theta12,
                    double theta23, Convention conv) {
  state.validate();
  const double ss1 = state.sys.s() * (state.sys.s() + 1.0);
  const double m1 = state.moment(1);
  double p, q;
  third_moment_coefficients(state, &p, &q);
  const double c1 = std::cos(theta1);
  const double c12 = std::cos(theta12);
  const double s12sq = 1.0 - c12 * c12;
  // <a1 a2 a3> = 1/2 cos(t23) [ s(s+1) m1 c1 sin^2(t12)
  //                             + (3 c12^2 - 1)(P c1^3 + Q c1) ]
  // The (P, Q) pair is the exact first-measurement third moment; P = 0 for
  // s <= 1, where the widely used single-cosine approximation is exact.
  return pm_scale(state, conv, 3) * 0.5 * std::cos(theta23) *
         (ss1 * m1 * c1 * s12sq +
          (3.0 * c12 * c12 - 1.0) * (p * c1 * c1 * c1 + q * c1));
}

double closed_n_aligned(const SpinSystem& sys, int n, double theta1,
                        double theta12, double theta23) {
  if (n < 3) throw config_error("aligned closed form needs n >= 3");
  DiagonalState top = DiagonalState::pure_max(sys);
  double scale = 1.0;
  for (int i = 0; i < n - 3; ++i) scale *= sys.s();
  return scale * closed_three(top, theta1, theta12, theta23);
}

// ---------------------------------------------------------------------------
// Spin-1/2 product identities

double chain_identities_check(const DiagonalState& state,
                              const MeasurementChain& chain) {
  check_compatible(state, chain);
  if (chain.sys.twice_s != 1 || chain.conv != Convention::pm_one)
    throw config_error("chain identities are specific to spin 1/2 in pm_one");
  const int n = chain.n();
  if (n > 20) throw config_error("identity sweep limited to n <= 20");

  // Link cosines c_i = a_{i-1} . a_i with a_0 the preparation axis.
  std::vector<double> link(n + 1, 1.0);
  Direction prev = state.axis;
  for (int i = 1; i <= n; ++i) {
    link[i] = std::cos(angle_between(prev, chain.dirs[i - 1]));
    prev = chain.dirs[i - 1];
  }
  const double u = state.populations[0] - state.populations[1];

  double max_dev = 0.0;

  // Joint distribution factorizes over links.
  const std::uint64_t seqs = std::uint64_t{1} << n;
  for (std::uint64_t bits = 0; bits < seqs; ++bits) {
    std::vector<int> outcome(n);
    std::vector<int> sign(n + 1, 1);
    for (int i = 0; i < n; ++i) {
      outcome[i] = static_cast<int>((bits >> i) & 1);  // 0 <-> +1, 1 <-> -1
      sign[i + 1] = outcome[i] == 0 ? 1 : -1;
    }
    double model = 0.5 * (1.0 + sign[1] * u * link[1]);
    for (int i = 2; i <= n; ++i)
      model *= 0.5 * (1.0 + sign[i - 1] * sign[i] * link[i]);
    max_dev = std::max(max_dev,
                       std::abs(model - joint_probability(state, chain, outcome)));
  }

  // Every subset moment is a product of link-chain cosines, paired off
  // consecutively, with the initial polarization attached when the subset
  // has odd size.
  auto chain_cos = [&](int a, int b) {
    double c = 1.0;
    for (int i = a + 1; i <= b; ++i) c *= link[i];
    return c;
  };
  for (std::uint64_t mask = 1; mask < seqs; ++mask) {
    std::vector<int> steps;
    std::vector<Moment> moments;
    for (int i = 0; i < n; ++i)
      if ((mask >> i) & 1) {
        steps.push_back(i + 1);
        moments.push_back({i + 1, 1});
      }
    double model = 1.0;
    std::size_t first = 0;
    if (steps.size() % 2 == 1) {
      model *= u * chain_cos(0, steps[0]);
      first = 1;
    }
    for (std::size_t r = first; r + 1 < steps.size(); r += 2)
      model *= chain_cos(steps[r], steps[r + 1]);
    max_dev = std::max(
        max_dev, std::abs(model - correlation_enumerated(state, chain, moments,
                                                         /*parallel=*/false)));
  }
  return max_dev;
}

}  // namespace seqspin::sequential
