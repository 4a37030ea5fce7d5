#include "seqspin/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "seqspin/rng.hpp"
#include "seqspin/spinmath.hpp"

namespace seqspin::optimizer {

using sequential::DiagonalState;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

}  // namespace

// ---------------------------------------------------------------------------
// Reduced single-angle closed form

Cubic reduced_cubic(double k, double l) {
  return {l, 2.0 * k - l, 3.0 * k + l, -(k + l)};
}

std::vector<double> cubic_roots(const Cubic& cubic, double lo, double hi) {
  std::vector<double> roots;
  const int grid = 10000;
  double prev_t = lo;
  double prev_v = cubic(lo);
  for (int g = 1; g <= grid; ++g) {
    double t = lo + (hi - lo) * g / grid;
    double v = cubic(t);
    if (v == 0.0) {
      roots.push_back(t);
    } else if (prev_v != 0.0 && ((prev_v < 0.0) != (v < 0.0))) {
      double a = prev_t, b = t, fa = prev_v;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (a + b);
        double fm = cubic(mid);
        if (fm == 0.0) {
          a = b = mid;
          break;
        }
        if ((fa < 0.0) != (fm < 0.0)) {
          b = mid;
        } else {
          a = mid;
          fa = fm;
        }
        if (b - a < 1e-12 * std::max(1.0, std::abs(a))) break;
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_t = t;
    prev_v = v;
  }
  return roots;
}

ReducedOptimum maximize_reduced(double k, double l, double scale) {
  auto h = [&](double theta) {
    double c = std::cos(theta);
    return scale * (std::sin(theta) + c) * (k * c * c + l);
  };

  // Candidates: interior stationary points (roots of the companion cubic in
  // tan theta) plus the interval boundaries.
  Cubic cubic = reduced_cubic(k, l);
  ReducedOptimum best{std::abs(h(0.0)), 0.0, 0.0};
  double at_end = std::abs(h(0.5 * kPi));
  if (at_end > best.value) best = {at_end, 0.5 * kPi, 0.0};
  for (double t : cubic_roots(cubic, 0.0, 1e8)) {
    double theta = std::atan(t);
    double v = std::abs(h(theta));
    if (v > best.value) best = {v, theta, std::abs(cubic(t))};
  }
  return best;
}

// ---------------------------------------------------------------------------
// Numeric search machinery

namespace {

// Coplanar MK evaluator: n settings pairs given as polar angles in the x-z
// plane (preparation axis fixed by the state). Transition matrices between
// adjacent slots are built once per configuration and shared by all 2^n
// axis choices.
class MKEvaluator {
 public:
  MKEvaluator(const DiagonalState& state, int n, Convention conv)
      : state_(state), n_(n), conv_(conv), d_(state.sys.dim()) {
    weights_.resize(d_);
    for (int kk = 0; kk < d_; ++kk)
      weights_[kk] = state.sys.outcome_value(kk, conv);
    bound_ = 1.0;
    for (int i = 0; i < n_; ++i)
      bound_ *= conv == Convention::pm_one ? 1.0 : state.sys.s();
    if (state.axis.theta != 0.0 || state.axis.phi != 0.0)
      throw config_error("numeric search assumes the preparation axis at +z");
    terms_ = &inequalities::mk_expansion(n_);
  }

  // angles: 2n coplanar polar angles (unprimed, primed) per slot.
  void set_coplanar(const std::vector<double>& angles) {
    dirs_.resize(2 * n_);
    for (int i = 0; i < 2 * n_; ++i) dirs_[i] = Direction::coplanar(angles[i]);
    rebuild();
  }

  // angles: 4n spherical parameters (theta, phi) x (unprimed, primed).
  void set_spherical(const std::vector<double>& angles) {
    dirs_.resize(2 * n_);
    for (int i = 0; i < 2 * n_; ++i)
      dirs_[i] = Direction{angles[2 * i], angles[2 * i + 1]};
    rebuild();
  }

  double value() const { return evaluate(0); }
  double value_swapped() const {
    return evaluate((std::uint32_t{1} << n_) - 1);
  }
  double bound() const { return bound_; }
  double eta() const { return std::abs(value()) / bound_; }

  // Chain moment for one axis-choice mask (bit i set selects the primed
  // axis of slot i).
  double chain(std::uint32_t mask) const {
    Eigen::RowVectorXd r(d_);
    for (int kk = 0; kk < d_; ++kk) r(kk) = state_.populations[kk];
    for (int i = 0; i < n_; ++i) {
      int choice = (mask >> i) & 1;
      const Eigen::MatrixXd& t =
          i == 0 ? t0_[choice] : steps_[i - 1][((mask >> (i - 1)) & 1) * 2 + choice];
      r = r * t;
      for (int kk = 0; kk < d_; ++kk) r(kk) *= weights_[kk];
    }
    return r.sum();
  }

 private:
  void rebuild() {
    const SpinSystem& sys = state_.sys;
    for (int c = 0; c < 2; ++c)
      t0_[c] = spinmath::transition_matrix(sys, state_.axis, dirs_[c]);
    steps_.resize(n_ - 1);
    for (int i = 0; i + 1 < n_; ++i)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          steps_[i][a * 2 + b] = spinmath::transition_matrix(
              sys, dirs_[2 * i + a], dirs_[2 * (i + 1) + b]);
  }

  // Signed sum of chain moments, with the mask optionally flipped to give
  // the prime-swapped polynomial.
  double evaluate(std::uint32_t flip) const {
    double acc = 0.0;
    for (const inequalities::MKTerm& t : *terms_)
      acc += t.coeff * chain(t.mask ^ flip);
    return acc;
  }

  DiagonalState state_;
  int n_;
  Convention conv_;
  int d_;
  double bound_;
  std::vector<double> weights_;
  std::vector<Direction> dirs_;
  Eigen::MatrixXd t0_[2];
  std::vector<std::array<Eigen::MatrixXd, 4>> steps_;
  const std::vector<inequalities::MKTerm>* terms_;
};

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

double golden_section(const ObjectiveFn& f, std::vector<double>& x, int j,
                      double lo, double hi, double tol) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  x[j] = c;
  double fc = f(x);
  x[j] = d;
  double fd = f(x);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      x[j] = c;
      fc = f(x);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      x[j] = d;
      fd = f(x);
    }
  }
  double mid = 0.5 * (a + b);
  x[j] = mid;
  return f(x);
}

struct AscentResult {
  double value;
  std::vector<double> arg;
};

// Cyclic coordinate maximization: per coordinate a 32-point coarse scan over
// the full period picks the basin, golden section polishes inside it.
AscentResult coordinate_ascent(const ObjectiveFn& f, std::vector<double> x,
                               double tol) {
  const int coarse = 32;
  double best = f(x);
  for (int sweep = 0; sweep < 60; ++sweep) {
    double before = best;
    for (std::size_t j = 0; j < x.size(); ++j) {
      double keep = x[j];
      double bx = keep, bv = best;
      for (int g = 0; g < coarse; ++g) {
        x[j] = kTwoPi * g / coarse;
        double v = f(x);
        if (v > bv) {
          bv = v;
          bx = x[j];
        }
      }
      double span = kTwoPi / coarse;
      double v = golden_section(f, x, j, bx - span, bx + span, tol);
      if (v >= bv) {
        best = v;  // x[j] already holds the golden midpoint
      } else {
        best = bv;
        x[j] = bx;
      }
    }
    if (best - before < 1e-12) break;
  }
  return {best, x};
}

AscentResult multistart(const ObjectiveFn& f,
                        const std::vector<std::vector<double>>& structured,
                        int n_coords, const SearchOptions& opts) {
  AscentResult best{-1e300, {}};
  for (const auto& start : structured) {
    AscentResult r = coordinate_ascent(f, start, opts.angle_tol);
    if (r.value > best.value) best = r;
  }
  for (int rr = 0; rr < opts.restarts; ++rr) {
    CounterRng rng(opts.seed, static_cast<std::uint64_t>(rr));
    std::vector<double> start(n_coords);
    for (double& a : start) a = kTwoPi * rng.uniform();
    AscentResult r = coordinate_ascent(f, start, opts.angle_tol);
    if (r.value > best.value) best = r;
  }
  return best;
}

// Canonical reduced family for the two- and three-measurement combinations:
// the last two slots at (theta, pi - theta) and (pi/2, 0), any leading slots
// pinned to the preparation axis.
std::vector<double> canonical_family(int n, double theta) {
  std::vector<double> angles(2 * n, 0.0);
  angles[2 * (n - 2)] = theta;
  angles[2 * (n - 2) + 1] = kPi - theta;
  angles[2 * (n - 1)] = 0.5 * kPi;
  angles[2 * (n - 1) + 1] = 0.0;
  return angles;
}

}  // namespace

// ---------------------------------------------------------------------------
// Two-measurement optimum

OptimizationResult maximize_bi(const DiagonalState& state,
                               const SearchOptions& opts) {
  state.validate();
  const double s = state.sys.s();
  const double ss1 = s * (s + 1.0);
  const double chi = state.moment(2);
  const double a = 3.0 * chi - ss1;
  const double b = ss1 - chi;

  ReducedOptimum red = maximize_reduced(a, b, 1.0 / (2.0 * s * s));

  OptimizationResult out;
  out.eta_max = red.value;
  out.residual = red.residual;
  out.method = "closed_form";
  out.argmax = canonical_family(2, red.theta);

  MKEvaluator eval(state, 2, Convention::physical);
  eval.set_coplanar(out.argmax);
  out.eta_at_argmax = eval.eta();
  // The two-measurement closed form is exact, so the reduced value must be
  // reproduced by the full quantum evaluation at the canonical settings.
  if (std::abs(out.eta_at_argmax - out.eta_max) > 1e-6)
    throw consistency_error(
        "two-measurement reduction and direct evaluation disagree");

  ObjectiveFn objective;
  int n_coords;
  if (opts.full_sphere) {
    n_coords = 8;
    objective = [&eval](const std::vector<double>& x) {
      eval.set_spherical(x);
      return eval.eta();
    };
  } else {
    n_coords = 4;
    objective = [&eval](const std::vector<double>& x) {
      eval.set_coplanar(x);
      return eval.eta();
    };
  }
  std::vector<std::vector<double>> structured;
  if (opts.full_sphere) {
    std::vector<double> start = {red.theta, 0.0, kPi - red.theta, 0.0,
                                 0.5 * kPi, 0.0, 0.0,            0.0};
    structured.push_back(start);
  } else {
    structured.push_back(out.argmax);
    structured.push_back(canonical_family(2, 0.25 * kPi));
  }
  AscentResult num = multistart(objective, structured, n_coords, opts);
  out.eta_numeric = num.value;
  out.argmax_numeric = num.arg;
  return out;
}

// ---------------------------------------------------------------------------
// Three-measurement optimum

std::pair<double, double> mki_reduction_coefficients(const DiagonalState& state) {
  const double ss1 = state.sys.s() * (state.sys.s() + 1.0);
  const double m1 = state.moment(1);
  const double m3 = state.moment(3);
  return {9.0 * m3 + m1 * (ss1 - 3.0), -3.0 * m3 + m1 * (5.0 * ss1 + 1.0)};
}

OptimizationResult maximize_mki(const DiagonalState& state,
                                const SearchOptions& opts) {
  state.validate();
  const double s = state.sys.s();
  auto [m, n] = mki_reduction_coefficients(state);

  ReducedOptimum red = maximize_reduced(m, n, 1.0 / (16.0 * s * s * s));

  OptimizationResult out;
  out.eta_max = red.value;
  out.residual = red.residual;
  out.method = "closed_form";
  out.argmax = canonical_family(3, red.theta);

  MKEvaluator eval(state, 3, Convention::physical);
  eval.set_coplanar(out.argmax);
  out.eta_at_argmax = eval.eta();

  ObjectiveFn objective;
  int n_coords;
  if (opts.full_sphere) {
    n_coords = 12;
    objective = [&eval](const std::vector<double>& x) {
      eval.set_spherical(x);
      return eval.eta();
    };
  } else {
    n_coords = 6;
    objective = [&eval](const std::vector<double>& x) {
      eval.set_coplanar(x);
      return eval.eta();
    };
  }
  std::vector<std::vector<double>> structured;
  if (!opts.full_sphere) {
    structured.push_back(out.argmax);
    // Embedding start: first pair on the preparation axis turns the last two
    // slots into the two-measurement problem.
    ReducedOptimum bi = maximize_reduced(
        3.0 * state.moment(2) - s * (s + 1.0),
        s * (s + 1.0) - state.moment(2), 1.0 / (2.0 * s * s));
    structured.push_back(canonical_family(3, bi.theta));
  } else {
    std::vector<double> start(12, 0.0);
    start[4] = red.theta;
    start[6] = kPi - red.theta;
    start[8] = 0.5 * kPi;
    structured.push_back(start);
  }
  AscentResult num = multistart(objective, structured, n_coords, opts);
  out.eta_numeric = num.value;
  out.argmax_numeric = num.arg;
  return out;
}

// ---------------------------------------------------------------------------
// Threshold scans

namespace {

double bi_eta_closed(const SpinSystem& sys, double a, double b) {
  return maximize_reduced(a, b, 1.0 / (2.0 * sys.s() * sys.s())).value;
}

}  // namespace

std::vector<std::pair<double, double>> xi_violation_range(const SpinSystem& sys) {
  const double s = sys.s();
  const double ss1 = s * (s + 1.0);
  auto eta_of_xi = [&](double xi) {
    double chi = xi * s * s;
    return bi_eta_closed(sys, 3.0 * chi - ss1, ss1 - chi);
  };

  const int grid = 2000;
  std::vector<std::pair<double, double>> intervals;
  double open_at = -1.0;
  double prev = eta_of_xi(0.0) - 1.0;
  if (prev > 0.0) open_at = 0.0;
  for (int g = 1; g <= grid; ++g) {
    double xi = static_cast<double>(g) / grid;
    double v = eta_of_xi(xi) - 1.0;
    if ((prev > 0.0) != (v > 0.0)) {
      double lo = static_cast<double>(g - 1) / grid, hi = xi;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if ((eta_of_xi(mid) - 1.0 > 0.0) == (prev > 0.0))
          lo = mid;
        else
          hi = mid;
      }
      double edge = 0.5 * (lo + hi);
      if (prev > 0.0) {
        intervals.emplace_back(open_at, edge);
        open_at = -1.0;
      } else {
        open_at = edge;
      }
    }
    prev = v;
  }
  if (open_at >= 0.0) intervals.emplace_back(open_at, 1.0);
  return intervals;
}

double noise_threshold(const SpinSystem& sys) {
  const double s = sys.s();
  auto eta_of_f = [&](double f) {
    double a = (1.0 - f) * (2.0 * s - 1.0) * s;
    double b = (1.0 - f) * s + (2.0 / 3.0) * f * (s + 1.0) * s;
    return bi_eta_closed(sys, a, b);
  };
  if (eta_of_f(0.0) <= 1.0) return 0.0;
  if (eta_of_f(1.0) > 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    (eta_of_f(mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// n-measurement invariance, ceiling, hybrid search

EtaInvariance eta_n_invariance(const SpinSystem& sys, int n,
                               const SearchOptions& opts) {
  if (n < 4 || n > 6) throw config_error("invariance check defined for 4 <= n <= 6");
  DiagonalState top = DiagonalState::pure_max(sys);

  EtaInvariance out;
  out.n = n;
  out.eta3 = maximize_mki(top, opts).eta_numeric;

  MKEvaluator eval(top, n, Convention::physical);
  const int fixed = 2 * (n - 3);

  // Aligned: first n-3 pairs pinned to the preparation axis, the last three
  // free. Free coordinates are appended to the pinned prefix.
  auto aligned_objective = [&](const std::vector<double>& x) {
    std::vector<double> full(2 * n, 0.0);
    std::copy(x.begin(), x.end(), full.begin() + fixed);
    eval.set_coplanar(full);
    return eval.eta();
  };
  ReducedOptimum bi = maximize_reduced(
      3.0 * top.moment(2) - sys.s() * (sys.s() + 1.0),
      sys.s() * (sys.s() + 1.0) - top.moment(2),
      1.0 / (2.0 * sys.s() * sys.s()));
  std::vector<std::vector<double>> starts;
  starts.push_back(canonical_family(3, bi.theta));
  auto [mm, nn] = mki_reduction_coefficients(top);
  starts.push_back(canonical_family(
      3, maximize_reduced(mm, nn, 1.0 / (16.0 * std::pow(sys.s(), 3))).theta));
  AscentResult aligned = multistart(aligned_objective, starts, 6, opts);
  out.eta_n_aligned = aligned.value;

  auto free_objective = [&](const std::vector<double>& x) {
    eval.set_coplanar(x);
    return eval.eta();
  };
  std::vector<std::vector<double>> free_starts;
  std::vector<double> embed(2 * n, 0.0);
  std::copy(aligned.arg.begin(), aligned.arg.end(), embed.begin() + fixed);
  free_starts.push_back(embed);
  AscentResult free_best = multistart(free_objective, free_starts, 2 * n, opts);
  out.eta_n_free = free_best.value;

  out.deviation = std::abs(out.eta_n_aligned - out.eta3);
  return out;
}

CeilingReport mk_ceiling_search(int n, const SearchOptions& opts) {
  if (n < 2 || n > 6) throw config_error("ceiling search defined for 2 <= n <= 6");
  SpinSystem half(1);
  DiagonalState top = DiagonalState::pure_max(half);
  MKEvaluator eval(top, n, Convention::pm_one);

  double max_evaluated = 0.0;
  auto objective = [&](const std::vector<double>& x) {
    eval.set_coplanar(x);
    double v = std::abs(eval.value());
    max_evaluated = std::max(max_evaluated, v);
    return v;
  };

  // Aligned embedding of the two-measurement optimum reaches sqrt(2) for
  // every n; random restarts then probe for anything larger.
  std::vector<double> start(2 * n, 0.0);
  start[2 * (n - 2)] = 0.25 * kPi;
  start[2 * (n - 2) + 1] = 0.75 * kPi;
  start[2 * (n - 1)] = 0.5 * kPi;
  start[2 * (n - 1) + 1] = 0.0;

  AscentResult best = multistart(objective, {start}, 2 * n, opts);
  return {n, best.value, max_evaluated};
}

HybridSearch hybrid_search(const SearchOptions& opts) {
  SpinSystem half(1);
  DiagonalState top = DiagonalState::pure_max(half);

  auto settings_at = [&](const std::vector<double>& x) {
    inequalities::MKSettings st{top, {}, Convention::pm_one};
    for (int i = 0; i < 3; ++i)
      st.pairs.push_back({Direction::coplanar(x[2 * i]),
                          Direction::coplanar(x[2 * i + 1])});
    return st;
  };
  auto value1 = [&](const std::vector<double>& x) {
    return inequalities::hybrid_inequalities(settings_at(x)).value1;
  };
  auto value2 = [&](const std::vector<double>& x) {
    return inequalities::hybrid_inequalities(settings_at(x)).value2;
  };

  // Start near a known violating geometry (equilateral-style angles).
  std::vector<double> seed1 = {0.0,        kPi, 2.0 * kPi / 3.0,
                               kPi,        4.0 * kPi / 3.0,
                               2.0 * kPi / 3.0};

  HybridSearch out;
  AscentResult r1 = multistart(value1, {seed1}, 6, opts);
  out.argmax1 = r1.arg;
  out.best = inequalities::hybrid_inequalities(settings_at(r1.arg));

  AscentResult r2 = multistart(value2, {seed1}, 6, opts);
  out.argmax2 = r2.arg;
  out.best2 = r2.value;
  return out;
}

}  // namespace seqspin::optimizer
