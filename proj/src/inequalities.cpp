#include "seqspin/inequalities.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "seqspin/rng.hpp"

namespace seqspin::inequalities {

using sequential::MeasurementChain;
using sequential::Moment;

void MKSettings::validate() const {
  state.validate();
  if (pairs.size() < 2) throw config_error("need at least two settings pairs");
  if (pairs.size() > 10) throw config_error("MK combinations limited to n <= 10");
  if (conv == Convention::pm_one && state.sys.twice_s != 1)
    throw config_error("pm_one outcome convention requires spin 1/2");
}

// ---------------------------------------------------------------------------
// MK polynomial expansion

namespace {

std::vector<MKTerm> swap_primes(const std::vector<MKTerm>& terms, int n) {
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  std::vector<MKTerm> out;
  out.reserve(terms.size());
  for (const MKTerm& t : terms) out.push_back({t.coeff, t.mask ^ full});
  return out;
}

void accumulate(std::map<std::uint32_t, double>& into, double coeff,
                std::uint32_t mask) {
  into[mask] += coeff;
}

std::vector<MKTerm> expand(int n) {
  std::vector<MKTerm> terms = {{1.0, 0}};  // M_1 = alpha_1
  for (int k = 2; k <= n; ++k) {
    std::vector<MKTerm> swapped = swap_primes(terms, k - 1);
    const std::uint32_t bit = std::uint32_t{1} << (k - 1);
    std::map<std::uint32_t, double> next;
    for (const MKTerm& t : terms) {
      accumulate(next, 0.5 * t.coeff, t.mask);        // alpha_k
      accumulate(next, 0.5 * t.coeff, t.mask | bit);  // alpha_k'
    }
    for (const MKTerm& t : swapped) {
      accumulate(next, 0.5 * t.coeff, t.mask);         // alpha_k
      accumulate(next, -0.5 * t.coeff, t.mask | bit);  // -alpha_k'
    }
    terms.clear();
    for (auto& [mask, coeff] : next)
      if (coeff != 0.0) terms.push_back({coeff, mask});
  }
  return terms;
}

}  // namespace

const std::vector<MKTerm>& mk_expansion(int n) {
  if (n < 1 || n > 10) throw config_error("MK expansion defined for 1 <= n <= 10");
  static std::map<int, std::vector<MKTerm>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, expand(n)).first;
  return it->second;
}

double mk_assignment_value(int n, const std::vector<double>& values,
                           const std::vector<double>& values_primed) {
  if (static_cast<int>(values.size()) != n ||
      static_cast<int>(values_primed.size()) != n)
    throw config_error("assignment needs one value per slot and per prime");
  double acc = 0.0;
  for (const MKTerm& t : mk_expansion(n)) {
    double prod = t.coeff;
    for (int i = 0; i < n; ++i)
      prod *= ((t.mask >> i) & 1) ? values_primed[i] : values[i];
    acc += prod;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Quantum expectation values

namespace {

double chain_moment(const MKSettings& settings, std::uint32_t mask,
                    bool enumerate) {
  MeasurementChain chain{settings.state.sys, {}, settings.conv};
  const int n = settings.n();
  chain.dirs.reserve(n);
  for (int i = 0; i < n; ++i)
    chain.dirs.push_back(((mask >> i) & 1) ? settings.pairs[i].primed
                                           : settings.pairs[i].unprimed);
  std::vector<Moment> moments;
  moments.reserve(n);
  for (int i = 1; i <= n; ++i) moments.push_back({i, 1});
  return enumerate
             ? sequential::correlation_enumerated(settings.state, chain, moments)
             : sequential::correlation(settings.state, chain, moments);
}

double hvt_bound(const MKSettings& settings) {
  if (settings.conv == Convention::pm_one) return 1.0;
  double b = 1.0;
  for (int i = 0; i < settings.n(); ++i) b *= settings.state.sys.s();
  return b;
}

}  // namespace

MKValue mk_expectation(const MKSettings& settings, bool enumerate) {
  settings.validate();
  const int n = settings.n();
  const auto& terms = mk_expansion(n);
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;

  double value = 0.0;
  double swapped = 0.0;
  for (const MKTerm& t : terms) {
    value += t.coeff * chain_moment(settings, t.mask, enumerate);
    swapped += t.coeff * chain_moment(settings, t.mask ^ full, enumerate);
  }
  const double bound = hvt_bound(settings);
  return {value, swapped, bound, std::abs(value) / bound};
}

MKValue bell_bi(const MKSettings& settings, bool enumerate) {
  if (settings.n() != 2)
    throw config_error("the Bell combination takes exactly two settings pairs");
  return mk_expectation(settings, enumerate);
}

MKValue mk_mki(const MKSettings& settings, bool enumerate) {
  if (settings.n() != 3)
    throw config_error("the MK combination takes exactly three settings pairs");
  return mk_expectation(settings, enumerate);
}

SvetlichnyValue svetlichny(const MKSettings& settings, bool enumerate) {
  MKValue mk = mk_mki(settings, enumerate);
  double bound = 2.0 * mk.hvt_bound;
  double value = mk.value + mk.value_swapped;
  return {value, bound, std::abs(value) <= bound};
}

// ---------------------------------------------------------------------------
// Hybrid combinations

namespace {

// Term tables for the two hybrid combinations. Triples and pairs name the
// slots (1-based) and whether the primed axis is used.
struct HybridTerm {
  double coeff;
  std::vector<std::pair<int, bool>> slots;
};

const std::vector<HybridTerm>& hybrid_triples() {
  static const std::vector<HybridTerm> terms = {
      {+1.0, {{1, false}, {2, false}, {3, true}}},
      {-1.0, {{1, false}, {2, true}, {3, true}}},
      {-1.0, {{1, true}, {2, false}, {3, true}}},
      {-1.0, {{1, true}, {2, true}, {3, false}}},
  };
  return terms;
}

const std::vector<HybridTerm>& hybrid_pairs() {
  static const std::vector<HybridTerm> terms = {
      {-1.0, {{1, false}, {2, true}}},
      {-1.0, {{1, false}, {3, true}}},
      {-1.0, {{2, false}, {3, false}}},
  };
  return terms;
}

double hybrid_chain_moment(const MKSettings& settings, const HybridTerm& term) {
  MeasurementChain chain{settings.state.sys, {}, settings.conv};
  std::vector<Moment> moments;
  int step = 0;
  for (auto [slot, primed] : term.slots) {
    chain.dirs.push_back(primed ? settings.pairs[slot - 1].primed
                                : settings.pairs[slot - 1].unprimed);
    moments.push_back({++step, 1});
  }
  return sequential::correlation(settings.state, chain, moments);
}

double hybrid_assignment(double pair_scale, const double* v, const double* vp) {
  double acc = 0.0;
  for (const HybridTerm& t : hybrid_triples()) {
    double prod = t.coeff;
    for (auto [slot, primed] : t.slots)
      prod *= primed ? vp[slot - 1] : v[slot - 1];
    acc += prod;
  }
  for (const HybridTerm& t : hybrid_pairs()) {
    double prod = t.coeff * pair_scale;
    for (auto [slot, primed] : t.slots)
      prod *= primed ? vp[slot - 1] : v[slot - 1];
    acc += prod;
  }
  return acc;
}

}  // namespace

void hybrid_deterministic_bounds(double* lo1, double* hi1, double* lo2,
                                 double* hi2) {
  *lo1 = *lo2 = 1e300;
  *hi1 = *hi2 = -1e300;
  for (int bits = 0; bits < 64; ++bits) {
    double v[3], vp[3];
    for (int i = 0; i < 3; ++i) {
      v[i] = ((bits >> i) & 1) ? 1.0 : -1.0;
      vp[i] = ((bits >> (i + 3)) & 1) ? 1.0 : -1.0;
    }
    double e1 = hybrid_assignment(1.0, v, vp);
    double e2 = hybrid_assignment(2.0, v, vp);
    *lo1 = std::min(*lo1, e1);
    *hi1 = std::max(*hi1, e1);
    *lo2 = std::min(*lo2, e2);
    *hi2 = std::max(*hi2, e2);
  }
}

HybridValue hybrid_inequalities(const MKSettings& settings) {
  settings.validate();
  if (settings.n() != 3)
    throw config_error("hybrid combinations take exactly three settings pairs");
  if (settings.conv != Convention::pm_one)
    throw config_error("hybrid combinations are defined in the pm_one convention");

  double triples = 0.0;
  for (const HybridTerm& t : hybrid_triples())
    triples += t.coeff * hybrid_chain_moment(settings, t);
  double pairs = 0.0;
  for (const HybridTerm& t : hybrid_pairs())
    pairs += t.coeff * hybrid_chain_moment(settings, t);

  HybridValue out;
  out.value1 = triples + pairs;
  out.value2 = triples + 2.0 * pairs;
  hybrid_deterministic_bounds(&out.deterministic_lo1, &out.deterministic_hi1,
                              &out.deterministic_lo2, &out.deterministic_hi2);
  return out;
}

// ---------------------------------------------------------------------------
// Hidden-variable bound checks

HvtBoundCheck hvt_bound_check(const SpinSystem& sys, int n, Convention conv,
                              std::uint64_t trials, std::uint64_t seed) {
  if (n < 2 || n > 10) throw config_error("bound check defined for 2 <= n <= 10");
  if (conv == Convention::pm_one && sys.twice_s != 1)
    throw config_error("pm_one outcome convention requires spin 1/2");

  const int d = sys.dim();
  const double scale = conv == Convention::pm_one ? 2.0 : 1.0;
  const auto& terms = mk_expansion(n);
  auto evaluate = [&](const double* v, const double* vp) {
    double acc = 0.0;
    for (const MKTerm& t : terms) {
      double prod = t.coeff;
      for (int i = 0; i < n; ++i)
        prod *= ((t.mask >> i) & 1) ? vp[i] : v[i];
      acc += prod;
    }
    return acc;
  };

  HvtBoundCheck out;
  out.bound = 1.0;
  for (int i = 0; i < n; ++i) out.bound *= scale * sys.s();

  std::vector<double> v(n), vp(n);

  // Random assignments: every slot uniform over the eigenvalue ladder.
  out.max_random = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    CounterRng rng(seed, t);
    for (int i = 0; i < n; ++i) {
      v[i] = scale * sys.eigenvalue(rng.below(d));
      vp[i] = scale * sys.eigenvalue(rng.below(d));
    }
    out.max_random = std::max(out.max_random,
                              std::abs(evaluate(v.data(), vp.data())));
  }

  // Corner grid: the maximum of the multilinear M_n over the outcome box
  // sits at a +-s corner, so sweeping all 2^(2n) corners is exact.
  out.max_corner = 0.0;
  const double top = scale * sys.s();
  for (std::uint32_t bits = 0; bits < (std::uint32_t{1} << (2 * n)); ++bits) {
    for (int i = 0; i < n; ++i) {
      v[i] = ((bits >> i) & 1) ? top : -top;
      vp[i] = ((bits >> (n + i)) & 1) ? top : -top;
    }
    out.max_corner = std::max(out.max_corner,
                              std::abs(evaluate(v.data(), vp.data())));
  }

  out.attained = std::abs(out.max_corner - out.bound) <= 1e-9 * out.bound;
  out.exceeded =
      std::max(out.max_random, out.max_corner) > out.bound * (1.0 + 1e-12) + 1e-12;
  return out;
}

}  // namespace seqspin::inequalities
