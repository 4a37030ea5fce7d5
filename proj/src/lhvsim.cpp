#include "seqspin/lhvsim.hpp"

#include <cmath>

#include "seqspin/rng.hpp"
#include "seqspin/sequential.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace seqspin::lhvsim {

namespace {

// Fixed partition grid: each partition accumulates serially and the results
// are merged in partition order, so thread count never changes a result.
constexpr int kPartitions = 1024;

// One protocol round. Writes the n outcomes as sign bits (bit i set means
// alpha_{i+1} = -1) and, when asked, the two bits sent into step 2. The
// lambda vectors are consumed strictly in draw order, so none are stored.
std::uint32_t run_round(const Vec3& a0, const Vec3* axes, int n,
                        double p_minus, std::uint64_t seed, std::uint64_t idx,
                        int* step2_bits, bool* flipped_out) {
  CounterRng rng(seed, idx);
  bool flipped = rng.uniform() < p_minus;  // always drawn, even for p_minus=0
  Vec3 prep = flipped ? a0 * -1.0 : a0;
  if (flipped_out) *flipped_out = flipped;

  Vec3 l0 = rng.unit_vector();
  int prev = sgn_pos(axes[0].dot(l0 + prep));
  std::uint32_t neg = prev < 0 ? 1u : 0u;
  for (int i = 1; i < n; ++i) {
    Vec3 l1 = rng.unit_vector();
    Vec3 l2 = rng.unit_vector();
    int c1 = prev * sgn_pos(axes[i - 1].dot(l1));
    int c2 = prev * sgn_pos(axes[i - 1].dot(l2));
    if (i == 1 && step2_bits) {
      step2_bits[0] = c1;
      step2_bits[1] = c2;
    }
    prev = sgn_pos(axes[i].dot(l1 * static_cast<double>(c1) +
                               l2 * static_cast<double>(c2)));
    if (prev < 0) neg |= 1u << i;
  }
  return neg;
}

std::vector<Vec3> axis_vectors(const ProtocolConfig& cfg) {
  std::vector<Vec3> axes(cfg.dirs.size());
  for (std::size_t i = 0; i < cfg.dirs.size(); ++i) axes[i] = cfg.dirs[i].unit();
  return axes;
}

}  // namespace

void ProtocolConfig::validate() const {
  if (dirs.empty() || dirs.size() > 20)
    throw config_error("protocol needs between 1 and 20 measurement axes");
  if (samples == 0) throw config_error("sample count must be positive");
  if (p_minus < 0.0 || p_minus > 1.0)
    throw config_error("spin-down weight must lie in [0, 1]");
}

SampleRecord run_sample(const ProtocolConfig& cfg, std::uint64_t index) {
  cfg.validate();
  const int n = cfg.n();
  std::vector<Vec3> axes = axis_vectors(cfg);

  // Re-run with full transcript capture: mirror run_round but keep the
  // per-step bits. Kept separate so the hot path stays allocation free.
  CounterRng rng(cfg.seed, index);
  SampleRecord rec;
  rec.flipped = rng.uniform() < cfg.p_minus;
  Vec3 prep = rec.flipped ? cfg.a0.unit() * -1.0 : cfg.a0.unit();
  rec.alphas.resize(n);
  rec.cbits.assign(n, {0, 0});

  Vec3 l0 = rng.unit_vector();
  int prev = sgn_pos(axes[0].dot(l0 + prep));
  rec.alphas[0] = prev;
  for (int i = 1; i < n; ++i) {
    Vec3 l1 = rng.unit_vector();
    Vec3 l2 = rng.unit_vector();
    int c1 = prev * sgn_pos(axes[i - 1].dot(l1));
    int c2 = prev * sgn_pos(axes[i - 1].dot(l2));
    rec.cbits[i] = {c1, c2};
    prev = sgn_pos(axes[i].dot(l1 * static_cast<double>(c1) +
                               l2 * static_cast<double>(c2)));
    rec.alphas[i] = prev;
  }
  return rec;
}

std::vector<Estimate> estimate_correlations(
    const ProtocolConfig& cfg, const std::vector<std::uint32_t>& subsets,
    bool parallel) {
  cfg.validate();
  const int n = cfg.n();
  for (std::uint32_t m : subsets)
    if (m == 0 || m >= (std::uint32_t{1} << n))
      throw config_error("subset mask out of range for the axis count");

  const std::vector<Vec3> axes = axis_vectors(cfg);
  const Vec3 a0 = cfg.a0.unit();
  const std::size_t n_sub = subsets.size();
  std::vector<std::vector<std::int64_t>> acc(
      kPartitions, std::vector<std::int64_t>(n_sub, 0));

#pragma omp parallel for schedule(static) if (parallel)
  for (int p = 0; p < kPartitions; ++p) {
    std::uint64_t begin = cfg.samples * static_cast<std::uint64_t>(p) / kPartitions;
    std::uint64_t end =
        cfg.samples * (static_cast<std::uint64_t>(p) + 1) / kPartitions;
    std::vector<std::int64_t>& local = acc[p];
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      std::uint32_t neg = run_round(a0, axes.data(), n, cfg.p_minus, cfg.seed,
                                    idx, nullptr, nullptr);
      for (std::size_t k = 0; k < n_sub; ++k) {
        int parity = __builtin_popcount(neg & subsets[k]) & 1;
        local[k] += 1 - 2 * parity;
      }
    }
  }

  std::vector<Estimate> out(n_sub);
  for (std::size_t k = 0; k < n_sub; ++k) {
    std::int64_t total = 0;
    for (int p = 0; p < kPartitions; ++p) total += acc[p][k];
    double mean = static_cast<double>(total) / static_cast<double>(cfg.samples);
    double var = std::max(0.0, 1.0 - mean * mean);
    double se = cfg.samples > 1
                    ? std::sqrt(var / static_cast<double>(cfg.samples - 1))
                    : 1.0;
    out[k] = {mean, se, cfg.samples};
  }
  return out;
}

std::vector<QuantumComparison> verify_against_quantum(const ProtocolConfig& cfg,
                                                      bool parallel) {
  cfg.validate();
  const int n = cfg.n();
  if (n > 20) throw config_error("subset sweep limited to 20 axes");

  std::vector<std::uint32_t> subsets;
  for (std::uint32_t m = 1; m < (std::uint32_t{1} << n); ++m)
    subsets.push_back(m);
  std::vector<Estimate> est = estimate_correlations(cfg, subsets, parallel);

  SpinSystem half(1);
  sequential::DiagonalState state{
      half, cfg.a0, {1.0 - cfg.p_minus, cfg.p_minus}};
  sequential::MeasurementChain chain{half, cfg.dirs, Convention::pm_one};

  std::vector<QuantumComparison> out(subsets.size());
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    std::vector<sequential::Moment> moments;
    for (int i = 0; i < n; ++i)
      if (subsets[k] & (1u << i)) moments.push_back({i + 1, 1});
    double q = sequential::correlation(state, chain, moments);
    double z = est[k].se > 0.0 ? (est[k].mean - q) / est[k].se : 0.0;
    out[k] = {subsets[k], est[k].mean, est[k].se, q, z};
  }
  return out;
}

NoSignalingCheck no_signaling_check(const ProtocolConfig& cfg, bool parallel) {
  cfg.validate();
  if (cfg.n() < 2)
    throw config_error("the signaling check needs at least two measurements");

  const std::vector<Vec3> axes = axis_vectors(cfg);
  const Vec3 a0 = cfg.a0.unit();
  const int n = cfg.n();
  std::vector<std::array<std::uint64_t, 8>> acc(kPartitions,
                                                std::array<std::uint64_t, 8>{});

#pragma omp parallel for schedule(static) if (parallel)
  for (int p = 0; p < kPartitions; ++p) {
    std::uint64_t begin = cfg.samples * static_cast<std::uint64_t>(p) / kPartitions;
    std::uint64_t end =
        cfg.samples * (static_cast<std::uint64_t>(p) + 1) / kPartitions;
    std::array<std::uint64_t, 8>& local = acc[p];
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      int bits[2] = {0, 0};
      std::uint32_t neg = run_round(a0, axes.data(), n, cfg.p_minus, cfg.seed,
                                    idx, bits, nullptr);
      int row = neg & 1u ? 1 : 0;
      int col = (bits[0] < 0 ? 2 : 0) | (bits[1] < 0 ? 1 : 0);
      ++local[row * 4 + col];
    }
  }

  NoSignalingCheck out{};
  for (int p = 0; p < kPartitions; ++p)
    for (int c = 0; c < 8; ++c) out.counts[c / 4][c % 4] += acc[p][c];

  double row_sum[2] = {0, 0}, col_sum[4] = {0, 0, 0, 0};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) {
      row_sum[r] += static_cast<double>(out.counts[r][c]);
      col_sum[c] += static_cast<double>(out.counts[r][c]);
    }
  double total = row_sum[0] + row_sum[1];
  double chi = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) {
      double expected = row_sum[r] * col_sum[c] / total;
      if (expected > 0.0) {
        double d = static_cast<double>(out.counts[r][c]) - expected;
        chi += d * d / expected;
      }
    }
  out.chi_square = chi;
  // Survival function of a chi-square with 3 degrees of freedom.
  out.p_value = std::erfc(std::sqrt(0.5 * chi)) +
                std::sqrt(2.0 * chi / 3.14159265358979323846) *
                    std::exp(-0.5 * chi);
  return out;
}

}  // namespace seqspin::lhvsim
