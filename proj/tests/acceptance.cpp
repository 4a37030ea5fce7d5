// Acceptance gate: the twelve checks the deliverable is judged by, each
// printed as one PASS/FAIL line. The exit code is the number of failures.
//
// Two checks are expected to fail honestly, with diagnostics printed below
// their line: the s = 1 xi window endpoint published as 0.33 (our exact
// scan closes the window at 0.3174), and the claim that the aligned
// n-measurement ratio stops exceeding 1 at s = 7/2 (pinning the first
// settings pair to the preparation axis embeds the two-measurement optimum,
// which is 1.157 there). See the README for the full analysis.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "seqspin/baselines.hpp"
#include "seqspin/inequalities.hpp"
#include "seqspin/lhvsim.hpp"
#include "seqspin/optimizer.hpp"
#include "seqspin/report.hpp"
#include "seqspin/rng.hpp"
#include "seqspin/sequential.hpp"
#include "seqspin/spinmath.hpp"
#include "seqspin/types.hpp"

using namespace seqspin;
using sequential::DiagonalState;
using sequential::MeasurementChain;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;

struct Criterion {
  bool pass = true;
  std::vector<std::string> notes;

  void fail(const std::string& note) {
    pass = false;
    notes.push_back(note);
  }
  void note(const std::string& n) { notes.push_back(n); }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

std::string spin_label(int twice_s) {
  if (twice_s % 2 == 0) return "s=" + std::to_string(twice_s / 2);
  return "s=" + std::to_string(twice_s) + "/2";
}

// Run the CLI to a JSON file and parse it back. Returns false on a nonzero
// exit code.
bool run_cli_report(const std::string& args, const std::string& out_path,
                    report::Report* rep) {
  std::string cmd = std::string(SEQSPIN_CLI_PATH) + " " + args +
                    " --no-timestamp --out " + out_path + " > /dev/null";
  int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0)
    return false;
  std::ifstream in(out_path, std::ios::binary);
  if (!in.good()) return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  *rep = report::from_json(buf.str());
  std::remove(out_path.c_str());
  return true;
}

// ---------------------------------------------------------------------------
// 1. Two-measurement ratio table, twelve spins within 1e-3, under 10 s.

Criterion criterion_table2() {
  Criterion c;
  auto start = std::chrono::steady_clock::now();
  report::Report rep;
  if (!run_cli_report("table --which 2", "acc_t2.json", &rep)) {
    c.fail("CLI table run failed");
    return c;
  }
  double worst = 0.0;
  for (int twice_s = 1; twice_s <= 12; ++twice_s) {
    double got = rep.row(spin_label(twice_s)).value;
    double want = baselines::bell_eta(twice_s);
    double d = std::abs(got - want);
    worst = std::max(worst, d);
    if (d > 1e-3)
      c.fail(spin_label(twice_s) +
             fmt(": computed %.6f vs published %.4f", got, want));
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start).count();
  if (secs >= 10.0) c.fail(fmt("runtime %.1f s exceeds the 10 s budget", secs));
  c.note(fmt("largest deviation %.2e, %.2f s", worst, secs));
  return c;
}

// 2. Three-measurement ratio table within 1e-3; violation ceases between
//    s = 3 and s = 7/2; under 30 s.

Criterion criterion_table4() {
  Criterion c;
  auto start = std::chrono::steady_clock::now();
  report::Report rep;
  if (!run_cli_report("table --which 4", "acc_t4.json", &rep)) {
    c.fail("CLI table run failed");
    return c;
  }
  double worst = 0.0;
  for (int twice_s = 1; twice_s <= 12; ++twice_s) {
    double got = rep.row(spin_label(twice_s)).value;
    double want = baselines::mk3_eta(twice_s);
    double d = std::abs(got - want);
    worst = std::max(worst, d);
    if (d > 1e-3)
      c.fail(spin_label(twice_s) + fmt(": computed %.6f vs published %.4f",
                                       got, want));
  }
  if (!(rep.row("s=3").value > 1.0))
    c.fail("expected a violation at s = 3");
  if (!(rep.row("s=7/2").value < 1.0))
    c.fail("expected no violation at s = 7/2");
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start).count();
  if (secs >= 30.0) c.fail(fmt("runtime %.1f s exceeds the 30 s budget", secs));
  c.note(fmt("largest deviation %.2e, %.2f s", worst, secs));
  return c;
}

// 3. xi violation windows within 5e-3 of the published endpoints.

Criterion criterion_table1() {
  Criterion c;
  report::Report rep;
  if (!run_cli_report("table --which 1", "acc_t1.json", &rep)) {
    c.fail("CLI table run failed");
    return c;
  }
  for (int twice_s = 1; twice_s <= 12; ++twice_s) {
    auto published = baselines::xi_intervals(twice_s);
    std::string label = spin_label(twice_s);

    // Collect the computed windows for this spin by probing the row names.
    std::vector<std::pair<double, double>> computed;
    for (std::size_t i = 0;; ++i) {
      std::string suffix = i == 0 ? "" : std::to_string(i + 1);
      try {
        double lo = rep.row(label + "/lo" + suffix).value;
        double hi = rep.row(label + "/hi" + suffix).value;
        computed.emplace_back(lo, hi);
      } catch (const config_error&) {
        break;
      }
    }

    if (computed.size() != published.size()) {
      c.fail(label + fmt(": %.0f windows computed, %.0f published",
                         static_cast<double>(computed.size()),
                         static_cast<double>(published.size())));
      continue;
    }
    for (std::size_t i = 0; i < published.size(); ++i) {
      if (std::abs(computed[i].first - published[i].lo) > 5e-3)
        c.fail(label + fmt(": window opens at %.6f, published %.3f "
                           "(delta %.4f)",
                           computed[i].first, published[i].lo,
                           std::abs(computed[i].first - published[i].lo)));
      if (std::abs(computed[i].second - published[i].hi) > 5e-3)
        c.fail(label + fmt(": window closes at %.6f, published %.3f "
                           "(delta %.4f)",
                           computed[i].second, published[i].hi,
                           std::abs(computed[i].second - published[i].hi)));
    }
  }
  return c;
}

// 4. Noise thresholds within 5e-3; s = 1/2 survives the whole noise range.

Criterion criterion_table3() {
  Criterion c;
  report::Report rep;
  if (!run_cli_report("table --which 3", "acc_t3.json", &rep)) {
    c.fail("CLI table run failed");
    return c;
  }
  double worst = 0.0;
  for (int twice_s = 1; twice_s <= 12; ++twice_s) {
    double got = rep.row(spin_label(twice_s)).value;
    double want = baselines::noise_threshold(twice_s);
    double d = std::abs(got - want);
    worst = std::max(worst, d);
    if (d > 5e-3)
      c.fail(spin_label(twice_s) + fmt(": computed %.6f vs published %.3f",
                                       got, want));
  }
  if (rep.row("s=1/2").value < 1.0 - 1e-12)
    c.fail("spin 1/2 must violate at every noise fraction");
  c.note(fmt("largest deviation %.2e", worst));
  return c;
}

// 5. Closed forms against the enumeration oracle: 200 random coplanar
//    configurations over s in {1/2, 1, 3/2, 2}, under 60 s.

Criterion criterion_closed_vs_brute() {
  Criterion c;
  auto start = std::chrono::steady_clock::now();
  CounterRng rng(2026, 0);
  double worst1 = 0.0, worst2 = 0.0, worst3 = 0.0;
  for (int cfg = 0; cfg < 200; ++cfg) {
    SpinSystem sys(1 + cfg % 4);
    DiagonalState state{sys, Direction{}, {}};
    double norm = 0.0;
    for (int k = 0; k < sys.dim(); ++k) {
      state.populations.push_back(rng.uniform());
      norm += state.populations.back();
    }
    for (auto& p : state.populations) p /= norm;

    double t1 = kPi * rng.uniform();
    double t12 = kPi * rng.uniform();
    double t23 = kPi * rng.uniform();
    MeasurementChain chain = MeasurementChain::coplanar(sys, {t1, t12, t23});

    double b1 = sequential::correlation_enumerated(state, chain, {{1, 1}});
    double b2 =
        sequential::correlation_enumerated(state, chain, {{1, 1}, {2, 1}});
    double b3 = sequential::correlation_enumerated(state, chain,
                                                   {{1, 1}, {2, 1}, {3, 1}});
    worst1 = std::max(worst1,
                      std::abs(sequential::closed_one(state, t1) - b1));
    worst2 = std::max(worst2,
                      std::abs(sequential::closed_two(state, t1, t12) - b2));
    worst3 = std::max(
        worst3, std::abs(sequential::closed_three(state, t1, t12, t23) - b3));
  }
  if (worst1 > 1e-9) c.fail(fmt("one-measurement deviation %.2e", worst1));
  if (worst2 > 1e-9) c.fail(fmt("pair deviation %.2e", worst2));
  if (worst3 > 1e-9) c.fail(fmt("triple deviation %.2e", worst3));
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start).count();
  if (secs >= 60.0) c.fail(fmt("runtime %.1f s exceeds the 60 s budget", secs));
  c.note(fmt("deviations %.1e / %.1e / %.1e", worst1, worst2, worst3) +
         fmt(" (triple uses the corrected cubic coefficients), %.1f s", secs));
  return c;
}

// 6. Spin-1/2 MK ceiling sqrt(2): reached within 1e-3, never exceeded by
//    more than 1e-6, for n in {2, 3, 4}.

Criterion criterion_ceiling() {
  Criterion c;
  optimizer::SearchOptions opts;
  opts.restarts = 12;
  for (int n : {2, 3, 4}) {
    auto rep = optimizer::mk_ceiling_search(n, opts);
    if (std::abs(rep.max_found - kSqrt2) > 1e-3)
      c.fail(fmt("n = %.0f: best found %.9f misses sqrt(2)",
                 static_cast<double>(n), rep.max_found));
    if (rep.max_evaluated > kSqrt2 + 1e-6)
      c.fail(fmt("n = %.0f: evaluated %.9f above sqrt(2)",
                 static_cast<double>(n), rep.max_evaluated));
  }
  return c;
}

// 7. Aligned-ansatz invariance: eta_4 and eta_5 equal eta_3 within 1e-4 for
//    s in {1, 3/2, 2}; the aligned ratio exceeds 1 for s <= 3 and is claimed
//    not to at s = 7/2.

Criterion criterion_invariance() {
  Criterion c;
  optimizer::SearchOptions opts;
  opts.restarts = 12;
  for (int twice_s : {2, 3, 4}) {
    SpinSystem sys(twice_s);
    for (int n : {4, 5}) {
      auto inv = optimizer::eta_n_invariance(sys, n, opts);
      if (inv.deviation > 1e-4)
        c.fail(spin_label(twice_s) +
               fmt(", n = %.0f: aligned %.8f vs eta_3 %.8f",
                   static_cast<double>(n), inv.eta_n_aligned, inv.eta3));
    }
  }

  optimizer::SearchOptions sweep;
  sweep.restarts = 6;
  for (int twice_s : {1, 2, 3, 4, 5, 6}) {
    auto inv = optimizer::eta_n_invariance(SpinSystem(twice_s), 4, sweep);
    if (!(inv.eta_n_aligned > 1.0))
      c.fail(spin_label(twice_s) + ": aligned eta_4 does not exceed 1");
  }
  auto edge = optimizer::eta_n_invariance(SpinSystem(7), 4, sweep);
  if (!(edge.eta_n_aligned <= 1.0)) {
    c.fail(fmt("s=7/2: aligned eta_4 = %.6f still exceeds 1",
               edge.eta_n_aligned));
    c.note("the aligned ansatz embeds the two-measurement optimum "
           "(1.1572 at s=7/2) by pinning the leading pairs, so the exact "
           "ratio cannot drop below it; only the linearized reduced form "
           "falls under 1 here");
  }
  return c;
}

// 8. Hidden-variable bound: a million random ladder assignments plus the
//    full corner grid never exceed s^n, and a corner attains it.

Criterion criterion_hvt() {
  Criterion c;
  for (int twice_s : {1, 2, 3}) {
    SpinSystem sys(twice_s);
    for (int n : {2, 3, 4}) {
      auto check = inequalities::hvt_bound_check(sys, n, Convention::physical,
                                                 1000000, 2026);
      if (check.exceeded)
        c.fail(spin_label(twice_s) +
               fmt(", n = %.0f: bound exceeded (max %.9f over %.9f)",
                   static_cast<double>(n),
                   std::max(check.max_random, check.max_corner), check.bound));
      if (!check.attained)
        c.fail(spin_label(twice_s) +
               fmt(", n = %.0f: no corner attains the bound %.9f",
                   static_cast<double>(n), check.bound));
    }
  }
  return c;
}

// 9. Protocol statistics: ten million rounds reproduce the quantum moments
//    of every subset within five standard errors, for n = 2, 3, 4, in under
//    two minutes.

Criterion criterion_lhv() {
  Criterion c;
  auto start = std::chrono::steady_clock::now();
  double worst_z = 0.0;
  std::vector<std::vector<double>> step_sets{
      {0.5, 0.9}, {0.5, 0.9, 1.3}, {0.4, 0.8, 1.2, 0.6}};
  for (const auto& steps : step_sets) {
    lhvsim::ProtocolConfig cfg;
    cfg.a0 = Direction{0.0, 0.0};
    double cum = 0.0;
    for (double s : steps) {
      cum += s;
      cfg.dirs.push_back(Direction::coplanar(cum));
    }
    cfg.samples = 10000000;
    cfg.seed = 20260819;
    for (const auto& row : lhvsim::verify_against_quantum(cfg)) {
      worst_z = std::max(worst_z, std::abs(row.z));
      if (std::abs(row.z) > 5.0)
        c.fail(fmt("n = %.0f, subset mask %.0f: z = %.2f",
                   static_cast<double>(steps.size()),
                   static_cast<double>(row.subset), row.z));
    }
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start).count();
  if (secs >= 120.0)
    c.fail(fmt("runtime %.1f s exceeds the 120 s budget", secs));
  c.note(fmt("largest |z| = %.2f over 3 + 7 + 15 subsets, %.1f s",
             worst_z, secs));
  return c;
}

// 10. Svetlichny sum: numeric maximization for s in {1/2, 1} stays within
//     2 s^3 + 1e-6, and the prime-swapped MK value vanishes at the
//     MK-optimal settings.

double svetlichny_abs(const SpinSystem& sys, const std::vector<double>& polars) {
  inequalities::MKSettings s{DiagonalState::pure_max(sys), {},
                             Convention::physical};
  for (int i = 0; i < 3; ++i)
    s.pairs.push_back({Direction::coplanar(polars[2 * i]),
                       Direction::coplanar(polars[2 * i + 1])});
  return std::abs(inequalities::svetlichny(s).value);
}

double ascend_svetlichny(const SpinSystem& sys, std::vector<double> polars) {
  double best = svetlichny_abs(sys, polars);
  for (int sweep = 0; sweep < 40; ++sweep) {
    double before = best;
    for (std::size_t i = 0; i < polars.size(); ++i) {
      // coarse scan
      double best_angle = polars[i];
      for (int g = 0; g < 48; ++g) {
        polars[i] = 2.0 * kPi * g / 48;
        double v = svetlichny_abs(sys, polars);
        if (v > best) {
          best = v;
          best_angle = polars[i];
        }
      }
      // local refinement by interval halving around the best cell
      double step = 2.0 * kPi / 48;
      polars[i] = best_angle;
      while (step > 1e-8) {
        for (double cand : {best_angle - step, best_angle + step}) {
          polars[i] = cand;
          double v = svetlichny_abs(sys, polars);
          if (v > best) {
            best = v;
            best_angle = cand;
          }
        }
        polars[i] = best_angle;
        step *= 0.5;
      }
    }
    if (best - before < 1e-12) break;
  }
  return best;
}

Criterion criterion_svetlichny() {
  Criterion c;
  for (int twice_s : {1, 2}) {
    SpinSystem sys(twice_s);
    double s = sys.s();
    double bound = 2.0 * s * s * s;

    CounterRng rng(2026, static_cast<std::uint64_t>(twice_s));
    double best = 0.0;
    for (int restart = 0; restart < 8; ++restart) {
      std::vector<double> polars(6);
      for (double& p : polars) p = 2.0 * kPi * rng.uniform();
      best = std::max(best, ascend_svetlichny(sys, polars));
    }
    // structured start: the canonical MK-optimal family
    optimizer::SearchOptions mk_opts;
    mk_opts.restarts = 4;
    auto mk = optimizer::maximize_mki(DiagonalState::pure_max(sys), mk_opts);
    best = std::max(best, ascend_svetlichny(sys, mk.argmax));

    if (best > bound + 1e-6)
      c.fail(spin_label(twice_s) +
             fmt(": found %.9f above the bound %.6f", best, bound));
    else
      c.note(spin_label(twice_s) +
             fmt(": best %.6f of bound %.6f", best, bound));

    // prime-swapped MK value at the MK-optimal settings
    inequalities::MKSettings settings{DiagonalState::pure_max(sys), {},
                                      Convention::physical};
    for (int i = 0; i < 3; ++i)
      settings.pairs.push_back({Direction::coplanar(mk.argmax[2 * i]),
                                Direction::coplanar(mk.argmax[2 * i + 1])});
    double swapped = inequalities::mk_mki(settings).value_swapped;
    if (std::abs(swapped) > 1e-9)
      c.fail(spin_label(twice_s) +
             fmt(": prime-swapped value %.2e at the optimum", swapped));
  }
  return c;
}

// 11. Hybrid combinations: the search finds a configuration beyond the
//     stated bound (> 3 for the first combination).

Criterion criterion_hybrid() {
  Criterion c;
  optimizer::SearchOptions opts;
  opts.restarts = 10;
  auto h = optimizer::hybrid_search(opts);
  if (!(h.best.value1 > 3.0))
    c.fail(fmt("best first combination %.6f does not exceed 3", h.best.value1));
  c.note(fmt("E1 = %.6f (stated bound 3, deterministic corners reach 5); "
             "E2 = %.6f",
             h.best.value1, h.best2));
  return c;
}

// 12. Property sweep across s <= 3, n <= 5: normalization, double
//     stochasticity, angle-only dependence, prime-swap duality, and
//     seed determinism.

Criterion criterion_properties() {
  Criterion c;
  CounterRng rng(2027, 0);

  for (int twice_s = 1; twice_s <= 6; ++twice_s) {
    SpinSystem sys(twice_s);

    // double stochasticity and angle-only dependence
    for (int rep = 0; rep < 3; ++rep) {
      Direction a = Direction::from_unit(rng.unit_vector());
      Direction b = Direction::from_unit(rng.unit_vector());
      Eigen::MatrixXd t = spinmath::transition_matrix(sys, a, b);
      Eigen::MatrixXd ta =
          spinmath::transition_matrix_angle(sys, angle_between(a, b));
      if ((t - ta).cwiseAbs().maxCoeff() > 1e-12)
        c.fail(spin_label(twice_s) + ": transition matrix not angle-only");
      for (int j = 0; j < sys.dim(); ++j)
        if (std::abs(t.row(j).sum() - 1.0) > 1e-12 ||
            std::abs(t.col(j).sum() - 1.0) > 1e-12)
          c.fail(spin_label(twice_s) + ": transition matrix not doubly stochastic");
    }

    // normalization through both engines
    for (int n = 2; n <= 5; ++n) {
      DiagonalState state{sys, Direction{}, {}};
      double norm = 0.0;
      for (int k = 0; k < sys.dim(); ++k) {
        state.populations.push_back(rng.uniform());
        norm += state.populations.back();
      }
      for (auto& p : state.populations) p /= norm;
      std::vector<double> steps;
      for (int i = 0; i < n; ++i) steps.push_back(kPi * rng.uniform());
      MeasurementChain chain = MeasurementChain::coplanar(sys, steps);
      if (std::abs(sequential::correlation(state, chain, {}) - 1.0) > 1e-12)
        c.fail(spin_label(twice_s) + ": transfer normalization broken");
      if (std::abs(sequential::correlation_enumerated(state, chain, {}) -
                   1.0) > 1e-12)
        c.fail(spin_label(twice_s) + ": enumeration normalization broken");
    }
  }

  // prime-swap duality, float-exact
  for (int twice_s : {1, 2, 3}) {
    SpinSystem sys(twice_s);
    for (int n = 2; n <= 5; ++n) {
      inequalities::MKSettings s{DiagonalState::pure_max(sys), {},
                                 Convention::physical};
      for (int i = 0; i < n; ++i)
        s.pairs.push_back({Direction::from_unit(rng.unit_vector()),
                           Direction::from_unit(rng.unit_vector())});
      auto forward = inequalities::mk_expectation(s);
      inequalities::MKSettings swapped = s;
      for (auto& p : swapped.pairs) std::swap(p.unprimed, p.primed);
      auto backward = inequalities::mk_expectation(swapped);
      if (forward.value != backward.value_swapped ||
          forward.value_swapped != backward.value)
        c.fail(spin_label(twice_s) +
               fmt(": prime swap not exact at n = %.0f",
                   static_cast<double>(n)));
    }
  }

  // seed determinism of the sampler, parallel == serial
  lhvsim::ProtocolConfig cfg;
  cfg.a0 = Direction{0.0, 0.0};
  cfg.dirs = {Direction::coplanar(0.5), Direction::coplanar(1.1),
              Direction::coplanar(1.7)};
  cfg.samples = 100000;
  cfg.seed = 555;
  auto e1 = lhvsim::estimate_correlations(cfg, {1u, 3u, 7u}, true);
  auto e2 = lhvsim::estimate_correlations(cfg, {1u, 3u, 7u}, true);
  auto e3 = lhvsim::estimate_correlations(cfg, {1u, 3u, 7u}, false);
  for (std::size_t i = 0; i < e1.size(); ++i)
    if (e1[i].mean != e2[i].mean || e1[i].mean != e3[i].mean)
      c.fail("sampler is not deterministic under a fixed seed");
  return c;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Criterion (*run)();
  };
  const Entry entries[] = {
      {"two-measurement ratio table (12 spins, 1e-3, <10 s)", criterion_table2},
      {"three-measurement ratio table (1e-3, cutoff at s=7/2, <30 s)",
       criterion_table4},
      {"xi violation windows (5e-3)", criterion_table1},
      {"noise thresholds (5e-3)", criterion_table3},
      {"closed forms vs enumeration (200 configs, 1e-9, <60 s)",
       criterion_closed_vs_brute},
      {"spin-1/2 MK ceiling sqrt(2) (n = 2, 3, 4)", criterion_ceiling},
      {"aligned-ansatz invariance (1e-4) and violation span",
       criterion_invariance},
      {"hidden-variable bound attained, never exceeded", criterion_hvt},
      {"protocol statistics vs quantum (5 SE, 1e7 rounds, <2 min)",
       criterion_lhv},
      {"Svetlichny sum within 2 s^3; swapped MK vanishes at the optimum",
       criterion_svetlichny},
      {"hybrid combination exceeds its stated bound", criterion_hybrid},
      {"property sweep (s <= 3, n <= 5)", criterion_properties},
  };

  int failures = 0;
  int index = 0;
  for (const Entry& e : entries) {
    ++index;
    auto start = std::chrono::steady_clock::now();
    Criterion result = e.run();
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %2d. %s (%.1f s)\n", result.pass ? "PASS" : "FAIL",
                index, e.name, secs);
    for (const std::string& n : result.notes)
      std::printf("        %s\n", n.c_str());
    if (!result.pass) ++failures;
  }
  std::printf("%d of 12 criteria pass\n", 12 - failures);
  return failures;
}
