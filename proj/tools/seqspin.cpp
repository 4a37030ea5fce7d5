// seqspin: quantum correlations of successive spin measurements, their
// Bell-type combinations against hidden-variable bounds, optimization of
// the violation ratio, and the classical two-bit sampling protocol.

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqspin/baselines.hpp"
#include "seqspin/inequalities.hpp"
#include "seqspin/lhvsim.hpp"
#include "seqspin/optimizer.hpp"
#include "seqspin/report.hpp"
#include "seqspin/sequential.hpp"
#include "seqspin/types.hpp"
#include "seqspin/version.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace seqspin;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct GlobalOpts {
  std::string format = "json";
  std::string out_path;
  bool no_timestamp = false;
  int jobs = 0;
  bool radians = false;
  bool compare_paper = false;

  double to_rad(double v) const { return radians ? v : v * kPi / 180.0; }
  double from_rad(double v) const { return radians ? v : v * 180.0 / kPi; }
};

std::string iso_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void emit(const GlobalOpts& g, const std::string& command,
          report::Report rep) {
  std::vector<std::pair<std::string, std::string>> head = {
      {"tool", "seqspin"},
      {"version", kVersion},
      {"command", command},
  };
  rep.meta.insert(rep.meta.begin(), head.begin(), head.end());
  if (!g.no_timestamp) rep.set_meta("timestamp", iso_now());

  std::string text;
  if (g.format == "csv") {
    text = report::to_csv(rep);
  } else if (g.format == "json") {
    text = report::to_json(rep);
  } else {
    throw config_error("unknown output format: " + g.format);
  }
  if (g.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(g.out_path);
    if (!f) throw config_error("cannot open output file: " + g.out_path);
    f << text;
  }
}

// Spin given as "3/2", "1.5", or "2". Returned as 2s.
int parse_twice_s(const std::string& text) {
  try {
    std::size_t slash = text.find('/');
    if (slash != std::string::npos) {
      int num = std::stoi(text.substr(0, slash));
      int den = std::stoi(text.substr(slash + 1));
      if (den == 2) return num;
      if (den == 1) return 2 * num;
      throw config_error("spin denominator must be 1 or 2: " + text);
    }
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw config_error("trailing characters");
    long t = std::lround(2.0 * v);
    if (std::abs(2.0 * v - static_cast<double>(t)) > 1e-9)
      throw config_error("spin must be a multiple of 1/2: " + text);
    return static_cast<int>(t);
  } catch (const config_error&) {
    throw;
  } catch (const std::exception&) {
    throw config_error("cannot parse spin value: " + text);
  }
}

// Signed level like "-3/2", "0", "1": returned as 2m.
int parse_twice_m(const std::string& text) {
  bool neg = !text.empty() && text[0] == '-';
  int mag = parse_twice_s(neg ? text.substr(1) : text);
  return neg ? -mag : mag;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t pos = text.find(',', start);
    std::string cell = pos == std::string::npos ? text.substr(start)
                                                : text.substr(start, pos - start);
    if (cell.empty()) throw config_error("empty entry in list: " + text);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      throw config_error("cannot parse number: " + cell);
    }
    if (used != cell.size()) throw config_error("cannot parse number: " + cell);
    out.push_back(v);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

// State specs: max | pure:<m> | mixed:<p,p,...> | noisy:<f> | xi:<x>
sequential::DiagonalState parse_state(const SpinSystem& sys,
                                      const std::string& spec) {
  if (spec == "max") return sequential::DiagonalState::pure_max(sys);
  std::size_t colon = spec.find(':');
  if (colon == std::string::npos)
    throw config_error("unknown state spec: " + spec);
  std::string head = spec.substr(0, colon);
  std::string tail = spec.substr(colon + 1);
  if (head == "pure") {
    // pure:<m> with m in the eigenvalue ladder, e.g. pure:-1/2
    int twice_m = parse_twice_m(tail);
    return sequential::DiagonalState::pure(sys, twice_m);
  }
  if (head == "mixed") {
    sequential::DiagonalState st{sys, {}, parse_double_list(tail)};
    st.validate();
    return st;
  }
  if (head == "noisy") {
    double f = std::stod(tail);
    if (f < 0.0 || f > 1.0) throw config_error("noise fraction must be in [0, 1]");
    return sequential::DiagonalState::pure_max(sys).with_noise(f);
  }
  if (head == "xi") {
    return sequential::DiagonalState::from_xi(sys, std::stod(tail));
  }
  throw config_error("unknown state spec: " + spec);
}

std::string spin_label(int twice_s) {
  if (twice_s % 2 == 0) return "s=" + std::to_string(twice_s / 2);
  return "s=" + std::to_string(twice_s) + "/2";
}

// Moments spec "1,3^2" -> alpha_1 * alpha_3^2.
std::vector<sequential::Moment> parse_moments(const std::string& text) {
  std::vector<sequential::Moment> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t pos = text.find(',', start);
    std::string cell = pos == std::string::npos ? text.substr(start)
                                                : text.substr(start, pos - start);
    if (cell.empty()) throw config_error("empty entry in moments list");
    std::size_t caret = cell.find('^');
    try {
      if (caret == std::string::npos) {
        out.push_back({std::stoi(cell), 1});
      } else {
        out.push_back(
            {std::stoi(cell.substr(0, caret)), std::stoi(cell.substr(caret + 1))});
      }
    } catch (const std::exception&) {
      throw config_error("cannot parse moment entry: " + cell);
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string moment_name(const std::vector<sequential::Moment>& moments) {
  std::string name = "E[";
  for (std::size_t i = 0; i < moments.size(); ++i) {
    if (i) name += "*";
    name += "a" + std::to_string(moments[i].step);
    if (moments[i].power != 1) name += "^" + std::to_string(moments[i].power);
  }
  return name + "]";
}

std::string subset_name(std::uint32_t mask, int n) {
  std::vector<sequential::Moment> moments;
  for (int i = 0; i < n; ++i)
    if (mask & (1u << i)) moments.push_back({i + 1, 1});
  return moment_name(moments);
}

// ---------------------------------------------------------------------------

struct TableOpts {
  int which = 2;
};

void run_table(const GlobalOpts& g, const TableOpts& t) {
  report::Report rep;
  rep.set_meta("table", std::to_string(t.which));
  const char* quantity = "";

  for (int twice_s = 1; twice_s <= 12; ++twice_s) {
    SpinSystem sys(twice_s);
    const double s = sys.s();
    sequential::DiagonalState top = sequential::DiagonalState::pure_max(sys);
    std::string label = spin_label(twice_s);

    switch (t.which) {
      case 1: {
        quantity = "xi intervals with a two-measurement violation";
        auto intervals = optimizer::xi_violation_range(sys);
        auto base = g.compare_paper ? baselines::xi_intervals(twice_s)
                                    : std::vector<baselines::XiInterval>{};
        for (std::size_t i = 0; i < intervals.size(); ++i) {
          std::string suffix = i == 0 ? "" : std::to_string(i + 1);
          report::Row lo{label + "/lo" + suffix, intervals[i].first,
                         report::Provenance::closed_form, {}};
          report::Row hi{label + "/hi" + suffix, intervals[i].second,
                         report::Provenance::closed_form, {}};
          if (g.compare_paper && i < base.size()) {
            lo.extras = {{"baseline", base[i].lo},
                         {"delta", intervals[i].first - base[i].lo}};
            hi.extras = {{"baseline", base[i].hi},
                         {"delta", intervals[i].second - base[i].hi}};
          }
          rep.rows.push_back(std::move(lo));
          rep.rows.push_back(std::move(hi));
        }
        break;
      }
      case 2: {
        quantity = "two-measurement eta_max on the top state";
        double chi = top.moment(2);
        auto red = optimizer::maximize_reduced(
            3.0 * chi - s * (s + 1.0), s * (s + 1.0) - chi,
            1.0 / (2.0 * s * s));
        report::Row row{label, red.value, report::Provenance::closed_form,
                        {{"theta", g.from_rad(red.theta)}}};
        if (g.compare_paper) {
          double b = baselines::bell_eta(twice_s);
          row.extras.emplace_back("baseline", b);
          row.extras.emplace_back("delta", red.value - b);
        }
        rep.rows.push_back(std::move(row));
        break;
      }
      case 3: {
        quantity = "largest noise fraction with a surviving violation";
        double f = optimizer::noise_threshold(sys);
        report::Row row{label, f, report::Provenance::closed_form, {}};
        if (g.compare_paper) {
          double b = baselines::noise_threshold(twice_s);
          row.extras.emplace_back("baseline", b);
          row.extras.emplace_back("delta", f - b);
        }
        rep.rows.push_back(std::move(row));
        break;
      }
      case 4: {
        quantity = "three-measurement eta_max on the top state (reduced form)";
        auto [m, n] = optimizer::mki_reduction_coefficients(top);
        auto red =
            optimizer::maximize_reduced(m, n, 1.0 / (16.0 * s * s * s));
        report::Row row{label, red.value, report::Provenance::closed_form,
                        {{"theta", g.from_rad(red.theta)}}};
        if (g.compare_paper) {
          double b = baselines::mk3_eta(twice_s);
          row.extras.emplace_back("baseline", b);
          row.extras.emplace_back("delta", red.value - b);
        }
        rep.rows.push_back(std::move(row));
        break;
      }
      default:
        throw config_error("table number must be 1, 2, 3, or 4");
    }
  }
  rep.set_meta("quantity", quantity);
  emit(g, "table", std::move(rep));
}

// ---------------------------------------------------------------------------

struct CorrelateOpts {
  std::string spin;
  std::string state = "max";
  std::string dirs;
  std::string conv = "physical";
  std::string moments;
  std::string engine = "transfer";
  double check_tol = 1e-9;
};

void run_correlate(const GlobalOpts& g, const CorrelateOpts& c) {
  if (g.compare_paper)
    throw config_error("--compare-paper applies to table and optimize runs");
  SpinSystem sys(parse_twice_s(c.spin));
  Convention conv = convention_from_string(c.conv);
  sequential::DiagonalState state = parse_state(sys, c.state);
  std::vector<double> steps = parse_double_list(c.dirs);
  for (double& a : steps) a = g.to_rad(a);
  sequential::MeasurementChain chain =
      sequential::MeasurementChain::coplanar(sys, steps, conv);

  std::vector<sequential::Moment> moments;
  if (c.moments.empty()) {
    for (int i = 1; i <= chain.n(); ++i) moments.push_back({i, 1});
  } else {
    moments = parse_moments(c.moments);
  }

  report::Report rep;
  rep.set_meta("spin", spin_label(sys.twice_s));
  rep.set_meta("state", c.state);
  rep.set_meta("convention", to_string(conv));
  rep.set_meta("engine", c.engine);
  std::string name = moment_name(moments);

  if (c.engine == "closed") {
    bool plain = true;
    for (std::size_t i = 0; i < moments.size(); ++i)
      plain = plain && moments[i].step == static_cast<int>(i) + 1 &&
              moments[i].power == 1;
    if (!plain || chain.n() > 3)
      throw config_error(
          "closed engine covers E[a1], E[a1*a2], E[a1*a2*a3] only");
    double v = chain.n() == 1
                   ? sequential::closed_one(state, steps[0], conv)
               : chain.n() == 2
                   ? sequential::closed_two(state, steps[0], steps[1], conv)
                   : sequential::closed_three(state, steps[0], steps[1],
                                              steps[2], conv);
    rep.rows.push_back({name, v, report::Provenance::closed_form, {}});
  } else if (c.engine == "transfer") {
    double v = sequential::correlation(state, chain, moments);
    rep.rows.push_back({name, v, report::Provenance::closed_form, {}});
  } else if (c.engine == "brute") {
    double v = sequential::correlation_enumerated(state, chain, moments);
    rep.rows.push_back({name, v, report::Provenance::brute_force, {}});
  } else if (c.engine == "both") {
    double tv = sequential::correlation(state, chain, moments);
    double bv = sequential::correlation_enumerated(state, chain, moments);
    double diff = std::abs(tv - bv);
    if (diff > c.check_tol) {
      char msg[128];
      std::snprintf(msg, sizeof msg,
                    "transfer and enumeration disagree by %.3g (tolerance %.3g)",
                    diff, c.check_tol);
      throw consistency_error(msg);
    }
    rep.rows.push_back({name, bv, report::Provenance::brute_force,
                        {{"transfer", tv}, {"diff", diff}}});
  } else {
    throw config_error("unknown engine: " + c.engine);
  }
  emit(g, "correlate", std::move(rep));
}

// ---------------------------------------------------------------------------

struct OptimizeOpts {
  std::string spin;
  std::string state = "max";
  std::string inequality = "bi";
  int restarts = 50;
  std::uint64_t seed = 2024;
  bool full_sphere = false;
  int n = 4;
};

void angle_extras(const GlobalOpts& g, report::Row& row,
                  const std::vector<double>& angles, bool spherical) {
  for (std::size_t i = 0; i < angles.size(); ++i) {
    std::string key;
    if (spherical) {
      std::size_t pair = i / 4;
      const char* part = (i % 4 == 0)   ? "_th"
                         : (i % 4 == 1) ? "_ph"
                         : (i % 4 == 2) ? "p_th"
                                        : "p_ph";
      key = "a" + std::to_string(pair + 1) + part;
    } else {
      std::size_t pair = i / 2;
      key = "a" + std::to_string(pair + 1) + (i % 2 ? "p" : "");
    }
    row.extras.emplace_back(key, g.from_rad(angles[i]));
  }
}

void run_optimize(const GlobalOpts& g, const OptimizeOpts& o) {
  SpinSystem sys(parse_twice_s(o.spin));
  sequential::DiagonalState state = parse_state(sys, o.state);
  optimizer::SearchOptions opts;
  opts.restarts = o.restarts;
  opts.seed = o.seed;
  opts.full_sphere = o.full_sphere;

  report::Report rep;
  rep.set_meta("spin", spin_label(sys.twice_s));
  rep.set_meta("state", o.state);
  rep.set_meta("inequality", o.inequality);
  rep.set_meta("restarts", std::to_string(o.restarts));
  rep.set_meta("seed", std::to_string(o.seed));

  if (o.inequality == "bi" || o.inequality == "mki") {
    optimizer::OptimizationResult r = o.inequality == "bi"
                                          ? optimizer::maximize_bi(state, opts)
                                          : optimizer::maximize_mki(state, opts);
    report::Row head{"eta_max", r.eta_max, report::Provenance::closed_form,
                     {{"residual", r.residual}}};
    if (g.compare_paper) {
      if (o.state != "max")
        throw config_error(
            "--compare-paper baselines exist for the top state only");
      double b = o.inequality == "bi" ? baselines::bell_eta(sys.twice_s)
                                      : baselines::mk3_eta(sys.twice_s);
      head.extras.emplace_back("baseline", b);
      head.extras.emplace_back("delta", r.eta_max - b);
    }
    rep.rows.push_back(std::move(head));
    report::Row at{"eta_at_argmax", r.eta_at_argmax,
                   report::Provenance::brute_force, {}};
    angle_extras(g, at, r.argmax, false);
    rep.rows.push_back(std::move(at));
    report::Row num{"eta_numeric", r.eta_numeric,
                    report::Provenance::brute_force, {}};
    angle_extras(g, num, r.argmax_numeric, o.full_sphere);
    rep.rows.push_back(std::move(num));
  } else if (o.inequality == "svetlichny") {
    auto [m, n] = optimizer::mki_reduction_coefficients(state);
    double s = sys.s();
    auto red = optimizer::maximize_reduced(m, n, 1.0 / (16.0 * s * s * s));
    std::vector<double> angles = {0.0, 0.0, red.theta, kPi - red.theta,
                                  0.5 * kPi, 0.0};
    inequalities::MKSettings settings{state, {}, Convention::physical};
    for (int i = 0; i < 3; ++i)
      settings.pairs.push_back({Direction::coplanar(angles[2 * i]),
                                Direction::coplanar(angles[2 * i + 1])});
    inequalities::MKValue mkv = inequalities::mk_mki(settings);
    inequalities::SvetlichnyValue sv = inequalities::svetlichny(settings);
    rep.rows.push_back({"svetlichny", sv.value,
                        report::Provenance::brute_force,
                        {{"bound", sv.bound},
                         {"satisfied", sv.satisfied ? 1.0 : 0.0}}});
    report::Row mki_row{"mki", mkv.value, report::Provenance::brute_force,
                        {{"eta", mkv.eta}}};
    angle_extras(g, mki_row, angles, false);
    rep.rows.push_back(std::move(mki_row));
    rep.rows.push_back({"mki_prime", mkv.value_swapped,
                        report::Provenance::brute_force, {}});
  } else if (o.inequality == "hybrid") {
    if (sys.twice_s != 1)
      throw config_error("the hybrid combinations are defined for spin 1/2");
    optimizer::HybridSearch hs = optimizer::hybrid_search(opts);
    report::Row e1{"E1", hs.best.value1, report::Provenance::brute_force,
                   {{"stated_lo", hs.best.stated_lo1},
                    {"stated_hi", hs.best.stated_hi1},
                    {"deterministic_lo", hs.best.deterministic_lo1},
                    {"deterministic_hi", hs.best.deterministic_hi1}}};
    angle_extras(g, e1, hs.argmax1, false);
    rep.rows.push_back(std::move(e1));
    report::Row e2{"E2", hs.best2, report::Provenance::brute_force,
                   {{"stated_lo", hs.best.stated_lo2},
                    {"stated_hi", hs.best.stated_hi2},
                    {"deterministic_lo", hs.best.deterministic_lo2},
                    {"deterministic_hi", hs.best.deterministic_hi2}}};
    angle_extras(g, e2, hs.argmax2, false);
    rep.rows.push_back(std::move(e2));
  } else if (o.inequality == "ceiling") {
    if (sys.twice_s != 1)
      throw config_error("the MK ceiling search is defined for spin 1/2");
    optimizer::CeilingReport cr = optimizer::mk_ceiling_search(o.n, opts);
    rep.rows.push_back({"max_found", cr.max_found,
                        report::Provenance::brute_force,
                        {{"n", static_cast<double>(cr.n)}}});
    rep.rows.push_back({"max_evaluated", cr.max_evaluated,
                        report::Provenance::brute_force, {}});
  } else if (o.inequality == "invariance") {
    optimizer::EtaInvariance inv = optimizer::eta_n_invariance(sys, o.n, opts);
    double nn = static_cast<double>(inv.n);
    rep.rows.push_back({"eta3", inv.eta3, report::Provenance::brute_force, {}});
    rep.rows.push_back({"eta_n_aligned", inv.eta_n_aligned,
                        report::Provenance::brute_force, {{"n", nn}}});
    rep.rows.push_back({"eta_n_free", inv.eta_n_free,
                        report::Provenance::brute_force, {{"n", nn}}});
    rep.rows.push_back(
        {"deviation", inv.deviation, report::Provenance::brute_force, {}});
  } else {
    throw config_error("unknown inequality: " + o.inequality);
  }
  emit(g, "optimize", std::move(rep));
}

// ---------------------------------------------------------------------------

struct LhvOpts {
  std::string spin = "1/2";
  std::string state = "max";
  std::string dirs;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 12345;
};

void run_lhv(const GlobalOpts& g, const LhvOpts& l) {
  if (g.compare_paper)
    throw config_error("--compare-paper applies to table and optimize runs");
  SpinSystem sys(parse_twice_s(l.spin));
  if (sys.twice_s != 1)
    throw config_error("the sampling protocol simulates spin 1/2");
  sequential::DiagonalState state = parse_state(sys, l.state);

  std::vector<double> steps = parse_double_list(l.dirs);
  lhvsim::ProtocolConfig cfg;
  cfg.a0 = state.axis;
  double cum = 0.0;
  for (double a : steps) {
    cum += g.to_rad(a);
    cfg.dirs.push_back(Direction::coplanar(cum));
  }
  cfg.samples = l.samples;
  cfg.seed = l.seed;
  cfg.p_minus = state.populations[1];

  report::Report rep;
  rep.set_meta("samples", std::to_string(l.samples));
  rep.set_meta("seed", std::to_string(l.seed));
  rep.set_meta("state", l.state);

  auto comps = lhvsim::verify_against_quantum(cfg);
  for (const auto& c : comps) {
    rep.rows.push_back({subset_name(c.subset, cfg.n()), c.lhv_mean,
                        report::Provenance::monte_carlo,
                        {{"se", c.lhv_se}, {"quantum", c.quantum}, {"z", c.z}}});
  }
  if (cfg.n() >= 2) {
    auto ns = lhvsim::no_signaling_check(cfg);
    rep.rows.push_back({"no_signaling_chi2", ns.chi_square,
                        report::Provenance::monte_carlo,
                        {{"p_value", ns.p_value}, {"dof", 3.0}}});
  }
  emit(g, "lhv", std::move(rep));
}

// ---------------------------------------------------------------------------

struct HvtOpts {
  std::string spin;
  int n = 2;
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 2024;
  std::string conv = "physical";
};

void run_hvt(const GlobalOpts& g, const HvtOpts& h) {
  if (g.compare_paper)
    throw config_error("--compare-paper applies to table and optimize runs");
  SpinSystem sys(parse_twice_s(h.spin));
  Convention conv = convention_from_string(h.conv);
  inequalities::HvtBoundCheck chk =
      inequalities::hvt_bound_check(sys, h.n, conv, h.trials, h.seed);

  report::Report rep;
  rep.set_meta("spin", spin_label(sys.twice_s));
  rep.set_meta("n", std::to_string(h.n));
  rep.set_meta("trials", std::to_string(h.trials));
  rep.set_meta("seed", std::to_string(h.seed));
  rep.rows.push_back({"bound", chk.bound, report::Provenance::closed_form,
                      {{"attained", chk.attained ? 1.0 : 0.0},
                       {"exceeded", chk.exceeded ? 1.0 : 0.0}}});
  rep.rows.push_back(
      {"max_random", chk.max_random, report::Provenance::monte_carlo, {}});
  rep.rows.push_back(
      {"max_corner", chk.max_corner, report::Provenance::brute_force, {}});
  emit(g, "hvt-bound", std::move(rep));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Sequential spin-s measurement correlations, Bell-type inequalities, "
      "violation optimization, and the classical two-bit protocol"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--format", g.format, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out_path, "Write the report to a file");
  app.add_flag("--no-timestamp", g.no_timestamp,
               "Omit the timestamp meta line (byte-identical reruns)");
  app.add_option("--jobs", g.jobs, "Worker thread count (0 = library default)");
  app.add_flag("--radians", g.radians, "Angles are given and printed in radians");
  app.add_flag("--compare-paper", g.compare_paper,
               "Attach published baseline values and deltas where available");

  TableOpts t;
  CLI::App* table = app.add_subcommand(
      "table", "Reproduce one of the four published reference tables");
  table->fallthrough();
  table->add_option("--which", t.which, "Table number (1-4)")
      ->required()
      ->check(CLI::Range(1, 4));

  CorrelateOpts c;
  CLI::App* correlate = app.add_subcommand(
      "correlate", "Moments of a sequential measurement chain");
  correlate->fallthrough();
  correlate->add_option("--spin", c.spin, "Spin, e.g. 1/2, 1, 3/2")->required();
  correlate->add_option("--state", c.state,
                        "max | pure:<m> | mixed:<p,...> | noisy:<f> | xi:<x>");
  correlate
      ->add_option("--dirs", c.dirs,
                   "Comma list of successive relative angles (a0->a1, a1->a2, ...)")
      ->required();
  correlate->add_option("--conv", c.conv, "Outcome convention: physical | pm_one")
      ->check(CLI::IsMember({"physical", "pm_one"}));
  correlate->add_option("--moments", c.moments,
                        "Steps in the product, e.g. 1,3 or 1^2,2 (default all)");
  correlate
      ->add_option("--engine", c.engine,
                   "closed | transfer | brute | both (cross-check)")
      ->check(CLI::IsMember({"closed", "transfer", "brute", "both"}));
  correlate->add_option("--check-tol", c.check_tol,
                        "Tolerance for --engine both (default 1e-9)");

  OptimizeOpts o;
  CLI::App* optimize = app.add_subcommand(
      "optimize", "Maximize a violation ratio over measurement settings");
  optimize->fallthrough();
  optimize->add_option("--spin", o.spin, "Spin, e.g. 1/2, 1, 3/2")->required();
  optimize->add_option("--state", o.state,
                       "max | pure:<m> | mixed:<p,...> | noisy:<f> | xi:<x>");
  optimize
      ->add_option("--inequality", o.inequality,
                   "bi | mki | svetlichny | hybrid | ceiling | invariance")
      ->check(CLI::IsMember(
          {"bi", "mki", "svetlichny", "hybrid", "ceiling", "invariance"}));
  optimize->add_option("--restarts", o.restarts, "Random restarts (default 50)");
  optimize->add_option("--seed", o.seed, "Seed for the restart draws");
  optimize->add_flag("--full-sphere", o.full_sphere,
                     "Search spherical settings instead of coplanar ones");
  optimize->add_option("--n", o.n,
                       "Chain length for ceiling/invariance (default 4)");

  LhvOpts l;
  CLI::App* lhv = app.add_subcommand(
      "lhv", "Sample the classical two-bit protocol and compare to quantum");
  lhv->fallthrough();
  lhv->add_option("--spin", l.spin, "Must be 1/2");
  lhv->add_option("--state", l.state, "Spin-1/2 preparation spec");
  lhv->add_option("--dirs", l.dirs,
                  "Comma list of successive relative angles")
      ->required();
  lhv->add_option("--samples", l.samples, "Protocol rounds (default 1e6)");
  lhv->add_option("--seed", l.seed, "Base seed (default 12345)");

  HvtOpts h;
  CLI::App* hvt = app.add_subcommand(
      "hvt-bound", "Certify the hidden-variable bound s^n over assignments");
  hvt->fallthrough();
  hvt->add_option("--spin", h.spin, "Spin, e.g. 1/2, 1, 3/2")->required();
  hvt->add_option("--n", h.n, "Chain length (default 2)")->check(CLI::Range(2, 6));
  hvt->add_option("--trials", h.trials, "Random assignments (default 1e6)");
  hvt->add_option("--seed", h.seed, "Seed for the random assignments");
  hvt->add_option("--conv", h.conv, "Outcome convention: physical | pm_one")
      ->check(CLI::IsMember({"physical", "pm_one"}));

  try {
    app.parse(argc, argv);
#ifdef _OPENMP
    if (g.jobs > 0) omp_set_num_threads(g.jobs);
#endif
    if (table->parsed()) run_table(g, t);
    if (correlate->parsed()) run_correlate(g, c);
    if (optimize->parsed()) run_optimize(g, o);
    if (lhv->parsed()) run_lhv(g, l);
    if (hvt->parsed()) run_hvt(g, h);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const consistency_error& e) {
    std::cerr << "internal check failed: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
