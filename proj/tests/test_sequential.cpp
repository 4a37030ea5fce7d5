#include <cmath>
#include <vector>

#include <doctest.h>

#include "seqspin/rng.hpp"
#include "seqspin/sequential.hpp"
#include "seqspin/types.hpp"

using namespace seqspin;
using sequential::DiagonalState;
using sequential::MeasurementChain;
using sequential::Moment;

namespace {

constexpr double kPi = 3.14159265358979323846;

MeasurementChain random_chain(CounterRng& rng, const SpinSystem& sys, int n,
                              Convention conv = Convention::physical) {
  MeasurementChain chain{sys, {}, conv};
  for (int i = 0; i < n; ++i)
    chain.dirs.push_back(Direction::from_unit(rng.unit_vector()));
  return chain;
}

std::vector<Moment> plain_moments(int n) {
  std::vector<Moment> m;
  for (int i = 1; i <= n; ++i) m.push_back({i, 1});
  return m;
}

}  // namespace

TEST_CASE("joint probabilities are nonnegative and sum to one") {
  CounterRng rng(31, 0);
  for (int twice_s : {1, 2, 3}) {
    SpinSystem sys(twice_s);
    DiagonalState state = DiagonalState::pure_max(sys);
    MeasurementChain chain = random_chain(rng, sys, 3);

    double total = 0.0;
    std::vector<int> outcomes(3, 0);
    int dim = sys.dim();
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        for (int c = 0; c < dim; ++c) {
          outcomes = {a, b, c};
          double p = sequential::joint_probability(state, chain, outcomes);
          CHECK(p >= -1e-15);
          total += p;
        }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("transfer contraction agrees with full enumeration") {
  CounterRng rng(32, 0);
  for (int twice_s : {1, 2, 4}) {
    SpinSystem sys(twice_s);
    for (int rep = 0; rep < 5; ++rep) {
      DiagonalState state = DiagonalState::pure_max(sys);
      state.axis = Direction::from_unit(rng.unit_vector());
      int n = 2 + static_cast<int>(rng.below(3));
      MeasurementChain chain = random_chain(rng, sys, n);
      auto moments = plain_moments(n);

      double brute = sequential::correlation_enumerated(state, chain, moments);
      double fast = sequential::correlation(state, chain, moments);
      CHECK(std::abs(brute - fast) < 1e-12);
    }
  }
}

TEST_CASE("transfer handles powers and subset moments like enumeration") {
  CounterRng rng(33, 0);
  SpinSystem sys(3);
  DiagonalState state = DiagonalState::pure_max(sys);
  MeasurementChain chain = random_chain(rng, sys, 4);

  for (auto moments : {std::vector<Moment>{{1, 3}},
                       std::vector<Moment>{{2, 2}, {4, 1}},
                       std::vector<Moment>{{1, 1}, {3, 1}},
                       std::vector<Moment>{{2, 1}, {3, 2}, {4, 1}}}) {
    double brute = sequential::correlation_enumerated(state, chain, moments);
    double fast = sequential::correlation(state, chain, moments);
    CHECK(std::abs(brute - fast) < 1e-12);
  }
}

TEST_CASE("parallel and serial enumeration are bit-identical") {
  CounterRng rng(34, 0);
  for (int twice_s : {1, 3}) {
    SpinSystem sys(twice_s);
    DiagonalState state = DiagonalState::pure_max(sys);
    MeasurementChain chain = random_chain(rng, sys, 5);
    auto moments = plain_moments(5);

    double par = sequential::correlation_enumerated(state, chain, moments, true);
    double ser =
        sequential::correlation_enumerated(state, chain, moments, false);
    CHECK(par == ser);  // bitwise, not approximate
  }
}

TEST_CASE("enumeration refuses chains beyond its path cap") {
  SpinSystem sys(12);  // dim 13; 13^7 > 10^7
  DiagonalState state = DiagonalState::pure_max(sys);
  MeasurementChain chain =
      MeasurementChain::coplanar(sys, std::vector<double>(7, 0.1));
  CHECK_THROWS_AS(
      sequential::correlation_enumerated(state, chain, plain_moments(7)),
      config_error);
}

TEST_CASE("closed forms match enumeration at a generic geometry") {
  // Frozen reference: s = 2 pure m = +2, step angles 0.3, 0.7, 1.1 rad.
  SpinSystem sys(4);
  DiagonalState state = DiagonalState::pure_max(sys);
  MeasurementChain chain = MeasurementChain::coplanar(sys, {0.3, 0.7, 1.1});

  double brute =
      sequential::correlation_enumerated(state, chain, plain_moments(3));
  CHECK(brute == doctest::Approx(2.34478791729464).epsilon(1e-12));

  double closed = sequential::closed_three(state, 0.3, 0.7, 1.1);
  CHECK(std::abs(closed - brute) < 1e-12);
}

TEST_CASE("closed forms match enumeration on random states and angles") {
  CounterRng rng(35, 0);
  for (int twice_s : {1, 2, 3, 4}) {
    SpinSystem sys(twice_s);
    for (int rep = 0; rep < 8; ++rep) {
      // Random normalized diagonal state
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
      double b2 = sequential::correlation_enumerated(state, chain,
                                                     {{1, 1}, {2, 1}});
      double b3 =
          sequential::correlation_enumerated(state, chain, plain_moments(3));
      CHECK(std::abs(sequential::closed_one(state, t1) - b1) < 1e-11);
      CHECK(std::abs(sequential::closed_two(state, t1, t12) - b2) < 1e-11);
      CHECK(std::abs(sequential::closed_three(state, t1, t12, t23) - b3) <
            1e-11);
    }
  }
}

TEST_CASE("closed forms are exact for non-coplanar chains too") {
  // Each moment depends only on successive relative angles, so a chain with
  // the same step angles but out-of-plane azimuths must give the same value.
  CounterRng rng(36, 0);
  SpinSystem sys(3);
  DiagonalState state = DiagonalState::pure_max(sys);

  MeasurementChain chain{sys, {}, Convention::physical};
  chain.dirs.push_back(Direction{0.4, 0.0});
  chain.dirs.push_back(Direction{0.9, 1.3});
  chain.dirs.push_back(Direction{1.7, 2.6});

  Vec3 a0{0.0, 0.0, 1.0};
  double t1 = angle_between(Direction::from_unit(a0), chain.dirs[0]);
  double t12 = angle_between(chain.dirs[0], chain.dirs[1]);
  double t23 = angle_between(chain.dirs[1], chain.dirs[2]);

  double b3 =
      sequential::correlation_enumerated(state, chain, plain_moments(3));
  CHECK(std::abs(sequential::closed_three(state, t1, t12, t23) - b3) < 1e-12);
}

TEST_CASE("third-moment coefficients vanish for s <= 1") {
  for (int twice_s : {1, 2}) {
    SpinSystem sys(twice_s);
    DiagonalState state = DiagonalState::pure_max(sys);
    double p = -1, q = -1;
    sequential::third_moment_coefficients(state, &p, &q);
    CHECK(std::abs(p) < 1e-14);
    // Q then carries the whole third moment: <alpha_1^3> = Q cos theta1
    double m3 = state.moment(3);
    CHECK(q == doctest::Approx(m3).epsilon(1e-12));
  }
  // s = 3/2 has a genuine cubic term
  SpinSystem sys(3);
  DiagonalState state = DiagonalState::pure_max(sys);
  double p = 0, q = 0;
  sequential::third_moment_coefficients(state, &p, &q);
  CHECK(std::abs(p) > 0.1);
}

TEST_CASE("aligned n-step closed form matches enumeration") {
  for (int twice_s : {1, 2, 3}) {
    SpinSystem sys(twice_s);
    DiagonalState state = DiagonalState::pure_max(sys);
    for (int n : {4, 5}) {
      std::vector<double> steps(n, 0.0);
      steps[n - 3] = 0.5;
      steps[n - 2] = 1.1;
      steps[n - 1] = 0.8;
      MeasurementChain chain = MeasurementChain::coplanar(sys, steps);
      double brute =
          sequential::correlation_enumerated(state, chain, plain_moments(n));
      double closed = sequential::closed_n_aligned(sys, n, 0.5, 1.1, 0.8);
      CHECK(std::abs(brute - closed) < 1e-11);
    }
  }
}

TEST_CASE("spin-1/2 product identities hold for every subset") {
  CounterRng rng(37, 0);
  SpinSystem sys(1);
  for (int rep = 0; rep < 4; ++rep) {
    DiagonalState state{sys, Direction::from_unit(rng.unit_vector()), {}};
    double w = rng.uniform();
    state.populations = {w, 1.0 - w};
    int n = 3 + static_cast<int>(rng.below(3));
    MeasurementChain chain = random_chain(rng, sys, n, Convention::pm_one);
    CHECK(sequential::chain_identities_check(state, chain) < 1e-12);
  }
}

TEST_CASE("pm_one convention rejects higher spin") {
  SpinSystem sys(2);
  MeasurementChain chain = MeasurementChain::coplanar(sys, {0.3, 0.4});
  chain.conv = Convention::pm_one;
  DiagonalState state = DiagonalState::pure_max(sys);
  CHECK_THROWS_AS(
      sequential::correlation(state, chain, plain_moments(2)),
      config_error);
  CHECK_THROWS_AS(
      MeasurementChain::coplanar(sys, {0.3, 0.4}, Convention::pm_one),
      config_error);
}

TEST_CASE("state constructors and validation") {
  SpinSystem sys(4);

  DiagonalState max = DiagonalState::pure_max(sys);
  CHECK(max.populations.size() == 5);
  CHECK(max.populations[0] == 1.0);
  CHECK(max.moment(1) == doctest::Approx(2.0));
  CHECK(max.xi() == doctest::Approx(1.0));

  DiagonalState down = DiagonalState::pure(sys, -4);
  CHECK(down.populations[4] == 1.0);
  CHECK(down.moment(1) == doctest::Approx(-2.0));

  CHECK_THROWS_AS(DiagonalState::pure(sys, 3), config_error);   // parity
  CHECK_THROWS_AS(DiagonalState::pure(sys, 6), config_error);   // range

  DiagonalState bad{sys, Direction{}, {0.5, 0.5}};  // wrong length
  CHECK_THROWS_AS(bad.validate(), config_error);
  DiagonalState neg{sys, Direction{}, {1.5, 0.0, 0.0, 0.0, -0.5}};
  CHECK_THROWS_AS(neg.validate(), config_error);
}

TEST_CASE("from_xi hits the requested second moment") {
  // Integer spin reaches xi = 0 with the m = 0 level; half-integer spin
  // bottoms out at 1/(4s^2).
  SpinSystem s1(2);
  for (double xi : {0.0, 0.33, 0.5, 0.77, 1.0}) {
    DiagonalState st = DiagonalState::from_xi(s1, xi);
    st.validate();
    CHECK(st.xi() == doctest::Approx(xi).epsilon(1e-12));
  }
  SpinSystem s32(3);
  double floor32 = 1.0 / (4.0 * 1.5 * 1.5);
  for (double xi : {floor32, 0.5, 0.9, 1.0}) {
    DiagonalState st = DiagonalState::from_xi(s32, xi);
    st.validate();
    CHECK(st.xi() == doctest::Approx(xi).epsilon(1e-12));
  }
  CHECK_THROWS_AS(DiagonalState::from_xi(s32, floor32 / 2), config_error);
  CHECK_THROWS_AS(DiagonalState::from_xi(s1, 1.2), config_error);
}

TEST_CASE("with_noise mixes toward the maximally mixed state") {
  SpinSystem sys(2);
  DiagonalState st = DiagonalState::pure_max(sys);
  DiagonalState full = st.with_noise(1.0);
  for (double p : full.populations)
    CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  DiagonalState none = st.with_noise(0.0);
  CHECK(none.populations[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(st.with_noise(-0.1), config_error);
  CHECK_THROWS_AS(st.with_noise(1.1), config_error);

  // Noise scaling of the pair moment matches the dedicated coefficients:
  // recompute via closed_two on the mixed state directly.
  DiagonalState half = st.with_noise(0.4);
  double direct = sequential::closed_two(half, 0.6, 0.9);
  MeasurementChain chain = MeasurementChain::coplanar(sys, {0.6, 0.9});
  double brute = sequential::correlation_enumerated(half, chain,
                                                    {{1, 1}, {2, 1}});
  CHECK(std::abs(direct - brute) < 1e-12);
}
