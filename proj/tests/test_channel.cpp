#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>

#include "twentyq/channel.hpp"
#include "twentyq/rng.hpp"

using twentyq::check_continuity;
using twentyq::LipschitzFn;
using twentyq::MdChannel;
using twentyq::Rng;

TEST_SUITE_BEGIN("channel");

TEST_CASE("state map evaluation") {
  const LipschitzFn rising = LipschitzFn::affine(0.1, 0.3);
  CHECK(rising(0.0) == doctest::Approx(0.1));
  CHECK(rising(0.5) == doctest::Approx(0.25));

  const LipschitzFn falling = LipschitzFn::affine(0.4, -0.3);
  CHECK(falling(1.0) == doctest::Approx(0.1));

  const LipschitzFn flat = LipschitzFn::constant(0.2);
  for (double s : {0.0, 0.37, 1.0}) CHECK(flat(s) == doctest::Approx(0.2));
  CHECK(flat.is_constant());
  CHECK(rising.lipschitz_constant() == doctest::Approx(0.3));
  CHECK(falling.lipschitz_constant() == doctest::Approx(0.3));

  CHECK_THROWS_AS(rising(-0.01), std::domain_error);
  CHECK_THROWS_AS(rising(1.01), std::domain_error);
}

TEST_CASE("bsc transition probabilities match the crossover form") {
  const auto ch = MdChannel::bsc(0.5, LipschitzFn::affine(0.1, 0.3));
  // crossover at state 0.5 is 0.5 * 0.25 = 0.125
  CHECK(ch.transition_prob(0.5, 0, 1) == doctest::Approx(0.125));
  CHECK(ch.transition_prob(0.5, 0, 0) == doctest::Approx(0.875));

  const auto falling = MdChannel::bsc(0.5, LipschitzFn::affine(0.4, -0.3));
  CHECK(falling.transition_prob(0.0, 0, 0) == doctest::Approx(0.8));

  const auto noiseless = MdChannel::bsc(0.5, LipschitzFn::constant(0.0));
  CHECK(noiseless.transition_prob(0.3, 1, 1) == doctest::Approx(1.0));

  SUBCASE("rows are stochastic and symmetric across a random sweep") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
      const double a = 0.4 * rng.uniform01();
      const double b = (rng.uniform01() - 0.5) * 0.2;
      const LipschitzFn f{std::max(a, std::abs(b)), b};
      const double nu = 0.1 + 0.8 * rng.uniform01();
      if (nu * f.max_on_unit_interval() > 0.5 || f.min_on_unit_interval() < 0) continue;
      const auto c = MdChannel::bsc(nu, f);
      const double state = rng.uniform01();
      for (int x = 0; x < 2; ++x) {
        const double sum = c.transition_prob(state, x, 0) + c.transition_prob(state, x, 1);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
      }
      CHECK(c.transition_prob(state, 0, 1) == doctest::Approx(c.transition_prob(state, 1, 0)));
    }
  }

  SUBCASE("crossover is nondecreasing in the state for a rising map") {
    const auto c = MdChannel::bsc(0.9, LipschitzFn::affine(0.05, 0.4));
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
      const double cr = c.crossover(i / 100.0);
      CHECK(cr >= prev);
      prev = cr;
    }
  }

  CHECK_THROWS_AS(ch.transition_prob(1.5, 0, 0), std::domain_error);
  CHECK_THROWS_AS(ch.transition_prob(0.5, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(ch.transition_prob(0.5, 0, 2), std::invalid_argument);
}

TEST_CASE("construction rejects invalid channels") {
  CHECK_THROWS_AS(MdChannel::bsc(0.0, LipschitzFn::constant(0.1)), std::invalid_argument);
  CHECK_THROWS_AS(MdChannel::bsc(1.1, LipschitzFn::constant(0.1)), std::invalid_argument);
  // crossover would exceed 1/2 at the top of the range: reject, never clamp
  CHECK_THROWS_AS(MdChannel::bsc(1.0, LipschitzFn::affine(0.3, 0.3)), std::invalid_argument);
  CHECK_THROWS_AS(MdChannel::bsc(0.5, LipschitzFn::affine(-0.1, 0.3)), std::invalid_argument);
  CHECK_THROWS_AS(MdChannel::tabulated({0.0, 1.0}, {{{0.5, 0.6}, {0.5, 0.5}}, {{0.5, 0.5}, {0.5, 0.5}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MdChannel::tabulated({0.1, 1.0}, {{{0.5, 0.5}, {0.5, 0.5}}, {{0.5, 0.5}, {0.5, 0.5}}}),
                  std::invalid_argument);
}

TEST_CASE("tabulated channels interpolate linearly between anchors") {
  const auto ch = MdChannel::tabulated(
      {0.0, 1.0}, {{{0.9, 0.1}, {0.2, 0.8}}, {{0.7, 0.3}, {0.4, 0.6}}});
  CHECK(ch.transition_prob(0.0, 0, 0) == doctest::Approx(0.9));
  CHECK(ch.transition_prob(1.0, 0, 0) == doctest::Approx(0.7));
  CHECK(ch.transition_prob(0.5, 0, 0) == doctest::Approx(0.8));
  CHECK(ch.transition_prob(0.25, 1, 1) == doctest::Approx(0.75));
  for (double s : {0.0, 0.3, 0.77, 1.0}) {
    for (int x = 0; x < 2; ++x) {
      CHECK(std::abs(ch.transition_prob(s, x, 0) + ch.transition_prob(s, x, 1) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("sample_response is deterministic given the generator state") {
  const auto ch = MdChannel::bsc(0.5, LipschitzFn::affine(0.1, 0.3));
  Rng a(123), b(123);
  for (int i = 0; i < 500; ++i) {
    CHECK(ch.sample_response(0.4, i % 2, a) == ch.sample_response(0.4, i % 2, b));
  }

  SUBCASE("noiseless responses equal the input") {
    const auto clean = MdChannel::bsc(1.0, LipschitzFn::constant(0.0));
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
      const int x = i % 2;
      CHECK(clean.sample_response(rng.uniform01(), x, rng) == x);
    }
  }
}

TEST_CASE("empirical response frequencies match the law") {
  const auto ch = MdChannel::bsc(0.5, LipschitzFn::affine(0.1, 0.3));
  Rng rng(2024);

  SUBCASE("flip rate at a million samples") {
    // crossover 0.125; 3 sigma of the estimator is ~0.001
    int flips = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
      if (ch.sample_response(0.5, 0, rng) == 1) ++flips;
    }
    CHECK(std::abs(static_cast<double>(flips) / n - 0.125) <= 0.001);
  }

  SUBCASE("chi-square at 1e5 samples, significance 0.001") {
    const int n = 100000;
    const double state = 0.8;
    int counts[2] = {0, 0};
    for (int i = 0; i < n; ++i) ++counts[ch.sample_response(state, 1, rng)];
    double stat = 0.0;
    for (int y = 0; y < 2; ++y) {
      const double expected = n * ch.transition_prob(state, 1, y);
      stat += (counts[y] - expected) * (counts[y] - expected) / expected;
    }
    CHECK(stat < 10.828);  // chi-square df=1 critical value at 0.001
  }
}

TEST_CASE("continuity check") {
  SUBCASE("constant maps give a zero left-hand side") {
    const auto ch = MdChannel::bsc(0.8, LipschitzFn::constant(0.25));
    const auto rep = check_continuity(ch, 0.5, 0.1, 0.0);
    CHECK(rep.lhs == doctest::Approx(0.0));
    CHECK(rep.satisfied);
  }

  SUBCASE("mdBSC with f(q)=q against the explicit four-ratio oracle") {
    const auto ch = MdChannel::bsc(0.5, LipschitzFn::affine(0.0, 1.0));
    const double q = 0.4, xi = 0.01;
    const auto rep = check_continuity(ch, q, xi, 100.0);
    double oracle = 0.0;
    for (double qp : {q - xi, q + xi}) {
      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
          oracle = std::max(oracle, std::abs(std::log(ch.transition_prob(q, x, y) /
                                                      ch.transition_prob(qp, x, y))));
        }
      }
    }
    CHECK(rep.lhs == doctest::Approx(oracle));
    CHECK(rep.satisfied);
    CHECK_FALSE(check_continuity(ch, q, xi, 0.1).satisfied);
  }

  SUBCASE("perturbation outside the valid range is a precondition error") {
    const auto ch = MdChannel::bsc(0.5, LipschitzFn::constant(0.2));
    CHECK_THROWS_AS(check_continuity(ch, 0.1, 0.1, 1.0), std::domain_error);
    CHECK_THROWS_AS(check_continuity(ch, 0.9, 0.2, 1.0), std::domain_error);
  }

  SUBCASE("a vanishing entry facing a nonzero one reports an infinite lhs") {
    const auto ch = MdChannel::tabulated(
        {0.0, 0.5, 1.0},
        {{{1.0, 0.0}, {0.0, 1.0}}, {{1.0, 0.0}, {0.0, 1.0}}, {{0.5, 0.5}, {0.5, 0.5}}});
    const auto rep = check_continuity(ch, 0.5, 0.2, 1e9);
    CHECK(std::isinf(rep.lhs));
    CHECK_FALSE(rep.satisfied);
  }
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("channel");

TEST_CASE("wide-output sampling matches the interpolated law") {
  const auto ch = MdChannel::tabulated(
      {0.0, 1.0},
      {{{0.7, 0.2, 0.1}, {0.1, 0.2, 0.7}}, {{0.5, 0.3, 0.2}, {0.2, 0.3, 0.5}}});
  Rng rng(31337);
  const double state = 0.6;
  const int n = 100000;
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) ++counts[ch.sample_response(state, 1, rng)];
  double stat = 0.0;
  for (int y = 0; y < 3; ++y) {
    const double expected = n * ch.transition_prob(state, 1, y);
    stat += (counts[y] - expected) * (counts[y] - expected) / expected;
  }
  CHECK(stat < 13.816);  // chi-square df=2 critical value at 0.001
}

TEST_SUITE_END();
