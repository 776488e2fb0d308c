#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "infomech/experiment.hpp"
#include "infomech/lowerbound.hpp"
#include "test_util.hpp"

using namespace infomech;

namespace {

PayoffMatrix table2() {
  PayoffMatrix env;
  env.n = 2;
  env.m = 4;
  env.u = {{1.0, 0.8, 0.6, 0.0}, {0.0, 0.5, 0.8, 1.0}};
  return env;
}

// All m^m interpretation maps, for the exhaustive oracle.
std::vector<Interpretation> all_sigmas(int m) {
  std::vector<Interpretation> out;
  std::vector<int> cur(m, 0);
  for (;;) {
    out.push_back(cur);
    int k = m - 1;
    while (k >= 0 && cur[k] == m - 1) cur[k--] = 0;
    if (k < 0) break;
    ++cur[k];
  }
  return out;
}

}  // namespace

TEST_CASE("forced-interpretation values") {
  PayoffMatrix env = matching_environment(2);
  Experiment full = fully_informative(env);
  CHECK_THAT(value_sigma(env, 0.4, full, identity_interpretation(2)),
             Catch::Matchers::WithinAbs(1.0, 1e-15));

  Experiment none = no_information(env);
  Interpretation always_m{1, 1};
  for (double th : {0.0, 0.3, 0.9})
    CHECK_THAT(value_sigma(env, th, none, always_m),
               Catch::Matchers::WithinAbs((1.0 - th) * 1.0, 1e-15));

  // Gap-construction experiment E_1 at theta_1: identity value 1 + theta l_1.
  LBConstruction c = lb_build(3, Rational::from_integer_fraction(1, 10));
  PayoffMatrix lbenv;
  lbenv.n = 2;
  lbenv.m = 3;
  lbenv.u.assign(2, std::vector<double>(3));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) lbenv.u[i][j] = c.u[i][j].to_double();
  Experiment e1 = c.experiment_float(1);
  double t1 = c.theta[1].to_double();
  CHECK_THAT(value_sigma(lbenv, t1, e1, identity_interpretation(3)),
             Catch::Matchers::WithinAbs(1.0 - 1e-10, 1e-18));

  CHECK_THROWS(value_sigma(env, 0.5, none, Interpretation{0}));
}

TEST_CASE("optimal interpretation value") {
  PayoffMatrix env = table2();
  Experiment full = fully_informative(env);
  // Simplex vertices get the best per-state payoff.
  CHECK_THAT(value_best(env, 1.0, full).first, Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THAT(value_best(env, 0.0, full).first, Catch::Matchers::WithinAbs(1.0, 1e-15));
  // Fully informative at any prior: sum_i theta_i max_j u_ij.
  for (double th : {0.2, 0.5, 0.8})
    CHECK_THAT(value_best(env, th, full).first, Catch::Matchers::WithinAbs(1.0, 1e-15));
}

TEST_CASE("recommendations of the three-state experiment are obeyed") {
  PayoffMatrix env = matching_environment(3);
  Experiment pi;
  pi.n = pi.m = 3;
  double y1 = 0.25, y2 = 0.25;
  pi.pi = {{y1, 0.0, 1.0 - y1}, {0.0, y2, 1.0 - y2}, {0.0, 0.0, 1.0}};
  std::vector<double> theta{0.2, 0.2};

  auto [best, sigma] = value_best(env, theta, pi);
  double identity_value = value_sigma(env, theta, pi, identity_interpretation(3));
  CHECK_THAT(best, Catch::Matchers::WithinAbs(identity_value, 1e-15));

  // Oracle: exhaustive enumeration over all 27 maps.
  double oracle = -1.0;
  for (const auto& s : all_sigmas(3)) oracle = std::max(oracle, value_sigma(env, theta, pi, s));
  CHECK_THAT(best, Catch::Matchers::WithinAbs(oracle, 1e-15));
}

TEST_CASE("value_best dominates every interpretation") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int it = 0; it < 25; ++it) {
    PayoffMatrix env = testutil::random_canonical_env(rng, 3);
    Experiment e;
    e.n = 2;
    e.m = 3;
    e.pi.assign(2, std::vector<double>(3));
    for (int i = 0; i < 2; ++i) {
      double a = unif(rng), b = unif(rng) * (1.0 - a);
      e.pi[i] = {a, b, 1.0 - a - b};
    }
    double th = unif(rng);
    double best = value_best(env, th, e).first;
    for (const auto& s : all_sigmas(3)) CHECK(best >= value_sigma(env, th, e, s) - 1e-12);
  }
}

TEST_CASE("q parameterization round trip") {
  PayoffMatrix env = table2();  // u11 = u2m = 1
  double u2m = 1.0, u11 = 1.0;
  for (int g = 0; g <= 100; ++g) {
    double q = -u2m + (u11 + u2m) * g / 100.0;
    Experiment e = experiment_of(env, q);
    CHECK(is_semi_informative(e));
    CHECK_THAT(q_of(env, e).q, Catch::Matchers::WithinAbs(q, 1e-12));
  }
  // Boundaries.
  Experiment lo = experiment_of(env, -1.0);
  CHECK(lo.pi[0][0] == 0.0);
  CHECK(lo.pi[1][3] == 1.0);
  Experiment mid = experiment_of(env, 0.0);  // q = u11 - u2m: fully informative
  CHECK(mid.pi[0][0] == 1.0);
  CHECK(mid.pi[1][3] == 1.0);

  Experiment interior{2, 4, {{0.0, 0.5, 0.0, 0.5}, {0.0, 0.0, 0.0, 1.0}}};
  CHECK_THROWS(q_of(env, interior));
}

TEST_CASE("pattern 2 arises above u11 - u2m") {
  PayoffMatrix env;
  env.n = 2;
  env.m = 2;
  env.u = {{1.2, 0.0}, {0.0, 1.0}};
  Experiment e = experiment_of(env, 0.5);
  CHECK(e.pi[0][0] == 1.0);
  CHECK_THAT(e.pi[1][1], Catch::Matchers::WithinAbs(0.7, 1e-12));
}

TEST_CASE("value_star_q matches the experiment it names") {
  PayoffMatrix unit = matching_environment(2);
  CHECK_THAT(value_star_q(unit, -1.0, 0.3), Catch::Matchers::WithinAbs(0.7, 1e-15));
  for (double th : {0.1, 0.5, 0.9})
    CHECK_THAT(value_star_q(unit, 0.0, th), Catch::Matchers::WithinAbs(1.0, 1e-15));

  PayoffMatrix env;
  env.n = 2;
  env.m = 2;
  env.u = {{1.2, 0.0}, {0.0, 1.0}};
  CHECK_THAT(value_star_q(env, 0.5, 0.4), Catch::Matchers::WithinAbs(0.9, 1e-12));
  for (int g = 0; g <= 40; ++g) {
    double q = -1.0 + 2.2 * g / 40.0;
    for (double th : {0.0, 0.25, 0.7, 1.0})
      CHECK_THAT(value_star_q(env, q, th),
                 Catch::Matchers::WithinAbs(value_star(env, th, experiment_of(env, q)), 1e-12));
  }
}

TEST_CASE("interior-signal mass moves without changing identity utility") {
  PayoffMatrix env = table2();
  Experiment e;
  e.n = 2;
  e.m = 4;
  e.pi = {{0.7, 0.0, 0.3, 0.0}, {0.25, 0.5, 0.0, 0.25}};
  auto [fr, price] = to_fully_recommending(env, e, 0.1);
  CHECK(price == 0.1);
  for (int k = 1; k + 1 < 4; ++k) {
    CHECK(fr.pi[0][k] == 0.0);
    CHECK(fr.pi[1][k] == 0.0);
  }
  // The state-2 split of the 0.5 mass is 0.25 up, 0.25 down.
  CHECK_THAT(fr.pi[1][0], Catch::Matchers::WithinAbs(0.5, 1e-12));
  CHECK_THAT(fr.pi[1][3], Catch::Matchers::WithinAbs(0.5, 1e-12));
  fr.validate();
  for (int g = 0; g <= 1000; ++g) {
    double th = g / 1000.0;
    CHECK_THAT(value_star(env, th, fr),
               Catch::Matchers::WithinAbs(value_star(env, th, e), 1e-10));
  }

  // Already fully recommending: unchanged.
  Experiment semi = experiment_of(env, -0.4);
  auto [same, p2] = to_fully_recommending(env, semi, 0.2);
  CHECK(same.pi == semi.pi);
  CHECK(p2 == 0.2);
}

TEST_CASE("semi-informativization shifts mass and price together") {
  PayoffMatrix env = matching_environment(2);
  Experiment e;
  e.n = 2;
  e.m = 2;
  e.pi = {{0.8, 0.2}, {0.3, 0.7}};
  auto [out, price] = to_semi_informative(env, e, 0.0);
  CHECK_THAT(out.pi[0][0], Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(out.pi[1][1], Catch::Matchers::WithinAbs(0.9, 1e-12));
  CHECK_THAT(price, Catch::Matchers::WithinAbs(0.2, 1e-12));
  for (int g = 0; g <= 1000; ++g) {
    double th = g / 1000.0;
    CHECK_THAT(value_star(env, th, out) - price,
               Catch::Matchers::WithinAbs(value_star(env, th, e) - 0.0, 1e-10));
  }

  // Opposite case moves mass the other way.
  Experiment e2;
  e2.n = 2;
  e2.m = 2;
  e2.pi = {{0.6, 0.4}, {0.1, 0.9}};
  auto [out2, price2] = to_semi_informative(env, e2, 0.05);
  CHECK_THAT(out2.pi[1][1], Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(is_semi_informative(out2));
  for (int g = 0; g <= 1000; ++g) {
    double th = g / 1000.0;
    CHECK_THAT(value_star(env, th, out2) - price2,
               Catch::Matchers::WithinAbs(value_star(env, th, e2) - 0.05, 1e-10));
  }

  // Pattern 1/2 input: unchanged with the same price.
  Experiment semi = experiment_of(env, -0.3);
  auto [same, p3] = to_semi_informative(env, semi, 0.4);
  CHECK(same.pi == semi.pi);
  CHECK(p3 == 0.4);
}

TEST_CASE("full information realizes the gain over the IR curve") {
  std::mt19937 rng(41);
  for (int it = 0; it < 10; ++it) {
    PayoffMatrix env = testutil::random_canonical_env(rng, 4);
    Experiment full = fully_informative(env);
    for (int g = 0; g <= 100; ++g) {
      double th = g / 100.0;
      CHECK_THAT(value_best(env, th, full).first - u_of(env, th),
                 Catch::Matchers::WithinAbs(gain_of(env, th), 1e-12));
    }
  }
}
