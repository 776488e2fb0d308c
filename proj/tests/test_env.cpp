#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "infomech/env.hpp"
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

PayoffMatrix from_rows(std::vector<double> r1, std::vector<double> r2) {
  PayoffMatrix env;
  env.n = 2;
  env.m = static_cast<int>(r1.size());
  env.u = {std::move(r1), std::move(r2)};
  return env;
}

}  // namespace

TEST_CASE("table-2 matrix is already canonical") {
  auto [env, log] = canonicalize(table2());
  CHECK(env.m == 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK_THAT(env.u[i][j], Catch::Matchers::WithinAbs(table2().u[i][j], 1e-12));
  CHECK(log.shift1 == 0.0);
  CHECK(log.shift2 == 0.0);
  CHECK(log.scale == 1.0);
  CHECK_FALSE(log.swapped);
  CHECK(log.permutation == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("dominated action is removed") {
  auto [env, log] = canonicalize(from_rows({1.0, 0.5, 0.0}, {0.0, 0.25, 1.0}));
  CHECK(env.m == 2);
  CHECK(env.u == std::vector<std::vector<double>>{{1.0, 0.0}, {0.0, 1.0}});
  CHECK(log.permutation == std::vector<int>{0, 2});

  // Oracle: the middle action's line never exceeds the envelope of the
  // other two on a 10^4 grid.
  for (int g = 0; g <= 10000; ++g) {
    double th = g / 10000.0;
    double mid = th * 0.5 + (1.0 - th) * 0.25;
    double envl = std::max(th * 1.0, (1.0 - th) * 1.0);
    CHECK(mid <= envl + 1e-12);
  }
}

TEST_CASE("pure scaling is recorded") {
  auto [env, log] = canonicalize(from_rows({2.0, 0.0}, {0.0, 2.0}));
  CHECK(env.u == std::vector<std::vector<double>>{{1.0, 0.0}, {0.0, 1.0}});
  CHECK_THAT(log.scale, Catch::Matchers::WithinAbs(2.0, 1e-12));
}

TEST_CASE("state swap keeps canonical orientation") {
  auto [env, log] = canonicalize(from_rows({0.5, 0.0}, {0.0, 1.0}));  // u11 < u2m raw
  CHECK(log.swapped);
  CHECK(is_canonical(env));
  CHECK(env.u[0][0] >= env.u[1][env.m - 1] - 1e-12);
}

TEST_CASE("degenerate environments are rejected") {
  CHECK_THROWS_WITH(canonicalize(from_rows({1.0, 0.5}, {0.2, 0.0})),
                    Catch::Matchers::ContainsSubstring("degenerate"));
  CHECK_THROWS(canonicalize(from_rows({1.0}, {0.0})));
}

TEST_CASE("canonicalize is idempotent") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int done = 0;
  for (int it = 0; it < 200 && done < 40; ++it) {
    PayoffMatrix raw;
    raw.n = 2;
    raw.m = 2 + it % 5;
    raw.u.assign(2, std::vector<double>(raw.m));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < raw.m; ++j) raw.u[i][j] = 3.0 * unif(rng) - 1.0;
    PayoffMatrix canon;
    try {
      canon = canonicalize(raw).first;
    } catch (const std::invalid_argument&) {
      continue;  // degenerate draw
    }
    ++done;
    auto [again, log2] = canonicalize(canon);
    REQUIRE(again.m == canon.m);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < canon.m; ++j)
        CHECK_THAT(again.u[i][j], Catch::Matchers::WithinAbs(canon.u[i][j], 1e-9));
    CHECK_THAT(log2.scale, Catch::Matchers::WithinAbs(1.0, 1e-9));
    CHECK_FALSE(log2.swapped);
  }
  CHECK(done >= 20);
}

TEST_CASE("transform log maps the raw matrix onto the canonical one") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int it = 0; it < 60; ++it) {
    PayoffMatrix raw;
    raw.n = 2;
    raw.m = 3 + it % 3;
    raw.u.assign(2, std::vector<double>(raw.m));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < raw.m; ++j) raw.u[i][j] = 4.0 * unif(rng) - 1.5;
    PayoffMatrix canon;
    TransformLog log;
    try {
      std::tie(canon, log) = canonicalize(raw);
    } catch (const std::invalid_argument&) {
      continue;
    }
    for (int j = 0; j < canon.m; ++j) {
      int src = log.permutation[j];
      double r1 = raw.u[log.swapped ? 1 : 0][src];
      double r2 = raw.u[log.swapped ? 0 : 1][src];
      CHECK_THAT((r1 - log.shift1) / log.scale, Catch::Matchers::WithinAbs(canon.u[0][j], 1e-9));
      CHECK_THAT((r2 - log.shift2) / log.scale, Catch::Matchers::WithinAbs(canon.u[1][j], 1e-9));
    }
  }
}

TEST_CASE("IR curve of the four-action example") {
  IRCurve curve = ir_curve(table2());
  REQUIRE(curve.piece_slopes.size() == 4);
  std::vector<double> expect{-1.0, -0.2, 0.3, 1.0};
  for (int i = 0; i < 4; ++i)
    CHECK_THAT(curve.piece_slopes[i], Catch::Matchers::WithinAbs(expect[i], 1e-12));
  CHECK(curve.curve.piece_count() == 4);
}

TEST_CASE("matching environment IR curve") {
  IRCurve curve = ir_curve(matching_environment(2));
  CHECK(curve.piece_slopes == std::vector<double>{-1.0, 1.0});
  CHECK_THAT(curve.curve.value(0.5), Catch::Matchers::WithinAbs(0.5, 1e-15));
  CHECK(curve.curve.breakpoints()[1] == 0.5);
}

TEST_CASE("gap-construction environment has the interior piece") {
  LBConstruction c = lb_build(3, Rational::from_integer_fraction(1, 10));
  PayoffMatrix env;
  env.n = 2;
  env.m = 3;
  env.u.assign(2, std::vector<double>(3));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) env.u[i][j] = c.u[i][j].to_double();
  IRCurve curve = ir_curve(env);
  REQUIRE(curve.piece_slopes.size() == 3);
  CHECK_THAT(curve.piece_slopes[1], Catch::Matchers::WithinAbs(-0.01, 1e-15));
  // The interior piece covers [theta_1, theta_2] of the construction
  // (kink positions in floats carry ~1e-8 relative cancellation error).
  double t1 = c.theta[1].to_double(), t2 = c.theta[2].to_double();
  CHECK(curve.curve.breakpoints()[1] <= t1 * (1.0 + 1e-6));
  CHECK(curve.curve.breakpoints()[2] >= t2 * (1.0 - 1e-6));
}

TEST_CASE("uninformed value u(theta)") {
  PayoffMatrix env = table2();
  CHECK_THAT(u_of(env, 0.0), Catch::Matchers::WithinAbs(1.0, 1e-15));
  // Oracle: direct max over the four lines.
  double best = -1.0;
  for (int j = 0; j < 4; ++j) best = std::max(best, 0.25 * env.u[0][j] + 0.75 * env.u[1][j]);
  CHECK_THAT(u_of(env, 0.25), Catch::Matchers::WithinAbs(best, 1e-15));
  CHECK_THAT(u_of(env, 0.25), Catch::Matchers::WithinAbs(0.75, 1e-12));
  CHECK_THROWS(u_of(env, 1.5));
}

TEST_CASE("canonical anchors and slope ordering") {
  std::mt19937 rng(23);
  for (int it = 0; it < 20; ++it) {
    PayoffMatrix env = testutil::random_canonical_env(rng, 3 + it % 3);
    CHECK_THAT(u_of(env, 0.0), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(u_of(env, 1.0), Catch::Matchers::WithinAbs(env.u[0][0], 1e-12));
    IRCurve curve = ir_curve(env);
    for (std::size_t i = 1; i < curve.piece_slopes.size(); ++i)
      CHECK(curve.piece_slopes[i] > curve.piece_slopes[i - 1]);
  }
}

TEST_CASE("full-information gain U(theta)") {
  PayoffMatrix binary = matching_environment(2);
  CHECK_THAT(gain_of(binary, 0.3), Catch::Matchers::WithinAbs(0.3, 1e-15));

  PayoffMatrix m3 = matching_environment(3);
  CHECK_THAT(gain_of(m3, {1.0 / 3.0, 1.0 / 3.0}), Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-12));
  CHECK(gain_of(m3, {1.0, 0.0}) == 0.0);
  CHECK(gain_of(m3, {0.0, 0.0}) == 0.0);
  CHECK(gain_of(binary, 0.0) == 0.0);
  CHECK(gain_of(binary, 1.0) == 0.0);
  for (int g = 1; g < 20; ++g) CHECK(gain_of(binary, g / 20.0) > 0.0);
  CHECK_THROWS(gain_of(m3, {0.8, 0.5}));
}
