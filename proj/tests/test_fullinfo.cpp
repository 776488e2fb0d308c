#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "infomech/fullinfo.hpp"
#include "infomech/optlp.hpp"

using namespace infomech;

namespace {

PayoffMatrix env_m3(double u12, double u22) {
  PayoffMatrix env;
  env.n = 2;
  env.m = 3;
  env.u = {{1.0, u12, 0.0}, {0.0, u22, 1.0}};
  return env;
}

PayoffMatrix table2() {
  PayoffMatrix env;
  env.n = 2;
  env.m = 4;
  env.u = {{1.0, 0.8, 0.6, 0.0}, {0.0, 0.5, 0.8, 1.0}};
  return env;
}

ContinuousDist bimodal() {
  // dens(t) proportional to 0.52 + 0.48 cos(4 pi t): strictly positive and
  // bimodal, which drives phi^- non-monotone.
  auto pdf = [](double t) { return (0.52 + 0.48 * std::cos(4.0 * M_PI * t)) / 0.52; };
  auto cdf = [](double t) {
    t = std::clamp(t, 0.0, 1.0);
    return (0.52 * t + 0.48 * std::sin(4.0 * M_PI * t) / (4.0 * M_PI)) / 0.52;
  };
  return ContinuousDist::make("bimodal", cdf, pdf);
}

}  // namespace

TEST_CASE("uniform virtual values need no ironing") {
  VirtualPair vp = virtual_values(uniform_dist(), 200);
  for (std::size_t i = 0; i < vp.minus.theta.size(); ++i) {
    double t = vp.minus.theta[i];
    CHECK_THAT(vp.minus.phi[i], Catch::Matchers::WithinAbs(2.0 * t, 1e-12));
    CHECK_THAT(vp.plus.phi[i], Catch::Matchers::WithinAbs(2.0 * t - 1.0, 1e-12));
    CHECK_THAT(vp.minus.phi_ironed[i], Catch::Matchers::WithinAbs(vp.minus.phi[i], 1e-6));
    CHECK_THAT(vp.plus.phi_ironed[i], Catch::Matchers::WithinAbs(vp.plus.phi[i], 1e-6));
  }
  CHECK(vp.minus.ironed_intervals.empty());
  CHECK(vp.plus.ironed_intervals.empty());
}

TEST_CASE("monotone exponential virtuals are fixed points of ironing") {
  VirtualPair vp = virtual_values(exponential_trunc(2.0), 200);
  for (std::size_t i = 0; i < vp.minus.theta.size(); ++i) {
    CHECK_THAT(vp.minus.phi_ironed[i], Catch::Matchers::WithinAbs(vp.minus.phi[i], 1e-6));
    CHECK_THAT(vp.plus.phi_ironed[i], Catch::Matchers::WithinAbs(vp.plus.phi[i], 1e-6));
  }
}

TEST_CASE("bimodal density requires ironing") {
  // First confirm non-monotonicity of phi^- on a grid.
  ContinuousDist d = bimodal();
  bool nonmonotone = false;
  double prev = 0.0;
  for (int i = 0; i <= 400; ++i) {
    double t = i / 400.0;
    double v = t * d.pdf(t) + d.cdf(t);
    if (i > 0 && v < prev - 1e-9) nonmonotone = true;
    prev = v;
  }
  REQUIRE(nonmonotone);

  VirtualPair vp = virtual_values(d, 400);
  CHECK_FALSE(vp.minus.ironed_intervals.empty());
  // Ironed values are nondecreasing and phi-tilde- >= phi-tilde+ pointwise.
  for (std::size_t i = 1; i < vp.minus.phi_ironed.size(); ++i) {
    CHECK(vp.minus.phi_ironed[i] >= vp.minus.phi_ironed[i - 1] - 1e-9);
    CHECK(vp.plus.phi_ironed[i] >= vp.plus.phi_ironed[i - 1] - 1e-9);
  }
  for (std::size_t i = 0; i < vp.minus.phi_ironed.size(); ++i)
    CHECK(vp.minus.phi_ironed[i] >= vp.plus.phi_ironed[i] - 1e-9);

  // Ironing preserves the total integral: int phi-tilde dr = H(1).
  double ironed_total = 0.0, raw_total = 0.0;
  int R = 2000;
  for (int t = 0; t < R; ++t) {
    double r0 = static_cast<double>(t) / R, r1 = static_cast<double>(t + 1) / R;
    auto at = [&](const std::vector<double>& v, double r) {
      double x = d.inv_cdf(r);
      std::size_t i = static_cast<std::size_t>(
          std::min<double>(x * (v.size() - 1), static_cast<double>(v.size() - 1)));
      return v[i];
    };
    ironed_total += 0.5 * (at(vp.minus.phi_ironed, r0) + at(vp.minus.phi_ironed, r1)) / R;
    raw_total += 0.5 * (at(vp.minus.phi, r0) + at(vp.minus.phi, r1)) / R;
  }
  CHECK_THAT(ironed_total, Catch::Matchers::WithinAbs(raw_total, 5e-3));
}

TEST_CASE("largest admissible full-information price") {
  CHECK_THAT(p_hat(env_m3(0.6, 0.6)), Catch::Matchers::WithinAbs(0.4, 1e-12));
  CHECK_THAT(p_hat(table2()),
             Catch::Matchers::WithinAbs(std::min(0.2 / 0.7, 0.2 / 0.8), 1e-12));
  CHECK_THAT(p_hat(matching_environment(2)), Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("price solving") {
  PayoffMatrix unit = matching_environment(2);
  auto p = solve_price(unit, uniform_dist());
  REQUIRE(p.has_value());
  CHECK_THAT(*p, Catch::Matchers::WithinAbs(0.25, 1e-9));

  // p_hat = 0.2 < 1/4 for the uniform: no admissible price.
  CHECK_FALSE(solve_price(env_m3(0.8, 0.8), uniform_dist()).has_value());

  // Exponential: the bisection root satisfies W(root) ~ 0.
  ContinuousDist ex = exponential_trunc(1.0);
  auto pe = solve_price(unit, ex);
  REQUIRE(pe.has_value());
  double tl = *pe, th = 1.0 - *pe;
  double W = tl * ex.pdf(tl) + ex.cdf(tl) - ((th - 1.0) * ex.pdf(th) + ex.cdf(th));
  CHECK_THAT(W, Catch::Matchers::WithinAbs(0.0, 1e-8));
}

TEST_CASE("certificate for the uniform quarter price") {
  PayoffMatrix unit = matching_environment(2);
  Certificate ok = check_fullinfo_optimal(unit, uniform_dist(), 0.25, 0.5, 0.0);
  CHECK(ok.cond1);
  CHECK(ok.cond2);
  CHECK(ok.cond3);
  CHECK(ok.ok);

  // Overpricing breaks the sign pattern on the middle interval.
  Certificate bad = check_fullinfo_optimal(unit, uniform_dist(), 0.4, 0.8, 0.0);
  CHECK_FALSE(bad.cond2);
}

TEST_CASE("the interior-kink environment certifies only its LP price") {
  // u12 - u22 = u11 - 1 here, so a positive lambda is admissible in
  // principle; still, under the uniform the sign conditions single out
  // p = 1/4 with eta = 1/2, and no multiplier pair rescues p = 0.4.
  PayoffMatrix env = env_m3(0.6, 0.6);
  REQUIRE(check_premise(env, uniform_dist()));
  auto p = solve_price(env, uniform_dist());
  REQUIRE(p.has_value());
  CHECK_THAT(*p, Catch::Matchers::WithinAbs(0.25, 1e-9));

  VirtualPair vp = virtual_values(uniform_dist(), 400);
  Certificate good = check_fullinfo_optimal(env, uniform_dist(), *p, 0.5, 0.0, &vp);
  CHECK(good.ok);

  bool any = false;
  for (double eta = 0.0; eta <= 1.6 && !any; eta += 0.02)
    for (double lam : {0.0, 0.05, 0.1, 0.2, 0.4}) {
      Certificate c = check_fullinfo_optimal(env, uniform_dist(), 0.4, eta, lam, &vp);
      if (c.ok) any = true;
    }
  CHECK_FALSE(any);

  // Consistency: the LP confirms 0.4 is not revenue-optimal.
  auto [sol, mech] = solve_optmech(env, uniform_dist(), 200);
  double rev_at_04 = 0.4 * 0.2;  // Pr[u(theta) <= 0.6] = 0.2 under uniform
  CHECK(sol.revenue > rev_at_04 + 0.03);
}

TEST_CASE("premise checks") {
  CHECK(check_premise(env_m3(0.5, 0.5), uniform_dist()));
  CHECK_FALSE(check_premise(env_m3(0.9, 0.5), uniform_dist()));  // p_hat too small
  CHECK(check_premise(matching_environment(2), normal_trunc(0.6)));
  CHECK_FALSE(check_premise(matching_environment(2), exponential_trunc(3.0)));
}

TEST_CASE("premise plus root implies the LP optimum posts full information") {
  PayoffMatrix env = env_m3(0.6, 0.6);
  auto p = solve_price(env, uniform_dist());
  REQUIRE(p.has_value());
  double full_info_rev = frev(env, discretize(uniform_dist(), 200)).revenue;
  auto [sol, mech] = solve_optmech(env, uniform_dist(), 200);
  CHECK_THAT(sol.revenue, Catch::Matchers::WithinAbs(full_info_rev, 2e-3));
  CHECK_THAT(full_info_rev, Catch::Matchers::WithinAbs(*p * (1.0 - 2.0 * *p), 2e-3));
}
