#pragma once

// Virtual values, Myerson ironing on the quantile transform, and the
// optimality certificate for selling complete information.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "infomech/dist.hpp"
#include "infomech/env.hpp"
#include "infomech/pwl.hpp"

namespace infomech {

/// A virtual value and its ironed version, sampled on a common theta grid.
struct IronedFunction {
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> phi_ironed;
  std::vector<std::pair<double, double>> ironed_intervals;  // in theta space

  bool in_ironed_interior(double x, double slack = 1e-12) const {
    for (const auto& [lo, hi] : ironed_intervals)
      if (x > lo + slack && x < hi - slack) return true;
    return false;
  }
};

struct VirtualPair {
  IronedFunction minus;  // phi^-(t) = t f(t) + F(t)
  IronedFunction plus;   // phi^+(t) = (t-1) f(t) + F(t)
};

namespace detail {

/// Irons phi through H(r) = int_0^r phi(F^{-1}(x)) dx: the ironed value at
/// theta is the hull slope of conv(H) at r = F(theta).
inline IronedFunction iron(const ContinuousDist& dist,
                           const std::vector<double>& theta,
                           const std::vector<double>& phi, int r_points) {
  IronedFunction out;
  out.theta = theta;
  out.phi = phi;

  // phi is sampled on out.theta; interpolate at arbitrary abscissae.
  auto phi_at = [&](double x) {
    const auto& th = out.theta;
    auto it = std::upper_bound(th.begin(), th.end(), x);
    std::size_t i = (it == th.begin()) ? 0 : static_cast<std::size_t>(it - th.begin()) - 1;
    if (i + 1 >= th.size()) return phi.back();
    double w = (x - th[i]) / (th[i + 1] - th[i]);
    return phi[i] + w * (phi[i + 1] - phi[i]);
  };

  // H(r) = int_0^r phi(F^{-1}(x)) dx by cumulative trapezoid on the r-grid.
  std::vector<std::pair<double, double>> H(r_points);
  double acc = 0.0;
  double prev_v = 0.0;
  for (int t = 0; t < r_points; ++t) {
    double r = static_cast<double>(t) / (r_points - 1);
    double val = phi_at(dist.inv_cdf(r));
    if (t > 0) acc += 0.5 * (prev_v + val) / (r_points - 1);
    prev_v = val;
    H[t] = {r, acc};
  }

  PiecewiseLinear hull = lower_convex_hull(H);

  // Ironed r-intervals: maximal runs with H - G > 1e-10, at least 2 cells.
  std::vector<std::pair<double, double>> runs;       // in r space
  std::vector<double> run_slope;                     // flat hull slope per run
  int run_start = -1;
  for (int t = 0; t <= r_points; ++t) {
    bool above = t < r_points && H[t].second - hull.value(H[t].first) > 1e-10;
    if (above && run_start < 0) run_start = t;
    if (!above && run_start >= 0) {
      if (t - run_start >= 2) {
        int lo = std::max(run_start - 1, 0);
        int hi = std::min(t, r_points - 1);
        runs.push_back({H[lo].first, H[hi].first});
        run_slope.push_back((H[hi].second - H[lo].second) / (H[hi].first - H[lo].first));
        out.ironed_intervals.push_back({dist.inv_cdf(H[lo].first), dist.inv_cdf(H[hi].first)});
      }
      run_start = -1;
    }
  }

  // Outside the ironed intervals the hull coincides with H, so the ironed
  // value is the raw sample; inside, it is the flat hull-piece slope.
  out.phi_ironed = phi;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    double r = dist.cdf(theta[i]);
    for (std::size_t k = 0; k < runs.size(); ++k)
      if (r > runs[k].first && r < runs[k].second) {
        out.phi_ironed[i] = run_slope[k];
        break;
      }
  }
  return out;
}

}  // namespace detail

/// Samples phi^- and phi^+ on an (N+1)-point grid and irons both.
inline VirtualPair virtual_values(const ContinuousDist& dist, int N = 400,
                                  int r_points = 2001) {
  if (N < 2) throw std::invalid_argument("virtual_values: N >= 2");
  std::vector<double> theta(N + 1), minus(N + 1), plus(N + 1);
  for (int i = 0; i <= N; ++i) {
    double t = static_cast<double>(i) / N;
    double f = dist.pdf(t);
    if (i > 0 && i < N && !(f > 0.0))
      throw std::invalid_argument("virtual_values: pdf must be positive on (0,1)");
    double F = dist.cdf(t);
    theta[i] = t;
    minus[i] = t * f + F;
    plus[i] = (t - 1.0) * f + F;
  }
  VirtualPair vp;
  vp.minus = detail::iron(dist, theta, minus, r_points);
  vp.plus = detail::iron(dist, theta, plus, r_points);
  return vp;
}

/// Largest price for which the full-information utility line still meets
/// the first and last piece of the IR curve.
inline double p_hat(const PayoffMatrix& env) {
  if (!is_canonical(env)) throw std::invalid_argument("p_hat: canonical env required");
  int m = env.m;
  double u11 = env.u[0][0], u2m = env.u[1][m - 1];
  double u12 = env.u[0][1], u22 = env.u[1][1];
  double u1m1 = env.u[0][m - 2], u2m1 = env.u[1][m - 2];
  double a = (u11 - u12) * u2m / (u11 - u12 + u22);
  double b = (u2m - u2m1) * u11 / (u2m + u1m1 - u2m1);
  return std::min(a, b);
}

/// Root of W(p) = phi^-(p/u11) - phi^+(1 - p/u2m) on (0, p_hat]; NONE when
/// W(p_hat) < 0. W(0) = -1, so a bisection root always exists otherwise.
inline std::optional<double> solve_price(const PayoffMatrix& env, const ContinuousDist& dist) {
  double u11 = env.u[0][0], u2m = env.u[1][env.m - 1];
  auto W = [&](double p) {
    double tl = p / u11, th = 1.0 - p / u2m;
    double minus = tl * dist.pdf(tl) + dist.cdf(tl);
    double plus = (th - 1.0) * dist.pdf(th) + dist.cdf(th);
    return minus - plus;
  };
  double hi = p_hat(env);
  if (W(hi) < 0.0) return std::nullopt;
  double lo = 0.0;
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    (W(mid) < 0.0 ? lo : hi) = mid;
    if (hi - lo < 1e-10) break;
  }
  return 0.5 * (lo + hi);
}

/// Certificate that selling complete information at price p is optimal
/// among responsive-IC and IR mechanisms, given multipliers (eta, lambda).
struct Certificate {
  double price = 0.0, eta = 0.0, lambda = 0.0;
  double p_hat = 0.0;
  double theta_low = 0.0, theta_high = 0.0;
  bool cond1 = false, cond2 = false, cond3 = false;
  double cond2_slack = 0.0;  // most violated sign condition (<= 0 is clean)
  bool ok = false;
};

/// Checks the three optimality conditions on the sampled ironed virtuals.
/// Condition 2 intervals are evaluated with closed endpoints on both sides,
/// with slack tolerance 1e-8.
inline Certificate check_fullinfo_optimal(const PayoffMatrix& env, const ContinuousDist& dist,
                                          double p, double eta, double lambda,
                                          const VirtualPair* precomputed = nullptr,
                                          int N = 400) {
  if (!(p > 0.0)) throw std::invalid_argument("check_fullinfo_optimal: p > 0 required");
  if (lambda < 0.0) throw std::invalid_argument("check_fullinfo_optimal: lambda >= 0 required");
  const double tol = 1e-8;
  double u11 = env.u[0][0], u2m = env.u[1][env.m - 1];

  Certificate cert;
  cert.price = p;
  cert.eta = eta;
  cert.lambda = lambda;
  cert.p_hat = p_hat(env);
  cert.theta_low = p / u11;
  cert.theta_high = 1.0 - p / u2m;

  cert.cond1 = p <= cert.p_hat + tol;
  if (lambda > 0.0) {
    bool shape = env.m == 3 && std::abs((env.u[0][1] - env.u[1][1]) - (u11 - 1.0)) <= tol &&
                 std::abs(p - (1.0 - env.u[1][1])) <= tol;
    cert.cond1 = cert.cond1 && shape;
  }

  VirtualPair local;
  const VirtualPair* vp = precomputed;
  if (!vp) {
    local = virtual_values(dist, N);
    vp = &local;
  }

  double worst = -std::numeric_limits<double>::infinity();
  auto update = [&](double violation) { worst = std::max(worst, violation); };
  for (std::size_t i = 0; i < vp->minus.theta.size(); ++i) {
    double t = vp->minus.theta[i];
    double pm = vp->minus.phi_ironed[i] - eta + lambda;
    double pp = vp->plus.phi_ironed[i] - eta;
    if (t <= cert.theta_low) update(pm);           // need <= 0
    if (t >= cert.theta_low && t <= cert.theta_high) {
      update(-pm);                                 // need >= 0
      update(pp);                                  // need <= 0
    }
    if (t >= cert.theta_high) update(-pp);         // need >= 0
  }
  cert.cond2_slack = worst;
  cert.cond2 = worst <= tol;

  cert.cond3 = !vp->minus.in_ironed_interior(cert.theta_low) &&
               !vp->plus.in_ironed_interior(cert.theta_high);

  cert.ok = cert.cond1 && cert.cond2 && cert.cond3;
  return cert;
}

/// Regularity premise for posted-price optimality: both virtual values are
/// nondecreasing and phi^-(p_hat/u11) >= phi^+(1 - p_hat/u2m).
inline bool check_premise(const PayoffMatrix& env, const ContinuousDist& dist, int N = 400) {
  const double tol = 1e-8;
  std::vector<double> minus(N + 1), plus(N + 1);
  for (int i = 0; i <= N; ++i) {
    double t = static_cast<double>(i) / N;
    double f = dist.pdf(t);
    double F = dist.cdf(t);
    minus[i] = t * f + F;
    plus[i] = (t - 1.0) * f + F;
  }
  for (int i = 0; i < N; ++i)
    if (minus[i + 1] < minus[i] - tol || plus[i + 1] < plus[i] - tol) return false;
  double ph = p_hat(env);
  double u11 = env.u[0][0], u2m = env.u[1][env.m - 1];
  double tl = ph / u11, th = 1.0 - ph / u2m;
  double wm = tl * dist.pdf(tl) + dist.cdf(tl);
  double wp = (th - 1.0) * dist.pdf(th) + dist.cdf(th);
  return wm >= wp - tol;
}

}  // namespace infomech
