#pragma once

// Three-state matching-utility constructions: shell point sets, the scaled
// support and experiments of the ratio bound, exact IC/IR certification,
// and the Ratio(M) integral.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "infomech/dist.hpp"
#include "infomech/env.hpp"
#include "infomech/mech.hpp"

namespace infomech {

struct ShellPoint {
  double y1 = 0.0, y2 = 0.0;
  double gap = 0.0;  // min over j < k of (y_k - y_j) . y_k, with y_0 = 0
  int shell = 0;
};

/// Places N points on shells with radii in [0.3, 0.4] inside the angular
/// sector [arctan(9/10), arctan(10/9)]; shell i carries ceil(i^{3/4})
/// points, evenly spread endpoint to endpoint.
///
/// The radius ladder is independent of N (growing N only appends points,
/// so gap sums are monotone) and two-phase: shells 1..4 sit nearly on the
/// 0.3 circle, then the l^{-3/2} ladder climbs toward 0.4. The delay puts
/// the radial growth into the shells filled at moderate N, which is where
/// the gap-sum growth of the ratio bound is measured.
inline std::vector<ShellPoint> shell_points(int N) {
  if (N < 1) throw std::invalid_argument("shell_points: N >= 1 required");
  constexpr double kZeta32 = 2.6123753486854883;
  constexpr double kFlatStep = 5e-4;
  constexpr double kFlatTotal = kFlatStep * (1.0 + 0.5 + 0.25);

  const double ang_lo = std::atan(0.9);
  const double ang_hi = std::atan(10.0 / 9.0);
  const double ladder = 0.1 - kFlatTotal;

  std::vector<ShellPoint> pts;
  double radius = 0.3;
  for (int i = 1; static_cast<int>(pts.size()) < N; ++i) {
    int ni = static_cast<int>(std::ceil(std::pow(i, 0.75)));
    for (int j = 0; j < ni && static_cast<int>(pts.size()) < N; ++j) {
      double ang = (ni == 1) ? 0.5 * (ang_lo + ang_hi)
                             : ang_lo + j * (ang_hi - ang_lo) / (ni - 1);
      ShellPoint p;
      p.y1 = radius * std::cos(ang);
      p.y2 = radius * std::sin(ang);
      p.shell = i;
      pts.push_back(p);
    }
    radius += (i < 4) ? kFlatStep * std::pow(0.5, i - 1)
                      : ladder * std::pow(i - 3, -1.5) / kZeta32;
  }

  for (std::size_t k = 0; k < pts.size(); ++k) {
    double best = pts[k].y1 * pts[k].y1 + pts[k].y2 * pts[k].y2;  // j = 0 term
    for (std::size_t j = 0; j < k; ++j) {
      double v = (pts[k].y1 - pts[j].y1) * pts[k].y1 + (pts[k].y2 - pts[j].y2) * pts[k].y2;
      best = std::min(best, v);
    }
    pts[k].gap = best;
    if (!(best > 0.0)) throw std::runtime_error("shell_points: nonpositive gap");
    double r = std::hypot(pts[k].y1, pts[k].y2);
    if (r < 0.3 - 1e-12 || r > 0.4 + 1e-12)
      throw std::runtime_error("shell_points: radius outside [0.3, 0.4]");
    double ratio = pts[k].y1 / pts[k].y2;
    if (ratio < 0.9 - 1e-12 || ratio > 10.0 / 9.0 + 1e-12)
      throw std::runtime_error("shell_points: angle outside sector");
  }
  return pts;
}

/// The scaled instance: support x_k = (delta t_k / gap_k) y_k, payments
/// delta t_k, masses xi_1 (1/xi_k - 1/xi_{k+1}) and experiments Pi^(k).
struct RatioInstance {
  std::vector<ShellPoint> ys;
  std::vector<double> t;       // t_1 = 1, growing by >= 1/eps
  double delta = 0.0;
  std::vector<std::pair<double, double>> x;  // support points (x1, x2)
  std::vector<double> xi;      // U(x_k), strictly increasing
  std::vector<double> masses;
  std::vector<Experiment> experiments;  // Pi^(k), 3 x 3
  double eps = 0.0;

  TypeGrid grid() const {
    TypeGrid g;
    g.n = 3;
    for (const auto& [a, b] : x) g.points.push_back({a, b});
    g.masses = masses;
    return g;
  }
};

inline double matching_gain(double y1, double y2) { return y1 + y2; }  // U for y_i < 1/3

namespace ms_detail {

/// V^sigma - 1 for the 3-state matching environment, computed without ever
/// forming values near 1: the support points sit deep in the simplex
/// corner, where the payment-scale margins would vanish under double
/// rounding if evaluated through V itself.
inline double shifted_value_sigma(const Experiment& e, double x1, double x2,
                                  const Interpretation& sigma) {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  for (int j = 0; j < 3; ++j) {
    if (sigma[j] == 0) c1 += e.pi[0][j];
    if (sigma[j] == 1) c2 += e.pi[1][j];
    if (sigma[j] == 2) c3 += e.pi[2][j];
  }
  return -(x1 * (1.0 - c1) + x2 * (1.0 - c2) + (1.0 - x1 - x2) * (1.0 - c3));
}

inline double shifted_value_identity(const Experiment& e, double x1, double x2) {
  return -(x1 * (1.0 - e.pi[0][0]) + x2 * (1.0 - e.pi[1][1]) +
           (1.0 - x1 - x2) * (1.0 - e.pi[2][2]));
}

}  // namespace ms_detail

inline RatioInstance build_ratio_instance(const std::vector<ShellPoint>& ys, double eps) {
  if (ys.empty()) throw std::invalid_argument("build_ratio_instance: empty point set");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("build_ratio_instance: eps in (0,1)");

  RatioInstance inst;
  inst.ys = ys;
  inst.eps = eps;
  const std::size_t N = ys.size();

  std::vector<double> gain(N);
  for (std::size_t k = 0; k < N; ++k) {
    gain[k] = matching_gain(ys[k].y1, ys[k].y2);
    if (!(gain[k] > 0.0)) throw std::invalid_argument("build_ratio_instance: U(y_k) = 0");
  }

  // t_k grows fast enough that (t_k/gap_k) U(y_k) strictly increases and
  // t_{k+1}/t_k >= 1/eps.
  inst.t.assign(N, 1.0);
  for (std::size_t k = 1; k < N; ++k) {
    double keep_ratio = inst.t[k - 1] / eps;
    double keep_monotone =
        (1.0 + 1e-6) * inst.t[k - 1] * (ys[k].gap * gain[k - 1]) / (ys[k - 1].gap * gain[k]);
    inst.t[k] = std::max(keep_ratio, keep_monotone);
  }

  double max_ratio = 0.0;
  for (std::size_t k = 0; k < N; ++k) max_ratio = std::max(max_ratio, inst.t[k] / ys[k].gap);
  inst.delta = 0.5 / max_ratio;

  inst.x.resize(N);
  inst.xi.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    double scale = inst.delta * inst.t[k] / ys[k].gap;
    inst.x[k] = {scale * ys[k].y1, scale * ys[k].y2};
    inst.xi[k] = scale * gain[k];
    if (k > 0 && !(inst.xi[k] > inst.xi[k - 1]))
      throw std::runtime_error("build_ratio_instance: xi not increasing");
    if (!(inst.x[k].first < 1.0 / 3.0 && inst.x[k].second < 1.0 / 3.0))
      throw std::runtime_error("build_ratio_instance: support point leaves x_i < 1/3");
  }

  inst.masses.resize(N);
  double total = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    inst.masses[k] = (k + 1 < N) ? inst.xi[0] * (1.0 / inst.xi[k] - 1.0 / inst.xi[k + 1])
                                 : inst.xi[0] / inst.xi[N - 1];
    total += inst.masses[k];
  }
  for (double& m : inst.masses) m /= total;  // telescoping: total = 1 up to fp

  inst.experiments.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    Experiment e;
    e.n = e.m = 3;
    e.pi = {{ys[k].y1, 0.0, 1.0 - ys[k].y1},
            {0.0, ys[k].y2, 1.0 - ys[k].y2},
            {0.0, 0.0, 1.0}};
    inst.experiments[k] = e;
  }
  return inst;
}

/// Assignment by argmax_k { V*_x(Pi^(k)) - delta t_k }, paying delta t_k.
/// Evaluated in the shifted frame V* - 1; ties break toward the larger
/// index.
inline Mechanism mechanism_from_instance(const RatioInstance& inst) {
  Mechanism mech;
  mech.grid = inst.grid();
  for (std::size_t k = 0; k < inst.experiments.size(); ++k)
    mech.options.push_back({inst.experiments[k], inst.delta * inst.t[k]});
  for (std::size_t q = 0; q < inst.x.size(); ++q) {
    int best = -1;
    double best_util = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < inst.experiments.size(); ++k) {
      double util = ms_detail::shifted_value_identity(inst.experiments[k], inst.x[q].first,
                                                      inst.x[q].second) -
                    inst.delta * inst.t[k];
      if (util >= best_util) {
        best = static_cast<int>(k);
        best_util = util;
      }
    }
    mech.assignment.push_back(best);
  }
  return mech;
}

struct CertifyReport {
  double ic_violation = 0.0;  // over all 27 interpretation maps
  double ir_violation = 0.0;
  bool monotone_purchase = false;  // type x_k buys Pi^(q) with q >= k
  bool ok = false;
};

/// Exhaustive certification: IC over all m^m = 27 signal-action maps and
/// exact IR, tolerance 1e-12, all in the shifted frame. Throws on failure.
inline CertifyReport certify(const RatioInstance& inst) {
  Mechanism mech = mechanism_from_instance(inst);
  const std::size_t N = inst.x.size();

  std::vector<Interpretation> sigmas;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) sigmas.push_back({a, b, c});

  CertifyReport rep;
  rep.monotone_purchase = true;
  for (std::size_t i = 0; i < N; ++i) {
    double x1 = inst.x[i].first, x2 = inst.x[i].second;
    double honest = ms_detail::shifted_value_identity(
                        mech.options[mech.assignment[i]].experiment, x1, x2) -
                    mech.payment(i);
    if (mech.assignment[i] < static_cast<int>(i)) rep.monotone_purchase = false;

    // max_j sum_i x_i u_ij - 1 with the corner coordinate exact.
    double outside = std::max({x1 - 1.0, x2 - 1.0, -x1 - x2});
    rep.ir_violation = std::max(rep.ir_violation, outside - honest);

    for (std::size_t i2 = 0; i2 < N; ++i2) {
      const Experiment& e = mech.options[mech.assignment[i2]].experiment;
      for (const auto& sigma : sigmas) {
        double v = ms_detail::shifted_value_sigma(e, x1, x2, sigma) - mech.payment(i2);
        rep.ic_violation = std::max(rep.ic_violation, v - honest);
      }
    }
  }
  rep.ic_violation = std::max(rep.ic_violation, 0.0);
  rep.ir_violation = std::max(rep.ir_violation, 0.0);
  rep.ok = rep.ic_violation <= 1e-12 && rep.ir_violation <= 1e-12 && rep.monotone_purchase;
  if (!rep.ok) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "certify: construction failed (ic=%.3g, ir=%.3g, monotone=%d)",
                  rep.ic_violation, rep.ir_violation, rep.monotone_purchase ? 1 : 0);
    throw std::runtime_error(buf);
  }
  return rep;
}

/// Ratio(M) = int_0^infty dx / r(x) with r(x) = inf{U(theta) : t(theta) >= x}:
/// a sum over the distinct payment levels; empty super-level sets contribute
/// zero (r = infinity).
inline double ratio_integral(const Mechanism& mech, const PayoffMatrix& env) {
  std::vector<std::pair<double, double>> pay_gain(mech.grid.size());
  for (std::size_t i = 0; i < mech.grid.size(); ++i)
    pay_gain[i] = {mech.payment(i), gain_of(env, mech.grid.points[i])};
  std::sort(pay_gain.begin(), pay_gain.end());

  // Suffix minima of U over payments >= x.
  std::vector<double> suffix_min(pay_gain.size());
  double cur = std::numeric_limits<double>::infinity();
  for (std::size_t i = pay_gain.size(); i-- > 0;) {
    cur = std::min(cur, pay_gain[i].second);
    suffix_min[i] = cur;
  }

  double integral = 0.0;
  double prev_level = 0.0;
  for (std::size_t i = 0; i < pay_gain.size(); ++i) {
    if (i > 0 && pay_gain[i].first == pay_gain[i - 1].first) continue;
    double level = pay_gain[i].first;
    if (level <= prev_level) continue;
    double r = suffix_min[i];
    if (r <= 0.0) return std::numeric_limits<double>::infinity();
    if (std::isfinite(r)) integral += (level - prev_level) / r;
    prev_level = level;
  }
  return integral;
}

}  // namespace infomech
