#pragma once

// Buyer type distributions: finite grids, built-in continuous families with
// discretization, and the ER distribution of the lower-bound construction.

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "infomech/pwl.hpp"

namespace infomech {

/// Finite type support with masses. Points have n-1 coordinates each
/// (scalars for binary state, simplex points for n = 3).
struct TypeGrid {
  int n = 2;
  std::vector<std::vector<double>> points;
  std::vector<double> masses;

  std::size_t size() const { return points.size(); }

  double scalar(std::size_t i) const {
    if (n != 2) throw std::logic_error("TypeGrid::scalar: binary grids only");
    return points[i][0];
  }

  void validate() const {
    if (points.size() != masses.size() || points.empty())
      throw std::invalid_argument("TypeGrid: size mismatch");
    double sum = 0.0;
    for (double m : masses) {
      if (m < -1e-15) throw std::invalid_argument("TypeGrid: negative mass");
      sum += m;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("TypeGrid: masses must sum to 1");
    if (n == 2)
      for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (!(points[i][0] < points[i + 1][0]))
          throw std::invalid_argument("TypeGrid: points must strictly increase");
  }

  static TypeGrid binary(std::vector<double> thetas, std::vector<double> mass) {
    TypeGrid g;
    g.n = 2;
    g.points.reserve(thetas.size());
    for (double t : thetas) g.points.push_back({t});
    g.masses = std::move(mass);
    g.validate();
    return g;
  }
};

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-10) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

/// Continuous type distribution on [0,1] given by cdf/pdf evaluators.
struct ContinuousDist {
  std::string family;
  std::function<double(double)> cdf;
  std::function<double(double)> pdf;
  std::function<double(double)> inv_cdf;  // always set; defaults to bisection

  static ContinuousDist make(std::string family, std::function<double(double)> cdf,
                             std::function<double(double)> pdf,
                             std::function<double(double)> inv = nullptr) {
    ContinuousDist d;
    d.family = std::move(family);
    d.cdf = std::move(cdf);
    d.pdf = std::move(pdf);
    if (inv) {
      d.inv_cdf = std::move(inv);
    } else {
      auto c = d.cdf;
      d.inv_cdf = [c](double r) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 80; ++it) {
          double mid = 0.5 * (lo + hi);
          (c(mid) < r ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
      };
    }
    return d;
  }
};

inline ContinuousDist uniform_dist() {
  return ContinuousDist::make(
      "uniform", [](double t) { return std::clamp(t, 0.0, 1.0); },
      [](double) { return 1.0; }, [](double r) { return r; });
}

/// Exponential with rate lambda truncated to [0,1]: f = c lambda e^{-lambda t}.
inline ContinuousDist exponential_trunc(double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("exponential_trunc: lambda > 0 required");
  double z = 1.0 - std::exp(-lambda);
  auto cdf = [lambda, z](double t) {
    t = std::clamp(t, 0.0, 1.0);
    return (1.0 - std::exp(-lambda * t)) / z;
  };
  auto pdf = [lambda, z](double t) { return lambda * std::exp(-lambda * t) / z; };
  auto inv = [lambda, z](double r) { return -std::log1p(-r * z) / lambda; };
  return ContinuousDist::make("exp", cdf, pdf, inv);
}

/// N(0, sigma2) restricted to [0,1]; normalizer by adaptive Simpson.
inline ContinuousDist normal_trunc(double sigma2) {
  if (sigma2 <= 0.0) throw std::invalid_argument("normal_trunc: sigma2 > 0 required");
  auto kernel = [sigma2](double t) { return std::exp(-t * t / (2.0 * sigma2)); };
  double z = adaptive_simpson(kernel, 0.0, 1.0, 1e-10);
  auto pdf = [kernel, z](double t) { return kernel(t) / z; };
  auto cdf = [kernel, z](double t) {
    t = std::clamp(t, 0.0, 1.0);
    return adaptive_simpson(kernel, 0.0, t, 1e-11) / z;
  };
  return ContinuousDist::make("normal", cdf, pdf);
}

/// Equal-revenue style distribution: given h strictly decreasing and
/// convex on [a,b] with values in (0,1), the distribution with
/// F(t) = 1 - c/(1 - h(t)) on [a,b) and an atom at b closing F to 1,
/// where c = 1 - h(a). Under an environment whose IR curve is h, every
/// posted price for complete information in (0, c] earns exactly c.
inline ContinuousDist er_dist(const PiecewiseLinear& h) {
  double a = h.domain_lo(), b = h.domain_hi();
  if (!(0.0 < a && a < b && b < 1.0))
    throw std::invalid_argument("er_dist: domain must satisfy 0 < a < b < 1");
  for (std::size_t i = 0; i < h.piece_count(); ++i) {
    if (!(h.slope_of_piece(i) < 0.0))
      throw std::invalid_argument("er_dist: h must be strictly decreasing");
    if (i > 0 && h.slope_of_piece(i) < h.slope_of_piece(i - 1))
      throw std::invalid_argument("er_dist: h must be convex");
  }
  for (double v : h.values())
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("er_dist: values must lie in (0,1)");

  auto hp = std::make_shared<PiecewiseLinear>(h);
  double c = 1.0 - h.value(a);
  auto cdf = [hp, a, b, c](double t) {
    if (t < a) return 0.0;
    if (t >= b) return 1.0;
    return 1.0 - c / (1.0 - hp->value(t));
  };
  auto pdf = [hp, a, b, c](double t) {
    if (t < a || t >= b) return 0.0;
    const auto& xs = hp->breakpoints();
    auto it = std::upper_bound(xs.begin(), xs.end(), t);
    std::size_t i = (it == xs.begin()) ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    if (i >= hp->piece_count()) i = hp->piece_count() - 1;
    double slope = hp->slope_of_piece(i);
    double one_minus_h = 1.0 - hp->value(t);
    return -c * slope / (one_minus_h * one_minus_h);
  };
  auto inv = [hp, a, b, c](double r) {
    if (r <= 0.0) return a;
    double target = 1.0 - c / (1.0 - r);  // h value with F = r
    if (target <= hp->value(b)) return b;
    // h is strictly decreasing; bisect on theta.
    double lo = a, hi = b;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      (hp->value(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  return ContinuousDist::make("er", cdf, pdf, inv);
}

/// Grid {0, e, ..., (N-1)e} with e = 1/N and mass_i = F(i e) - F((i-1) e).
inline TypeGrid discretize(const ContinuousDist& dist, int N) {
  if (N < 2) throw std::invalid_argument("discretize: N >= 2 required");
  std::vector<double> thetas(N), mass(N);
  double eps = 1.0 / N;
  double prev = dist.cdf(0.0);
  for (int i = 0; i < N; ++i) {
    thetas[i] = i * eps;
    double next = dist.cdf((i + 1) * eps);
    mass[i] = std::max(next - prev, 0.0);
    prev = next;
  }
  return TypeGrid::binary(std::move(thetas), std::move(mass));
}

/// Grid on the given strictly increasing points in [0,1]; each point carries
/// the mass of the cell up to the next point (the last cell extends to 1).
inline TypeGrid discretize_points(const ContinuousDist& dist, std::vector<double> thetas) {
  if (thetas.size() < 2) throw std::invalid_argument("discretize_points: need >= 2 points");
  std::vector<double> mass(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    double hi = (i + 1 < thetas.size()) ? dist.cdf(thetas[i + 1]) : 1.0;
    mass[i] = std::max(hi - dist.cdf(thetas[i]), 0.0);
  }
  // Mass below the first point (zero when theta_1 = 0 or F(theta_1) = 0)
  // is folded into the first cell so the grid remains a distribution.
  mass[0] += dist.cdf(thetas[0]);
  return TypeGrid::binary(std::move(thetas), std::move(mass));
}

/// Uniform lattice {(i/G, j/G) : i + j <= G} on the 3-state simplex.
inline TypeGrid simplex_grid(int G) {
  if (G < 1) throw std::invalid_argument("simplex_grid: G >= 1 required");
  TypeGrid g;
  g.n = 3;
  for (int i = 0; i <= G; ++i)
    for (int j = 0; i + j <= G; ++j)
      g.points.push_back({static_cast<double>(i) / G, static_cast<double>(j) / G});
  g.masses.assign(g.points.size(), 1.0 / static_cast<double>(g.points.size()));
  return g;
}

}  // namespace infomech
