#pragma once

// Piecewise-linear functions, upper envelopes of lines and lower convex
// hulls. These carry the IR curves, utility curves and ironing hulls.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace infomech {

/// Affine function slope*x + intercept.
struct Line {
  double slope = 0.0;
  double intercept = 0.0;

  double at(double x) const { return slope * x + intercept; }
};

/// Continuous piecewise-linear function on a closed interval, stored as
/// strictly increasing breakpoints with their ordinates; affine in between.
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<double> xs, std::vector<double> ys)
      : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() < 2 || xs_.size() != ys_.size())
      throw std::invalid_argument("PiecewiseLinear: need >= 2 matching breakpoints");
    for (std::size_t i = 0; i + 1 < xs_.size(); ++i)
      if (!(xs_[i] < xs_[i + 1]))
        throw std::invalid_argument("PiecewiseLinear: breakpoints must strictly increase");
  }

  double domain_lo() const { return xs_.front(); }
  double domain_hi() const { return xs_.back(); }
  std::size_t piece_count() const { return xs_.size() - 1; }
  const std::vector<double>& breakpoints() const { return xs_; }
  const std::vector<double>& values() const { return ys_; }

  /// Evaluation; exact at breakpoints. x must lie in the domain (tiny slack).
  double value(double x) const {
    const double slack = 1e-9 * (1.0 + std::abs(domain_hi() - domain_lo()));
    if (x < xs_.front() - slack || x > xs_.back() + slack)
      throw std::out_of_range("PiecewiseLinear: x outside domain");
    x = std::clamp(x, xs_.front(), xs_.back());
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    if (it == xs_.begin()) return ys_.front();
    std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
    if (i + 1 >= xs_.size()) return ys_.back();
    if (x == xs_[i]) return ys_[i];
    double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
    return ys_[i] + t * (ys_[i + 1] - ys_[i]);
  }

  double slope_of_piece(std::size_t i) const {
    return (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
  }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// One maximal segment of an envelope, with the line that attains it.
struct EnvelopeSegment {
  double lo = 0.0;
  double hi = 0.0;
  Line line;
  int source = -1;  // index into the input line list
};

struct Envelope {
  std::vector<EnvelopeSegment> segments;  // ordered, covering [a, b]

  PiecewiseLinear curve() const {
    std::vector<double> xs, ys;
    xs.reserve(segments.size() + 1);
    for (const auto& s : segments) {
      xs.push_back(s.lo);
      ys.push_back(s.line.at(s.lo));
    }
    xs.push_back(segments.back().hi);
    ys.push_back(segments.back().line.at(segments.back().hi));
    return PiecewiseLinear(std::move(xs), std::move(ys));
  }
};

namespace detail {

inline double intersect_x(const Line& a, const Line& b) {
  return (b.intercept - a.intercept) / (a.slope - b.slope);
}

}  // namespace detail

/// Pointwise maximum of a set of lines on [a, b].
///
/// Lines appearing only on a segment shorter than 1e-12*(b-a) are dropped;
/// slope ties keep the line with the larger intercept. Breakpoints are
/// exactly the abscissae where the argmax line changes.
inline Envelope upper_envelope(const std::vector<Line>& lines, double a, double b) {
  if (lines.empty()) throw std::invalid_argument("upper_envelope: no lines");
  if (!(a < b)) throw std::invalid_argument("upper_envelope: empty domain");
  for (const auto& l : lines)
    if (!std::isfinite(l.slope) || !std::isfinite(l.intercept))
      throw std::invalid_argument("upper_envelope: non-finite line");

  const double min_width = 1e-12 * (b - a);

  // Sort by slope; for equal slopes only the largest intercept can matter.
  std::vector<int> order(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (lines[i].slope != lines[j].slope) return lines[i].slope < lines[j].slope;
    return lines[i].intercept < lines[j].intercept;
  });
  std::vector<int> cand;
  for (int idx : order) {
    if (!cand.empty() && lines[cand.back()].slope == lines[idx].slope) cand.pop_back();
    cand.push_back(idx);
  }

  // Stack sweep over increasing slopes; boundary between consecutive stack
  // entries is their intersection abscissa.
  auto sweep = [&](const std::vector<int>& ids) {
    std::vector<int> stack;
    std::vector<double> from;  // from[k]: abscissa where stack[k] takes over
    for (int idx : ids) {
      double start = -std::numeric_limits<double>::infinity();
      while (!stack.empty()) {
        start = detail::intersect_x(lines[stack.back()], lines[idx]);
        if (start > from.back()) break;
        stack.pop_back();
        from.pop_back();
      }
      if (stack.empty()) start = -std::numeric_limits<double>::infinity();
      stack.push_back(idx);
      from.push_back(start);
    }
    return std::pair(stack, from);
  };

  std::vector<int> active = cand;
  for (;;) {
    auto [stack, from] = sweep(active);
    // Clip to [a, b] and drop segments of negligible width; a drop changes
    // neighbouring boundaries, so recompute until stable.
    std::vector<int> kept;
    for (std::size_t k = 0; k < stack.size(); ++k) {
      double lo = std::max(from[k], a);
      double hi = (k + 1 < stack.size()) ? std::min(from[k + 1], b) : b;
      if (hi - lo > min_width) kept.push_back(stack[k]);
    }
    if (kept.size() == active.size()) {
      Envelope env;
      auto [s2, f2] = sweep(kept);
      for (std::size_t k = 0; k < s2.size(); ++k) {
        double lo = std::max(f2[k], a);
        double hi = (k + 1 < s2.size()) ? std::min(f2[k + 1], b) : b;
        env.segments.push_back({lo, hi, lines[s2[k]], s2[k]});
      }
      return env;
    }
    if (kept.empty()) {
      // Degenerate domain; keep the single best line at the midpoint.
      double mid = 0.5 * (a + b);
      int best = cand.front();
      for (int idx : cand)
        if (lines[idx].at(mid) > lines[best].at(mid)) best = idx;
      return Envelope{{{a, b, lines[best], best}}};
    }
    active = kept;
  }
}

/// Greatest convex minorant of the piecewise-linear interpolant through the
/// given points (x strictly increasing). Hull vertices are input points.
inline PiecewiseLinear lower_convex_hull(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) throw std::invalid_argument("lower_convex_hull: need >= 2 points");
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (!(pts[i].first < pts[i + 1].first))
      throw std::invalid_argument("lower_convex_hull: x must strictly increase");

  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (hull.size() >= 2) {
      auto [x1, y1] = pts[hull[hull.size() - 2]];
      auto [x2, y2] = pts[hull[hull.size() - 1]];
      auto [x3, y3] = pts[i];
      // Middle point lies on or above the chord => not a hull vertex.
      if ((y2 - y1) * (x3 - x1) >= (y3 - y1) * (x2 - x1))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  std::vector<double> xs, ys;
  xs.reserve(hull.size());
  for (std::size_t i : hull) {
    xs.push_back(pts[i].first);
    ys.push_back(pts[i].second);
  }
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

/// Exact trapezoid integral of f over [a, b] subset of its domain.
inline double integrate_pwl(const PiecewiseLinear& f, double a, double b) {
  if (a > b) throw std::invalid_argument("integrate_pwl: a > b");
  const double slack = 1e-9 * (1.0 + f.domain_hi() - f.domain_lo());
  if (a < f.domain_lo() - slack || b > f.domain_hi() + slack)
    throw std::out_of_range("integrate_pwl: [a,b] outside domain");
  a = std::clamp(a, f.domain_lo(), f.domain_hi());
  b = std::clamp(b, f.domain_lo(), f.domain_hi());
  const auto& xs = f.breakpoints();
  double total = 0.0;
  double prev_x = a, prev_y = f.value(a);
  for (double x : xs) {
    if (x <= a) continue;
    if (x >= b) break;
    double y = f.value(x);
    total += 0.5 * (prev_y + y) * (x - prev_x);
    prev_x = x;
    prev_y = y;
  }
  total += 0.5 * (prev_y + f.value(b)) * (b - prev_x);
  return total;
}

}  // namespace infomech
