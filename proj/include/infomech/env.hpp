#pragma once

// Payoff environments: canonical binary-state matrices, redundancy removal,
// the IR curve and the full-information surplus gain U(theta).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "infomech/pwl.hpp"

namespace infomech {

/// n x m buyer payoff matrix; u[i][j] = payoff of action j in state i.
struct PayoffMatrix {
  int n = 0;
  int m = 0;
  std::vector<std::vector<double>> u;

  double at(int state, int action) const { return u[state][action]; }
};

/// Matching utility environment: n = m, payoff 1 iff action matches state.
inline PayoffMatrix matching_environment(int n) {
  if (n < 2) throw std::invalid_argument("matching_environment: n >= 2 required");
  PayoffMatrix env;
  env.n = env.m = n;
  env.u.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) env.u[i][i] = 1.0;
  return env;
}

/// Record of the canonicalization so revenues and prices can be mapped back.
/// Canonical payoff = (raw[permutation[j]] - shift) / scale per state.
struct TransformLog {
  double shift1 = 0.0;
  double shift2 = 0.0;
  double scale = 1.0;
  std::vector<int> permutation;  // canonical action j <- raw action permutation[j]
  bool swapped = false;          // states 1 and 2 exchanged
};

inline constexpr double kCanonicalTol = 1e-12;

/// Action value lines theta*u1j + (1-theta)*u2j for a binary-state matrix.
inline std::vector<Line> action_lines(const PayoffMatrix& env) {
  if (env.n != 2) throw std::invalid_argument("action_lines: binary-state only");
  std::vector<Line> lines;
  lines.reserve(env.m);
  for (int j = 0; j < env.m; ++j)
    lines.push_back({env.u[0][j] - env.u[1][j], env.u[1][j]});
  return lines;
}

inline bool is_canonical(const PayoffMatrix& env, double tol = kCanonicalTol) {
  if (env.n != 2 || env.m < 2) return false;
  const auto& u = env.u;
  int m = env.m;
  if (std::abs(u[0][m - 1]) > tol || std::abs(u[1][0]) > tol) return false;
  if (std::abs(u[1][m - 1] - 1.0) > tol) return false;
  if (u[0][0] < u[1][m - 1] - tol) return false;
  for (int j = 0; j + 1 < m; ++j) {
    if (u[0][j] <= u[0][j + 1] + tol) return false;
    if (u[1][j] >= u[1][j + 1] - tol) return false;
  }
  return true;
}

/// Canonicalizes a 2 x m payoff matrix: drops redundant actions (zero-length
/// envelope contribution), sorts by decreasing state-1 payoff, shifts each
/// state so u_{1m} = u_{21} = 0, swaps states if needed and rescales so
/// u_{2m} = 1. Revenues in the canonical environment scale by 1/scale.
inline std::pair<PayoffMatrix, TransformLog> canonicalize(const PayoffMatrix& raw) {
  if (raw.n != 2) throw std::invalid_argument("canonicalize: binary-state only");
  if (raw.m < 2) throw std::invalid_argument("canonicalize: need >= 2 actions");
  for (const auto& row : raw.u)
    for (double v : row)
      if (!std::isfinite(v)) throw std::invalid_argument("canonicalize: non-finite payoff");

  // Redundant = contributes no segment of positive length to the envelope
  // of the action value lines; a line touching at a single point is dropped.
  Envelope env_lines = upper_envelope(action_lines(raw), 0.0, 1.0);
  std::vector<int> keep;
  for (const auto& seg : env_lines.segments)
    if (keep.empty() || keep.back() != seg.source) keep.push_back(seg.source);

  if (keep.size() < 2)
    throw std::invalid_argument("canonicalize: degenerate environment (single action)");

  TransformLog log;
  // Envelope order is by increasing slope = increasing u1 - u2; canonical
  // order is decreasing state-1 payoff, i.e. decreasing slope.
  std::vector<int> order(keep.rbegin(), keep.rend());

  std::vector<double> u1, u2;
  for (int j : order) {
    u1.push_back(raw.u[0][j]);
    u2.push_back(raw.u[1][j]);
  }
  int m = static_cast<int>(order.size());

  log.shift1 = u1[m - 1];
  log.shift2 = u2[0];
  for (double& v : u1) v -= log.shift1;
  for (double& v : u2) v -= log.shift2;

  if (u1[0] < u2[m - 1]) {
    log.swapped = true;
    std::swap(u1, u2);
    std::swap(log.shift1, log.shift2);  // shift1 always pairs with canonical state 1
    std::reverse(u1.begin(), u1.end());
    std::reverse(u2.begin(), u2.end());
    std::reverse(order.begin(), order.end());
    // The swapped rows are already anchored at zero by the shifts above.
  }

  log.scale = u2[m - 1];
  if (log.scale <= kCanonicalTol)
    throw std::invalid_argument("canonicalize: degenerate environment (zero scale)");
  for (double& v : u1) v /= log.scale;
  for (double& v : u2) v /= log.scale;
  log.permutation = order;

  PayoffMatrix out;
  out.n = 2;
  out.m = m;
  out.u = {u1, u2};
  // Exact anchors; the arithmetic above already places them within 1e-15.
  out.u[0][m - 1] = 0.0;
  out.u[1][0] = 0.0;
  out.u[1][m - 1] = 1.0;

  for (int j = 0; j + 1 < m; ++j) {
    if (out.u[0][j] <= out.u[0][j + 1] + kCanonicalTol ||
        out.u[1][j] >= out.u[1][j + 1] - kCanonicalTol)
      throw std::invalid_argument("canonicalize: ordering violated after dedup");
  }
  return {out, log};
}

/// IR curve with its sorted piece slopes l_1 < ... < l_m.
struct IRCurve {
  PiecewiseLinear curve;
  std::vector<double> piece_slopes;
};

/// Upper envelope of the action value lines of a canonical matrix on [0,1].
inline IRCurve ir_curve(const PayoffMatrix& env) {
  if (!is_canonical(env)) throw std::invalid_argument("ir_curve: canonical matrix required");
  Envelope e = upper_envelope(action_lines(env), 0.0, 1.0);
  std::vector<double> slopes;
  slopes.reserve(e.segments.size());
  for (const auto& seg : e.segments) slopes.push_back(seg.line.slope);
  return {e.curve(), std::move(slopes)};
}

/// Best uninformed payoff u(theta) = max_j { theta u_1j + (1-theta) u_2j }.
inline double u_of(const PayoffMatrix& env, double theta) {
  if (env.n != 2) throw std::invalid_argument("u_of: binary-state only");
  if (theta < -1e-12 || theta > 1.0 + 1e-12) throw std::out_of_range("u_of: theta outside [0,1]");
  theta = std::clamp(theta, 0.0, 1.0);
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < env.m; ++j)
    best = std::max(best, theta * env.u[0][j] + (1.0 - theta) * env.u[1][j]);
  return best;
}

/// Full n-vector of a type given its first n-1 coordinates.
inline std::vector<double> full_type(const PayoffMatrix& env, const std::vector<double>& theta) {
  if (static_cast<int>(theta.size()) == env.n) return theta;
  if (static_cast<int>(theta.size()) != env.n - 1)
    throw std::invalid_argument("type dimension mismatch");
  std::vector<double> full = theta;
  double rest = 1.0 - std::accumulate(theta.begin(), theta.end(), 0.0);
  full.push_back(rest);
  return full;
}

inline bool is_matching(const PayoffMatrix& env) {
  if (env.n != env.m) return false;
  for (int i = 0; i < env.n; ++i)
    for (int j = 0; j < env.m; ++j)
      if (env.u[i][j] != (i == j ? 1.0 : 0.0)) return false;
  return true;
}

/// U(theta) = sum_i theta_i max_j u_ij - max_j sum_i theta_i u_ij, the gain
/// in value from full information; always >= 0. Matching environments sum
/// the non-argmax coordinates directly, which keeps U exact for types far
/// down in the simplex corner where 1 - max theta_i would cancel away.
inline double gain_of(const PayoffMatrix& env, const std::vector<double>& theta) {
  std::vector<double> p = full_type(env, theta);
  double sum = 0.0;
  for (double v : p) {
    if (v < -1e-12) throw std::out_of_range("gain_of: theta outside simplex");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::out_of_range("gain_of: theta outside simplex");

  if (is_matching(env)) {
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
      if (p[i] > p[argmax]) argmax = i;
    double gain = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (i != argmax) gain += p[i];
    return std::max(gain, 0.0);
  }

  double informed = 0.0;
  for (int i = 0; i < env.n; ++i)
    informed += p[i] * *std::max_element(env.u[i].begin(), env.u[i].end());
  double uninformed = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < env.m; ++j) {
    double v = 0.0;
    for (int i = 0; i < env.n; ++i) v += p[i] * env.u[i][j];
    uninformed = std::max(uninformed, v);
  }
  return std::max(informed - uninformed, 0.0);
}

inline double gain_of(const PayoffMatrix& env, double theta) {
  return gain_of(env, std::vector<double>{theta});
}

}  // namespace infomech
