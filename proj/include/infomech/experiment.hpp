#pragma once

// Experiments (signaling schemes), buyer valuations under forced and optimal
// interpretations, and the scalar q-form of semi-informative experiments.

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "infomech/env.hpp"

namespace infomech {

inline constexpr double kRowSumTol = 1e-12;

/// Row-stochastic n x m signaling matrix; pi[i][k] = P(signal k | state i).
struct Experiment {
  int n = 0;
  int m = 0;
  std::vector<std::vector<double>> pi;

  void validate() const {
    if (static_cast<int>(pi.size()) != n) throw std::invalid_argument("Experiment: bad row count");
    for (const auto& row : pi) {
      if (static_cast<int>(row.size()) != m)
        throw std::invalid_argument("Experiment: bad column count");
      double sum = 0.0;
      for (double v : row) {
        if (v < -kRowSumTol) throw std::invalid_argument("Experiment: negative entry");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("Experiment: row sum != 1");
    }
  }
};

/// Signal-to-action map; sigma[k] is the action taken on signal k.
using Interpretation = std::vector<int>;

inline Interpretation identity_interpretation(int m) {
  Interpretation sigma(m);
  for (int k = 0; k < m; ++k) sigma[k] = k;
  return sigma;
}

/// Fully informative experiment: recommends each state's best action
/// (lexicographic tie-break).
inline Experiment fully_informative(const PayoffMatrix& env) {
  Experiment e;
  e.n = env.n;
  e.m = env.m;
  e.pi.assign(env.n, std::vector<double>(env.m, 0.0));
  for (int i = 0; i < env.n; ++i) {
    int best = 0;
    for (int j = 1; j < env.m; ++j)
      if (env.u[i][j] > env.u[i][best]) best = j;
    e.pi[i][best] = 1.0;
  }
  return e;
}

/// No-information experiment putting all mass on signal m.
inline Experiment no_information(const PayoffMatrix& env) {
  Experiment e;
  e.n = env.n;
  e.m = env.m;
  e.pi.assign(env.n, std::vector<double>(env.m, 0.0));
  for (int i = 0; i < env.n; ++i) e.pi[i][env.m - 1] = 1.0;
  return e;
}

/// V_theta^(sigma)(E): expected payoff when action sigma(k) is taken on
/// every signal k. theta may have n or n-1 coordinates.
inline double value_sigma(const PayoffMatrix& env, const std::vector<double>& theta,
                          const Experiment& e, const Interpretation& sigma) {
  if (e.n != env.n || e.m != env.m) throw std::invalid_argument("value_sigma: dimension mismatch");
  if (static_cast<int>(sigma.size()) != e.m)
    throw std::invalid_argument("value_sigma: interpretation not total");
  std::vector<double> p = full_type(env, theta);
  double total = 0.0;
  for (int i = 0; i < env.n; ++i)
    for (int k = 0; k < env.m; ++k) total += p[i] * e.pi[i][k] * env.u[i][sigma[k]];
  return total;
}

inline double value_sigma(const PayoffMatrix& env, double theta, const Experiment& e,
                          const Interpretation& sigma) {
  return value_sigma(env, std::vector<double>{theta}, e, sigma);
}

/// V_theta(E) = sum_k max_j sum_i theta_i pi_ik u_ij, with the per-signal
/// argmax interpretation (ties toward the lowest action index).
inline std::pair<double, Interpretation> value_best(const PayoffMatrix& env,
                                                    const std::vector<double>& theta,
                                                    const Experiment& e) {
  if (e.n != env.n || e.m != env.m) throw std::invalid_argument("value_best: dimension mismatch");
  std::vector<double> p = full_type(env, theta);
  Interpretation sigma(e.m, 0);
  double total = 0.0;
  for (int k = 0; k < e.m; ++k) {
    double best = -std::numeric_limits<double>::infinity();
    int best_j = 0;
    for (int j = 0; j < env.m; ++j) {
      double v = 0.0;
      for (int i = 0; i < env.n; ++i) v += p[i] * e.pi[i][k] * env.u[i][j];
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    sigma[k] = best_j;
    total += best;
  }
  return {total, sigma};
}

inline std::pair<double, Interpretation> value_best(const PayoffMatrix& env, double theta,
                                                    const Experiment& e) {
  return value_best(env, std::vector<double>{theta}, e);
}

/// Identity-interpretation value V*_theta(E).
inline double value_star(const PayoffMatrix& env, const std::vector<double>& theta,
                         const Experiment& e) {
  return value_sigma(env, theta, e, identity_interpretation(env.m));
}

inline double value_star(const PayoffMatrix& env, double theta, const Experiment& e) {
  return value_star(env, std::vector<double>{theta}, e);
}

/// Scalar form of a semi-informative experiment: q = pi_11 u_11 - pi_2m u_2m.
struct SemiInformativeQ {
  double q = 0.0;
  double u11 = 1.0;
  double u2m = 1.0;
};

inline bool is_semi_informative(const Experiment& e, double tol = 1e-9) {
  if (e.n != 2) return false;
  for (int i = 0; i < 2; ++i)
    for (int k = 1; k + 1 < e.m; ++k)
      if (std::abs(e.pi[i][k]) > tol) return false;
  return std::abs(e.pi[0][0] - 1.0) <= tol || std::abs(e.pi[1][e.m - 1] - 1.0) <= tol;
}

inline SemiInformativeQ q_of(const PayoffMatrix& env, const Experiment& e) {
  if (!is_semi_informative(e)) throw std::invalid_argument("q_of: not semi-informative");
  double u11 = env.u[0][0], u2m = env.u[1][env.m - 1];
  return {e.pi[0][0] * u11 - e.pi[1][e.m - 1] * u2m, u11, u2m};
}

/// Experiment with the given q: Pattern 1 (pi_2m = 1) when q <= u11 - u2m,
/// Pattern 2 (pi_11 = 1) otherwise.
inline Experiment experiment_of(const PayoffMatrix& env, double q) {
  double u11 = env.u[0][0], u2m = env.u[1][env.m - 1];
  if (q < -u2m - 1e-9 || q > u11 + 1e-9)
    throw std::invalid_argument("experiment_of: q outside [-u2m, u11]");
  q = std::clamp(q, -u2m, u11);
  Experiment e;
  e.n = 2;
  e.m = env.m;
  e.pi.assign(2, std::vector<double>(env.m, 0.0));
  if (q <= u11 - u2m) {
    double pi11 = (q + u2m) / u11;
    e.pi[0][0] = pi11;
    e.pi[0][env.m - 1] = 1.0 - pi11;
    e.pi[1][env.m - 1] = 1.0;
  } else {
    double pi2m = (u11 - q) / u2m;
    e.pi[0][0] = 1.0;
    e.pi[1][env.m - 1] = pi2m;
    e.pi[1][0] = 1.0 - pi2m;
  }
  return e;
}

/// V*_theta of the q-experiment: theta q + u2m + min{u11 - u2m - q, 0}.
inline double value_star_q(const PayoffMatrix& env, double q, double theta) {
  double u11 = env.u[0][0], u2m = env.u[1][env.m - 1];
  return theta * q + u2m + std::min(u11 - u2m - q, 0.0);
}

/// Moves all interior-signal mass to signals 1 and m, preserving the
/// identity-interpretation utility at every theta. Price unchanged.
inline std::pair<Experiment, double> to_fully_recommending(const PayoffMatrix& env,
                                                           const Experiment& e, double price) {
  if (env.n != 2) throw std::invalid_argument("to_fully_recommending: binary-state only");
  Experiment out = e;
  int m = env.m;
  for (int i = 0; i < 2; ++i) {
    const std::vector<double>& u = env.u[i];
    double lo = u[i == 0 ? m - 1 : 0];  // payoff of the signal receiving eps1
    double hi = u[i == 0 ? 0 : m - 1];
    for (int k = 1; k + 1 < m; ++k) {
      double mass = out.pi[i][k];
      if (mass == 0.0) continue;
      // Split so that eps1*(u_ik - lo) = eps2*(hi - u_ik): the value change
      // cancels state by state.
      double denom = hi - lo;
      double eps_hi = mass * (u[k] - lo) / denom;
      double eps_lo = mass - eps_hi;
      out.pi[i][k] = 0.0;
      out.pi[i][0] += (i == 0) ? eps_hi : eps_lo;
      out.pi[i][m - 1] += (i == 0) ? eps_lo : eps_hi;
    }
  }
  return {out, price};
}

/// Converts a fully-recommending experiment to a semi-informative one with
/// unchanged net identity utility: V*(E'') - price'' = V*(E) - price.
inline std::pair<Experiment, double> to_semi_informative(const PayoffMatrix& env,
                                                         const Experiment& e, double price) {
  if (env.n != 2) throw std::invalid_argument("to_semi_informative: binary-state only");
  int m = env.m;
  for (int i = 0; i < 2; ++i)
    for (int k = 1; k + 1 < m; ++k)
      if (std::abs(e.pi[i][k]) > 1e-12)
        throw std::invalid_argument("to_semi_informative: experiment has interior-signal mass");

  double u11 = env.u[0][0], u2m = env.u[1][m - 1];
  double pi11 = e.pi[0][0], pi2m = e.pi[1][m - 1];
  Experiment out = e;
  double eps1, eps2;
  if ((1.0 - pi11) * u11 <= (1.0 - pi2m) * u2m) {
    eps1 = 1.0 - pi11;
    eps2 = (u11 / u2m) * eps1;
  } else {
    eps2 = 1.0 - pi2m;
    eps1 = (u2m / u11) * eps2;
  }
  out.pi[0][0] = pi11 + eps1;
  out.pi[0][m - 1] = 1.0 - out.pi[0][0];
  out.pi[1][m - 1] = pi2m + eps2;
  out.pi[1][0] = 1.0 - out.pi[1][m - 1];
  return {out, price + eps2 * u2m};
}

}  // namespace infomech
