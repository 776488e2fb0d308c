#pragma once

// The revenue-maximization program over responsive-IC and IR mechanisms for
// binary-state environments, discretized on a type grid and solved as a
// single LP with exact min-term linearization.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "infomech/env.hpp"
#include "infomech/lp.hpp"
#include "infomech/mech.hpp"

namespace infomech {

/// Optimal q step function with merged options.
struct QSolution {
  std::vector<double> q;          // per grid point, nondecreasing
  double objective = 0.0;         // LP objective value
  double revenue = 0.0;           // objective - (u11 - u2m)
  int option_size = 0;            // distinct q values after merging
  long pivots = 0;
};

/// Builds the discrete program: variables q_i with auxiliary s_i for the
/// objective min terms and r_{ik} for the IR constraint min terms. The
/// linearization is exact: the objective coefficient of s_i is f_i >= 0 and
/// the r_{ik} appear in a lower-bounded sum, so slack is never beneficial.
inline StandardLP build_optmech_program(const PayoffMatrix& env, const TypeGrid& grid) {
  if (!is_canonical(env)) throw std::invalid_argument("build_optmech_program: canonical env");
  if (env.m < 2) throw std::invalid_argument("build_optmech_program: m >= 2");
  grid.validate();
  if (grid.n != 2 || std::abs(grid.scalar(0)) > 1e-12)
    throw std::invalid_argument("build_optmech_program: binary grid starting at 0 required");

  const int N = static_cast<int>(grid.size());
  const int m = env.m;
  const double u11 = env.u[0][0], u2m = env.u[1][m - 1];
  const double alpha = u11 - u2m;

  // IR-curve piece slopes l_k = u_{1,m+1-k} - u_{2,m+1-k}.
  std::vector<double> ell(m + 1, 0.0);
  for (int k = 1; k <= m; ++k) ell[k] = env.u[0][m - k] - env.u[1][m - k];

  std::vector<double> width(N), cumF(N);
  double F = 0.0;
  for (int i = 0; i < N; ++i) {
    double next = (i + 1 < N) ? grid.scalar(i + 1) : 1.0;
    width[i] = next - grid.scalar(i);
    F += grid.masses[i];
    cumF[i] = F;
  }

  StandardLP lp;
  // q_i with objective weight theta_i f_i + (theta_{i+1} - theta_i) F_i.
  for (int i = 0; i < N; ++i)
    lp.add_var(-u2m, u11, grid.scalar(i) * grid.masses[i] + width[i] * cumF[i]);
  // s_i = min{u11 - u2m - q_i, 0}, entering the objective with weight f_i.
  for (int i = 0; i < N; ++i) lp.add_var(-u2m, 0.0, grid.masses[i]);
  // r_{ik} = min{q_i - l_k, 0} for k = 2..m-1.
  for (int k = 2; k <= m - 1; ++k)
    for (int i = 0; i < N; ++i) lp.add_var(-u2m - ell[k], 0.0, 0.0);

  auto qv = [](int i) { return i; };
  auto sv = [N](int i) { return N + i; };
  auto rv = [N](int k, int i) { return 2 * N + (k - 2) * N + i; };

  for (int i = 0; i + 1 < N; ++i)
    lp.add_row({{qv(i), 1.0}, {qv(i + 1), -1.0}}, RowSense::LessEq, 0.0);

  std::vector<std::pair<int, double>> integral;
  for (int i = 0; i < N; ++i)
    if (width[i] != 0.0) integral.push_back({qv(i), width[i]});
  lp.add_row(std::move(integral), RowSense::Equal, alpha);

  for (int i = 0; i < N; ++i)
    lp.add_row({{sv(i), 1.0}, {qv(i), 1.0}}, RowSense::LessEq, alpha);

  for (int k = 2; k <= m - 1; ++k) {
    for (int i = 0; i < N; ++i)
      lp.add_row({{rv(k, i), 1.0}, {qv(i), -1.0}}, RowSense::LessEq, -ell[k]);
    std::vector<std::pair<int, double>> sum;
    for (int i = 0; i < N; ++i)
      if (width[i] != 0.0) sum.push_back({rv(k, i), width[i]});
    lp.add_row(std::move(sum), RowSense::GreaterEq, env.u[1][m - k] - u2m);
  }
  return lp;
}

namespace detail {

/// Merges grid cells whose q values agree within tol into runs, replacing
/// each run by its width-weighted mean so the integral of q is preserved.
inline std::vector<double> merge_q(const std::vector<double>& q, const std::vector<double>& width,
                                   double tol) {
  std::vector<double> out(q.size());
  std::size_t i = 0;
  while (i < q.size()) {
    std::size_t j = i;
    double wsum = 0.0, qsum = 0.0, plain = 0.0;
    while (j < q.size() && std::abs(q[j] - q[i]) <= tol) {
      wsum += width[j];
      qsum += q[j] * width[j];
      plain += q[j];
      ++j;
    }
    double v = (wsum > 0.0) ? qsum / wsum : plain / static_cast<double>(j - i);
    for (std::size_t r = i; r < j; ++r) out[r] = v;
    i = j;
  }
  // Merging run means may not stay sorted when runs nearly touch; repair.
  for (std::size_t r = 1; r < out.size(); ++r) out[r] = std::max(out[r], out[r - 1]);
  return out;
}

}  // namespace detail

/// Solves the program, merges cells with equal q into options and equips
/// them with the q-space payment rule.
inline std::pair<QSolution, Mechanism> solve_optmech(const PayoffMatrix& env,
                                                     const TypeGrid& grid,
                                                     double merge_tol = 1e-8) {
  StandardLP lp = build_optmech_program(env, grid);
  LPResult res = solve_lp(lp);
  if (res.status == LPStatus::Infeasible)
    throw std::runtime_error("solve_optmech: program infeasible (internal bug)");
  if (res.status != LPStatus::Optimal)
    throw std::runtime_error("solve_optmech: LP did not converge: " + res.diagnostics);

  const int N = static_cast<int>(grid.size());
  const double alpha = env.u[0][0] - env.u[1][env.m - 1];

  std::vector<double> width(N);
  for (int i = 0; i < N; ++i)
    width[i] = ((i + 1 < N) ? grid.scalar(i + 1) : 1.0) - grid.scalar(i);

  std::vector<double> q(res.x.begin(), res.x.begin() + N);
  for (int i = 0; i + 1 < N; ++i) q[i + 1] = std::max(q[i + 1], q[i]);  // scrub LP noise
  q = detail::merge_q(q, width, merge_tol);

  std::vector<double> t = payment_from_q(q, env, grid, 1e-6);

  QSolution sol;
  sol.q = q;
  sol.objective = res.objective;
  sol.revenue = res.objective - alpha;
  sol.pivots = res.pivots;

  // One option per run of equal q; the run shares the first cell's payment.
  Mechanism mech;
  mech.grid = grid;
  mech.assignment.resize(N);
  int i = 0;
  while (i < N) {
    int j = i;
    while (j < N && q[j] == q[i]) ++j;
    mech.options.push_back({experiment_of(env, q[i]), t[i]});
    for (int r = i; r < j; ++r) mech.assignment[r] = static_cast<int>(mech.options.size()) - 1;
    i = j;
  }
  sol.option_size = mech.option_size();
  return {sol, mech};
}

inline std::pair<QSolution, Mechanism> solve_optmech(const PayoffMatrix& env,
                                                     const ContinuousDist& dist, int N) {
  return solve_optmech(env, discretize(dist, N));
}

}  // namespace infomech
