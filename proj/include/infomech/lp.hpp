#pragma once

// Dense two-phase simplex over bounded variables. Dantzig pricing with a
// switch to Bland's rule after 5*(rows+cols) pivots, so no cycling.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace infomech {

enum class RowSense { LessEq, Equal, GreaterEq };

enum class LPStatus { Optimal, Infeasible, Unbounded, PivotLimit };

/// max c^T x subject to rows of sparse coefficients and variable bounds
/// (+-infinity allowed).
struct StandardLP {
  struct Row {
    std::vector<std::pair<int, double>> coeffs;
    RowSense sense = RowSense::LessEq;
    double rhs = 0.0;
  };

  std::vector<double> objective;
  std::vector<double> lower, upper;
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }

  int add_var(double lo, double up, double obj) {
    objective.push_back(obj);
    lower.push_back(lo);
    upper.push_back(up);
    return num_vars() - 1;
  }

  void add_row(std::vector<std::pair<int, double>> coeffs, RowSense sense, double rhs) {
    rows.push_back({std::move(coeffs), sense, rhs});
  }
};

struct LPResult {
  LPStatus status = LPStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  long pivots = 0;
  std::string diagnostics;
};

namespace lp_detail {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;

enum class VarState { Basic, AtLower, AtUpper };

struct Tableau {
  int rows = 0, cols = 0;
  std::vector<double> t;      // rows x cols, row-major
  std::vector<double> cost;   // reduced-cost row
  std::vector<double> beta;   // basic values
  std::vector<int> basis;     // column basic in each row
  std::vector<VarState> state;
  std::vector<double> ub;     // per-column upper bound (lower is 0)
  std::vector<char> enterable;

  double* row(int r) { return t.data() + static_cast<std::size_t>(r) * cols; }
};

inline void pivot(Tableau& tb, int pr, int pc) {
  double* prow = tb.row(pr);
  double inv = 1.0 / prow[pc];
  for (int j = 0; j < tb.cols; ++j) prow[j] *= inv;
  prow[pc] = 1.0;
  for (int r = 0; r < tb.rows; ++r) {
    if (r == pr) continue;
    double* rr = tb.row(r);
    double f = rr[pc];
    if (f == 0.0) continue;
    for (int j = 0; j < tb.cols; ++j) rr[j] -= f * prow[j];
    rr[pc] = 0.0;
  }
  double f = tb.cost[pc];
  if (f != 0.0) {
    for (int j = 0; j < tb.cols; ++j) tb.cost[j] -= f * prow[j];
    tb.cost[pc] = 0.0;
  }
}

/// One simplex phase; returns Optimal when no eligible entering column.
inline LPStatus run_phase(Tableau& tb, long& pivots, long bland_after, long pivot_cap) {
  for (;;) {
    bool bland = pivots >= bland_after;
    if (pivots >= pivot_cap) return LPStatus::PivotLimit;

    int pc = -1;
    int dir = 0;  // +1 entering from lower, -1 from upper
    double best = kCostTol;
    for (int j = 0; j < tb.cols; ++j) {
      if (!tb.enterable[j] || tb.state[j] == VarState::Basic) continue;
      double d = tb.cost[j];
      double gain = (tb.state[j] == VarState::AtLower) ? d : -d;
      if (gain > best) {
        pc = j;
        dir = (tb.state[j] == VarState::AtLower) ? 1 : -1;
        if (bland) break;
        best = gain;
      }
    }
    if (pc < 0) return LPStatus::Optimal;

    // Ratio test: entering moves by t >= 0 in direction dir.
    double limit = tb.ub[pc];  // own-bound flip
    int pr = -1;
    bool leaves_at_upper = false;
    for (int r = 0; r < tb.rows; ++r) {
      double a = tb.row(r)[pc] * dir;
      double cap;
      bool at_upper;
      if (a > kPivotTol) {
        cap = tb.beta[r] / a;  // basic falls to 0
        at_upper = false;
      } else if (a < -kPivotTol && tb.ub[tb.basis[r]] < kInf) {
        cap = (tb.ub[tb.basis[r]] - tb.beta[r]) / (-a);  // basic rises to ub
        at_upper = true;
      } else {
        continue;
      }
      if (cap < -1e-12) cap = 0.0;
      bool better = cap < limit - 1e-12;
      if (!better && cap < limit + 1e-12 && pr >= 0 && bland &&
          tb.basis[r] < tb.basis[pr])
        better = true;  // Bland: break ratio ties toward the smallest index
      if (better || (pr < 0 && cap <= limit)) {
        limit = cap;
        pr = r;
        leaves_at_upper = at_upper;
      }
    }

    if (limit == kInf) return LPStatus::Unbounded;
    ++pivots;

    if (pr < 0) {
      // Bound flip: entering variable traverses to its other bound.
      for (int r = 0; r < tb.rows; ++r) tb.beta[r] -= tb.row(r)[pc] * dir * limit;
      tb.state[pc] = (dir > 0) ? VarState::AtUpper : VarState::AtLower;
      continue;
    }

    double entering_value = (dir > 0 ? 0.0 : tb.ub[pc]) + dir * limit;
    for (int r = 0; r < tb.rows; ++r)
      if (r != pr) tb.beta[r] -= tb.row(r)[pc] * dir * limit;

    int leaving = tb.basis[pr];
    tb.state[leaving] = leaves_at_upper ? VarState::AtUpper : VarState::AtLower;
    tb.state[pc] = VarState::Basic;
    tb.basis[pr] = pc;
    tb.beta[pr] = entering_value;
    pivot(tb, pr, pc);
  }
}

}  // namespace lp_detail

/// Two-phase bounded-variable simplex. Returns an optimal basic solution,
/// or INFEASIBLE / UNBOUNDED; PivotLimit signals a numerical failure after
/// the pivot budget.
inline LPResult solve_lp(const StandardLP& lp, long pivot_cap = 4'000'000) {
  using namespace lp_detail;
  const int n = lp.num_vars();
  const int nrows = static_cast<int>(lp.rows.size());

  for (int j = 0; j < n; ++j)
    if (!(lp.lower[j] <= lp.upper[j]))
      throw std::invalid_argument("solve_lp: empty variable bound interval");

  // Normalize variables to x_hat in [0, ub]: shift at a finite lower bound,
  // reflect upper-bounded-only, split free variables.
  struct Map {
    int col = -1, col_neg = -1;  // col_neg used for free variables
    double offset = 0.0;
    double sign = 1.0;
  };
  std::vector<Map> vmap(n);
  std::vector<double> ub;       // per normalized column
  std::vector<double> obj;      // normalized structural costs
  std::vector<std::vector<std::pair<int, double>>> cols;  // row coefficients per column
  auto new_col = [&](double up, double c) {
    ub.push_back(up);
    obj.push_back(c);
    cols.emplace_back();
    return static_cast<int>(ub.size()) - 1;
  };

  for (int j = 0; j < n; ++j) {
    double lo = lp.lower[j], up = lp.upper[j];
    if (lo > -kInf) {
      vmap[j] = {new_col(up - lo, lp.objective[j]), -1, lo, 1.0};
    } else if (up < kInf) {
      vmap[j] = {new_col(kInf, -lp.objective[j]), -1, up, -1.0};
    } else {
      int p = new_col(kInf, lp.objective[j]);
      int q = new_col(kInf, -lp.objective[j]);
      vmap[j] = {p, q, 0.0, 1.0};
    }
  }

  // Row coefficients in normalized columns plus adjusted rhs.
  std::vector<double> rhs(nrows);
  for (int r = 0; r < nrows; ++r) {
    double b = lp.rows[r].rhs;
    for (auto [j, a] : lp.rows[r].coeffs) {
      if (j < 0 || j >= n) throw std::invalid_argument("solve_lp: bad variable index");
      const Map& mp = vmap[j];
      b -= a * mp.offset;
      cols[mp.col].push_back({r, a * mp.sign});
      if (mp.col_neg >= 0) cols[mp.col_neg].push_back({r, -a});
    }
    rhs[r] = b;
  }

  // Slack columns; equalities get none.
  std::vector<int> slack_col(nrows, -1);
  for (int r = 0; r < nrows; ++r) {
    if (lp.rows[r].sense == RowSense::Equal) continue;
    double coef = (lp.rows[r].sense == RowSense::LessEq) ? 1.0 : -1.0;
    int c = new_col(kInf, 0.0);
    cols[c].push_back({r, coef});
    slack_col[r] = c;
  }

  // Artificials wherever the slack cannot start basic and feasible.
  const int nstruct_slack = static_cast<int>(ub.size());
  std::vector<int> art_col(nrows, -1);
  for (int r = 0; r < nrows; ++r) {
    bool slack_ok = false;
    if (slack_col[r] >= 0) {
      double coef = (lp.rows[r].sense == RowSense::LessEq) ? 1.0 : -1.0;
      slack_ok = rhs[r] / coef >= 0.0;
    }
    if (!slack_ok) {
      int c = new_col(kInf, 0.0);
      cols[c].push_back({r, rhs[r] >= 0.0 ? 1.0 : -1.0});
      art_col[r] = c;
    }
  }

  Tableau tb;
  tb.rows = nrows;
  tb.cols = static_cast<int>(ub.size());
  tb.t.assign(static_cast<std::size_t>(tb.rows) * tb.cols, 0.0);
  for (int c = 0; c < tb.cols; ++c)
    for (auto [r, a] : cols[c]) tb.row(r)[c] = a;
  tb.ub = ub;
  tb.beta.assign(nrows, 0.0);
  tb.basis.assign(nrows, -1);
  tb.state.assign(tb.cols, VarState::AtLower);
  tb.enterable.assign(tb.cols, 1);

  // The starting basis must be the identity: negate any row whose chosen
  // basic column carries coefficient -1.
  for (int r = 0; r < nrows; ++r) {
    int b = art_col[r] >= 0 ? art_col[r] : slack_col[r];
    if (tb.row(r)[b] < 0.0) {
      double* rr = tb.row(r);
      for (int j = 0; j < tb.cols; ++j) rr[j] = -rr[j];
      rhs[r] = -rhs[r];
    }
    tb.basis[r] = b;
    tb.state[b] = VarState::Basic;
    tb.beta[r] = rhs[r];
  }

  const long bland_after = 5L * (tb.rows + tb.cols);
  LPResult result;
  long pivots = 0;

  // Phase 1: maximize minus the sum of artificials.
  bool need_phase1 = false;
  tb.cost.assign(tb.cols, 0.0);
  for (int r = 0; r < nrows; ++r)
    if (art_col[r] >= 0) {
      need_phase1 = true;
      const double* rr = tb.row(r);
      for (int j = 0; j < tb.cols; ++j) tb.cost[j] += rr[j];
    }
  if (need_phase1) {
    for (int r = 0; r < nrows; ++r)
      if (art_col[r] >= 0) tb.cost[art_col[r]] = 0.0;
    LPStatus st = run_phase(tb, pivots, bland_after, pivot_cap);
    if (st != LPStatus::Optimal) {
      result.status = LPStatus::PivotLimit;
      result.pivots = pivots;
      result.diagnostics = "phase 1 did not converge";
      return result;
    }
    // Total infeasibility is the sum of basic artificial values.
    double total = 0.0;
    for (int r = 0; r < nrows; ++r)
      if (tb.basis[r] >= nstruct_slack) total += tb.beta[r];
    if (total > 1e-7) {
      result.status = LPStatus::Infeasible;
      result.pivots = pivots;
      return result;
    }
    // Artificials may stay basic only at level zero.
    for (int j = nstruct_slack; j < tb.cols; ++j) {
      tb.enterable[j] = 0;
      tb.ub[j] = 0.0;
    }
  }

  // Phase 2 objective: rebuild the reduced-cost row from scratch.
  tb.cost.assign(tb.cols, 0.0);
  for (int j = 0; j < tb.cols; ++j) tb.cost[j] = obj[j];
  for (int r = 0; r < nrows; ++r) {
    double cb = obj[tb.basis[r]];
    if (cb == 0.0) continue;
    const double* rr = tb.row(r);
    for (int j = 0; j < tb.cols; ++j) tb.cost[j] -= cb * rr[j];
  }

  LPStatus st = run_phase(tb, pivots, bland_after, pivot_cap);
  result.pivots = pivots;
  if (st == LPStatus::PivotLimit) {
    result.status = st;
    result.diagnostics = "pivot budget exhausted in phase 2";
    return result;
  }
  if (st == LPStatus::Unbounded) {
    result.status = st;
    return result;
  }

  // Recover x in the original variable space.
  std::vector<double> xhat(tb.cols, 0.0);
  for (int j = 0; j < tb.cols; ++j)
    if (tb.state[j] == VarState::AtUpper) xhat[j] = tb.ub[j];
  for (int r = 0; r < nrows; ++r) xhat[tb.basis[r]] = tb.beta[r];

  result.x.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const Map& mp = vmap[j];
    double v = mp.offset + mp.sign * xhat[mp.col];
    if (mp.col_neg >= 0) v -= xhat[mp.col_neg];
    result.x[j] = v;
  }
  result.objective = 0.0;
  for (int j = 0; j < n; ++j) result.objective += lp.objective[j] * result.x[j];
  result.status = LPStatus::Optimal;
  return result;
}

}  // namespace infomech
