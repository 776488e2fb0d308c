#pragma once

// Menus and mechanisms: revenue, IC/IR verification, the q-space payment
// rule, and the full-information extraction arguments.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "infomech/dist.hpp"
#include "infomech/env.hpp"
#include "infomech/experiment.hpp"
#include "infomech/threads.hpp"

namespace infomech {

struct Option {
  Experiment experiment;
  double price = 0.0;
};

/// Priced option list. The buyer may always walk away with u(theta).
struct Menu {
  std::vector<Option> options;
};

/// Per-type option assignment over a finite grid.
struct Mechanism {
  TypeGrid grid;
  std::vector<Option> options;
  std::vector<int> assignment;  // index into options, one per grid point

  int option_size() const { return static_cast<int>(options.size()); }
  double payment(std::size_t i) const { return options[assignment[i]].price; }

  void validate() const {
    grid.validate();
    if (assignment.size() != grid.size()) throw std::invalid_argument("Mechanism: bad assignment");
    for (int a : assignment)
      if (a < 0 || a >= option_size()) throw std::invalid_argument("Mechanism: bad option index");
  }
};

/// Verification summary; violations are clamped at zero.
struct ICReport {
  double ic_violation = 0.0;            // over all interpretations sigma
  double responsive_ic_violation = 0.0; // identity interpretation only
  double ir_violation = 0.0;
  std::size_t ic_witness_from = 0, ic_witness_to = 0;
  std::size_t ir_witness = 0;
};

/// Best response against a menu: argmax of V_theta(E) - price together with
/// the outside option worth u(theta). Ties prefer the lowest option index;
/// the outside option (index -1) loses all ties.
inline std::pair<int, double> best_response(const Menu& menu, const PayoffMatrix& env,
                                            const std::vector<double>& theta) {
  if (menu.options.empty()) throw std::invalid_argument("best_response: empty menu");
  double outside = 0.0;
  if (env.n == 2) {
    outside = u_of(env, theta[0]);
  } else {
    std::vector<double> p = full_type(env, theta);
    outside = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < env.m; ++j) {
      double v = 0.0;
      for (int i = 0; i < env.n; ++i) v += p[i] * env.u[i][j];
      outside = std::max(outside, v);
    }
  }
  int best = -1;
  double best_util = outside;
  for (std::size_t j = 0; j < menu.options.size(); ++j) {
    double util = value_best(env, theta, menu.options[j].experiment).first -
                  menu.options[j].price;
    if (util > best_util || (best == -1 && util >= best_util)) {
      best = static_cast<int>(j);
      best_util = util;
    }
  }
  return {best, best_util};
}

inline std::pair<int, double> best_response(const Menu& menu, const PayoffMatrix& env,
                                            double theta) {
  return best_response(menu, env, std::vector<double>{theta});
}

/// Expected revenue of a menu under best responses on the grid.
inline double revenue(const Menu& menu, const PayoffMatrix& env, const TypeGrid& grid) {
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto [j, util] = best_response(menu, env, grid.points[i]);
    if (j >= 0) total += grid.masses[i] * menu.options[j].price;
  }
  return total;
}

inline double revenue(const Mechanism& mech) {
  double total = 0.0;
  for (std::size_t i = 0; i < mech.grid.size(); ++i)
    total += mech.grid.masses[i] * mech.payment(i);
  return total;
}

namespace detail {

/// Relabels signals so that following recommendations is optimal for the
/// given type: column k of E is merged into column sigma(k).
inline Experiment responsify(const Experiment& e, const Interpretation& sigma) {
  Experiment out;
  out.n = e.n;
  out.m = e.m;
  out.pi.assign(e.n, std::vector<double>(e.m, 0.0));
  for (int i = 0; i < e.n; ++i)
    for (int k = 0; k < e.m; ++k) out.pi[i][sigma[k]] += e.pi[i][k];
  return out;
}

}  // namespace detail

/// Induces a grid mechanism from a menu via best responses. Signals of each
/// chosen experiment are relabeled per the buyer's optimal interpretation,
/// so the induced mechanism is responsive (V* = V at the assigned option).
inline Mechanism as_mechanism(const Menu& menu, const PayoffMatrix& env, const TypeGrid& grid) {
  Mechanism mech;
  mech.grid = grid;
  std::map<std::pair<std::vector<std::vector<double>>, double>, int> seen;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto [j, util] = best_response(menu, env, grid.points[i]);
    Option opt;
    if (j < 0) {
      opt = {no_information(env), 0.0};
      auto sigma = value_best(env, grid.points[i], opt.experiment).second;
      opt.experiment = detail::responsify(opt.experiment, sigma);
    } else {
      opt = menu.options[j];
      auto sigma = value_best(env, grid.points[i], opt.experiment).second;
      opt.experiment = detail::responsify(opt.experiment, sigma);
    }
    auto key = std::make_pair(opt.experiment.pi, opt.price);
    auto it = seen.find(key);
    int idx;
    if (it == seen.end()) {
      idx = static_cast<int>(mech.options.size());
      mech.options.push_back(opt);
      seen.emplace(std::move(key), idx);
    } else {
      idx = it->second;
    }
    mech.assignment.push_back(idx);
  }
  return mech;
}

/// Checks Eq. (IC): V*_t(E(t)) - t(t) >= V^sigma_t(E(t')) - t(t') for all
/// type pairs and interpretations, and IR against u(theta). The deviation
/// side optimizes sigma signal by signal, which equals the max over all
/// m^m maps. Violations are clamped at zero.
inline ICReport verify(const Mechanism& mech, const PayoffMatrix& env) {
  mech.validate();
  const std::size_t n = mech.grid.size();

  // Honest utilities and per-type outside option.
  std::vector<double> honest(n), outside(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& theta = mech.grid.points[i];
    honest[i] = value_star(env, theta, mech.options[mech.assignment[i]].experiment) -
                mech.payment(i);
    if (env.n == 2) {
      outside[i] = u_of(env, theta[0]);
    } else {
      std::vector<double> p = full_type(env, theta);
      double best = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < env.m; ++j) {
        double v = 0.0;
        for (int s = 0; s < env.n; ++s) v += p[s] * env.u[s][j];
        best = std::max(best, v);
      }
      outside[i] = best;
    }
  }

  // Per (type, option) deviation values. sigma decomposes per signal, so
  // value_best is the exact max over all m^m interpretations.
  const std::size_t n_opts = mech.options.size();
  std::vector<double> dev(n * n_opts), vst(n * n_opts);
  parallel_chunks(n, 64, [&](std::size_t lo, std::size_t hi, int) {
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t o = 0; o < n_opts; ++o) {
        dev[i * n_opts + o] =
            value_best(env, mech.grid.points[i], mech.options[o].experiment).first;
        vst[i * n_opts + o] =
            value_star(env, mech.grid.points[i], mech.options[o].experiment);
      }
  });

  ICReport rep;
  for (std::size_t i = 0; i < n; ++i) {
    double best_dev = -std::numeric_limits<double>::infinity();
    double best_dev_star = -std::numeric_limits<double>::infinity();
    std::size_t best_from = i;
    for (std::size_t i2 = 0; i2 < n; ++i2) {
      double v = dev[i * n_opts + mech.assignment[i2]] - mech.payment(i2);
      if (v > best_dev) {
        best_dev = v;
        best_from = i2;
      }
      best_dev_star =
          std::max(best_dev_star, vst[i * n_opts + mech.assignment[i2]] - mech.payment(i2));
    }
    double gap = best_dev - honest[i];
    if (gap > rep.ic_violation) {
      rep.ic_violation = gap;
      rep.ic_witness_from = i;
      rep.ic_witness_to = best_from;
    }
    rep.responsive_ic_violation = std::max(rep.responsive_ic_violation, best_dev_star - honest[i]);
    double ir_gap = outside[i] - honest[i];
    if (ir_gap > rep.ir_violation) {
      rep.ir_violation = ir_gap;
      rep.ir_witness = i;
    }
  }
  return rep;
}

/// Payment rule for q-described mechanisms: for a nondecreasing step function q
/// on the grid cells [theta_i, theta_{i+1}) (theta_1 = 0, theta_{N+1} = 1),
/// t_i = theta_i q_i + min{u11 - u2m - q_i, 0} - sum_{j<i} q_j dt_j.
inline std::vector<double> payment_from_q(const std::vector<double>& q, const PayoffMatrix& env,
                                          const TypeGrid& grid, double integral_tol = 1e-9) {
  if (q.size() != grid.size()) throw std::invalid_argument("payment_from_q: size mismatch");
  if (grid.n != 2) throw std::invalid_argument("payment_from_q: binary grids only");
  if (std::abs(grid.scalar(0)) > 1e-12)
    throw std::invalid_argument("payment_from_q: grid must start at theta = 0");
  double u11 = env.u[0][0], u2m = env.u[1][env.m - 1];
  double integral = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i + 1 < q.size() && q[i] > q[i + 1] + 1e-12)
      throw std::invalid_argument("payment_from_q: q must be nondecreasing");
    if (q[i] < -u2m - 1e-9 || q[i] > u11 + 1e-9)
      throw std::invalid_argument("payment_from_q: q outside [-u2m, u11]");
    double next = (i + 1 < q.size()) ? grid.scalar(i + 1) : 1.0;
    integral += q[i] * (next - grid.scalar(i));
  }
  if (std::abs(integral - (u11 - u2m)) > integral_tol)
    throw std::invalid_argument("payment_from_q: integral of q must equal u11 - u2m");

  std::vector<double> t(q.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    double theta = grid.scalar(i);
    t[i] = theta * q[i] + std::min(u11 - u2m - q[i], 0.0) - cum;
    if (t[i] < 0.0 && t[i] > -1e-9) t[i] = 0.0;  // rounding noise only
    double next = (i + 1 < q.size()) ? grid.scalar(i + 1) : 1.0;
    cum += q[i] * (next - theta);
  }
  return t;
}

/// For an IR mechanism, some option price posted on the
/// fully informative experiment earns at least Rev(M)/option_size.
/// Returns the best candidate price and its full-information revenue.
inline std::pair<double, double> full_info_extraction(const Mechanism& mech,
                                                      const PayoffMatrix& env,
                                                      const TypeGrid& grid) {
  ICReport rep = verify(mech, env);
  if (rep.ir_violation > 1e-9)
    throw std::invalid_argument("full_info_extraction: mechanism is not IR");

  double best_rev = -1.0, best_price = 0.0;
  for (const auto& opt : mech.options) {
    double p = opt.price;
    double rev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (gain_of(env, grid.points[i]) >= p - 1e-15) rev += grid.masses[i] * p;
    if (rev > best_rev) {
      best_rev = rev;
      best_price = p;
    }
  }
  return {best_price, best_rev};
}

struct BucketExtraction {
  double price = 0.0;
  double revenue = 0.0;
  int bucket_count = 0;
};

/// Dyadic price-bucket extraction: options are split into dyadic price
/// buckets; the cheapest price of the best bucket posted on full information
/// earns at least Rev(menu) / (2 ceil(log2(t_max/t_min))).
inline BucketExtraction price_bucket_extraction(const Menu& menu, const PayoffMatrix& env,
                                                const TypeGrid& grid) {
  double t_max = 0.0;
  double t_min = std::numeric_limits<double>::infinity();
  for (const auto& opt : menu.options) {
    t_max = std::max(t_max, opt.price);
    if (opt.price > 0.0) t_min = std::min(t_min, opt.price);
  }
  if (t_max <= 0.0) throw std::invalid_argument("price_bucket_extraction: zero max price");

  int k = std::max(1, static_cast<int>(std::ceil(std::log2(t_max / t_min) - 1e-12)));
  // Bucket b covers prices in [t_min 2^b, t_min 2^{b+1}); the top edge joins
  // the last bucket.
  auto bucket_of = [&](double p) {
    int b = static_cast<int>(std::floor(std::log2(p / t_min) + 1e-12));
    return std::clamp(b, 0, k - 1);
  };

  // Revenue share of each bucket under best responses.
  std::vector<double> share(k, 0.0);
  std::vector<double> cheapest(k, std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < menu.options.size(); ++j)
    if (menu.options[j].price > 0.0) {
      int b = bucket_of(menu.options[j].price);
      cheapest[b] = std::min(cheapest[b], menu.options[j].price);
    }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto [j, util] = best_response(menu, env, grid.points[i]);
    if (j >= 0 && menu.options[j].price > 0.0)
      share[bucket_of(menu.options[j].price)] += grid.masses[i] * menu.options[j].price;
  }

  BucketExtraction out;
  out.bucket_count = k;
  double best = -1.0;
  for (int b = 0; b < k; ++b) {
    if (!std::isfinite(cheapest[b])) continue;
    double p = cheapest[b];
    double rev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (gain_of(env, grid.points[i]) >= p - 1e-15) rev += grid.masses[i] * p;
    if (rev > best) {
      best = rev;
      out.price = p;
      out.revenue = rev;
    }
  }
  return out;
}

/// Reprices the options of a delta-IC, delta-IR mechanism as
/// t' = (1-eta) t - delta, yielding an exactly IC and IR menu with revenue
/// at least (1-eta) Rev(M) - delta/eta - delta. Negative prices clamp to 0.
inline Menu eps_ic_to_menu(const Mechanism& mech, double eta, double delta,
                           bool* clamped = nullptr) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eps_ic_to_menu: eta in (0,1)");
  Menu menu;
  if (clamped) *clamped = false;
  for (const auto& opt : mech.options) {
    double p = (1.0 - eta) * opt.price - delta;
    if (p < 0.0) {
      p = 0.0;
      if (clamped) *clamped = true;
    }
    menu.options.push_back({opt.experiment, p});
  }
  return menu;
}

inline Menu eps_ic_to_menu(const Mechanism& mech, const PayoffMatrix& env, double eta,
                           bool* clamped = nullptr) {
  ICReport rep = verify(mech, env);
  return eps_ic_to_menu(mech, eta, std::max(rep.ic_violation, rep.ir_violation), clamped);
}

struct FrevResult {
  double price = 0.0;
  double revenue = 0.0;
};

/// Best posted price for the fully informative experiment: maximizes
/// p * Pr[U(theta) >= p] over candidates p in {U(theta_i)}. Among prices
/// within a 1e-12 relative band of the optimum the smallest is returned.
inline FrevResult frev(const PayoffMatrix& env, const TypeGrid& grid) {
  if (grid.size() == 0) throw std::invalid_argument("frev: empty grid");
  std::vector<std::pair<double, double>> gm(grid.size());  // (U, mass)
  for (std::size_t i = 0; i < grid.size(); ++i)
    gm[i] = {gain_of(env, grid.points[i]), grid.masses[i]};
  std::sort(gm.begin(), gm.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  FrevResult best;
  double tail = 0.0;
  for (std::size_t i = 0; i < gm.size(); ++i) {
    tail += gm[i].second;
    if (i + 1 < gm.size() && gm[i + 1].first == gm[i].first) continue;
    double p = gm[i].first;
    if (p <= 0.0) continue;
    double rev = p * tail;
    if (rev > best.revenue * (1.0 + 1e-12) ||
        (rev >= best.revenue * (1.0 - 1e-12) && p < best.price)) {
      best = {p, rev};
    }
  }
  return best;
}

}  // namespace infomech
