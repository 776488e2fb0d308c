// Command-line interface: canonicalization, IR curves, pricing, the
// optimal responsive-IC/IR LP, full-information certificates, and the gap
// constructions. JSON in, JSON/CSV out; all outputs are deterministic.
//
// Exit codes: 0 success, 1 usage or input error, 2 mathematical gate
// failure (delta-IC bound, IC certification).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "infomech/fullinfo.hpp"
#include "infomech/json_io.hpp"
#include "infomech/lowerbound.hpp"
#include "infomech/multistate.hpp"
#include "infomech/optlp.hpp"

namespace im = infomech;
using im::json;

namespace {

struct GateFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path + " for writing");
  out << text;
}

/// Minimal schema validation; every command self-checks its payload.
bool validate_output(const std::string& command, const json& j) {
  if (!j.contains("schema") || j.at("schema") != im::kSchema) return false;
  auto has = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (!j.contains(k)) return false;
    return true;
  };
  if (command == "canon") return has({"env", "transform"});
  if (command == "ircurve") return has({"pieces", "slopes"});
  if (command == "frev") return has({"price", "revenue"});
  if (command == "opt") return has({"revenue", "options", "option_size"});
  if (command == "fullinfo-check") return has({"p_hat", "premise"});
  if (command == "lowerbound")
    return has({"m", "eps", "delta", "delta_bound", "delta_bound_ok", "frev", "rev"});
  if (command == "multistate") return has({"ratio_lb", "frev", "rev", "ic_ok", "points"});
  if (command == "multistate-uniform") return has({"grid", "price", "revenue"});
  if (command == "verify") return has({"ic_violation", "ir_violation"});
  if (command == "extract") return has({"mode", "price", "revenue"});
  return false;
}

void emit(const std::string& command, json payload, const std::string& out_path) {
  payload["schema"] = im::kSchema;
  // Move schema to the front for readability.
  json ordered;
  ordered["schema"] = im::kSchema;
  for (auto& [k, v] : payload.items())
    if (k != "schema") ordered[k] = v;
  if (!validate_output(command, ordered))
    throw std::logic_error("internal: output failed schema validation for " + command);
  write_text(out_path, ordered.dump(2) + "\n");
}

im::PayoffMatrix load_env(const std::string& path) { return im::env_from_json(read_json(path)); }

/// --dist accepts a JSON file path or the shorthands uniform, exp:LAMBDA,
/// normal:SIGMA2.
im::DistSpec load_dist(const std::string& spec) {
  std::ifstream probe(spec);
  if (probe.good()) return im::dist_from_json(read_json(spec));
  im::DistSpec out;
  if (spec == "uniform") {
    out.dist = im::uniform_dist();
  } else if (spec.rfind("exp:", 0) == 0) {
    out.dist = im::exponential_trunc(std::stod(spec.substr(4)));
  } else if (spec.rfind("normal:", 0) == 0) {
    out.dist = im::normal_trunc(std::stod(spec.substr(7)));
  } else {
    throw std::invalid_argument("unknown distribution spec: " + spec);
  }
  return out;
}

im::TypeGrid resolve_grid(const im::DistSpec& spec, int grid_n) {
  if (spec.is_grid) return spec.grid;
  return im::discretize(spec.dist, grid_n);
}

int run(int argc, char** argv) {
  CLI::App app{"information pricing toolkit"};
  app.require_subcommand(1);

  std::string env_path, dist_spec, mech_path, menu_path, out_path;
  int grid_n = 400;
  int simplex_g = 300;

  auto* canon = app.add_subcommand("canon", "canonicalize a binary-state payoff matrix");
  canon->add_option("--env", env_path)->required();
  canon->add_option("--out", out_path);

  auto* ircurve = app.add_subcommand("ircurve", "emit the IR curve as CSV");
  ircurve->add_option("--env", env_path)->required();
  std::string curve_out;
  ircurve->add_option("--out", curve_out)->required();

  auto* frevc = app.add_subcommand("frev", "best posted price for full information");
  frevc->add_option("--env", env_path)->required();
  frevc->add_option("--dist", dist_spec);
  frevc->add_option("--grid", grid_n);
  frevc->add_option("--simplex-grid", simplex_g);
  frevc->add_option("--out", out_path);

  auto* opt = app.add_subcommand("opt", "optimal responsive-IC and IR mechanism");
  opt->add_option("--env", env_path)->required();
  opt->add_option("--dist", dist_spec)->required();
  opt->add_option("--grid", grid_n);
  opt->add_option("--out", out_path);

  auto* fic = app.add_subcommand("fullinfo-check", "full-information optimality certificate");
  fic->add_option("--env", env_path)->required();
  fic->add_option("--dist", dist_spec)->required();
  double arg_p = -1.0, arg_eta = 0.0, arg_lambda = 0.0;
  bool have_eta = false;
  auto* popt = fic->add_option("--p", arg_p);
  auto* eopt = fic->add_option("--eta", arg_eta);
  fic->add_option("--lambda", arg_lambda);
  fic->add_option("--out", out_path);
  (void)have_eta;

  auto* lb = app.add_subcommand("lowerbound", "binary-state gap construction and gates");
  int lb_m = 4;
  std::string lb_eps = "1/10", emit_menu;
  lb->add_option("--m", lb_m);
  lb->add_option("--eps", lb_eps);
  lb->add_option("--emit-menu", emit_menu);
  lb->add_option("--out", out_path);

  auto* ms = app.add_subcommand("multistate", "three-state matching construction");
  int ms_n = 32;
  double ms_eps = 1.0 / 3.0;
  ms->add_option("--n", ms_n);
  ms->add_option("--eps", ms_eps);
  ms->add_option("--out", out_path);

  auto* msu = app.add_subcommand("multistate-uniform", "FRev curve on the uniform simplex");
  msu->add_option("--grid", simplex_g);
  std::string curve_csv;
  msu->add_option("--curve-out", curve_csv);
  msu->add_option("--out", out_path);

  auto* ver = app.add_subcommand("verify", "IC/IR verification of a mechanism");
  ver->add_option("--env", env_path)->required();
  ver->add_option("--mech", mech_path)->required();
  ver->add_option("--out", out_path);

  auto* ext = app.add_subcommand("extract", "full-information extraction from a menu");
  ext->add_option("--env", env_path)->required();
  ext->add_option("--menu", menu_path)->required();
  ext->add_option("--dist", dist_spec)->required();
  ext->add_option("--grid", grid_n);
  std::string mode = "fullinfo";
  ext->add_option("--mode", mode)->check(CLI::IsMember({"fullinfo", "buckets"}));
  ext->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  if (canon->parsed()) {
    auto [env, log] = im::canonicalize(load_env(env_path));
    emit("canon", {{"env", im::env_to_json(env)}, {"transform", im::transform_log_to_json(log)}},
         out_path);
  } else if (ircurve->parsed()) {
    im::IRCurve curve = im::ir_curve(load_env(env_path));
    std::ostringstream csv;
    csv << "piece,theta_lo,theta_hi,slope,value_lo,value_hi\n";
    const auto& xs = curve.curve.breakpoints();
    const auto& ys = curve.curve.values();
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      csv << i + 1 << ',' << im::round12(xs[i]) << ',' << im::round12(xs[i + 1]) << ','
          << im::round12(curve.piece_slopes[i]) << ',' << im::round12(ys[i]) << ','
          << im::round12(ys[i + 1]) << '\n';
    write_text(curve_out, csv.str());
    emit("ircurve",
         {{"pieces", curve.piece_slopes.size()}, {"slopes", im::num_array(curve.piece_slopes)}},
         out_path);
  } else if (frevc->parsed()) {
    im::PayoffMatrix env = load_env(env_path);
    im::TypeGrid grid;
    if (env.n == 2) {
      if (dist_spec.empty()) throw std::invalid_argument("frev: --dist required for n=2");
      grid = resolve_grid(load_dist(dist_spec), grid_n);
    } else if (env.n == 3) {
      grid = im::simplex_grid(simplex_g);
    } else {
      throw std::invalid_argument("frev: n must be 2 or 3");
    }
    im::FrevResult res = im::frev(env, grid);
    emit("frev", {{"price", im::num(res.price)}, {"revenue", im::num(res.revenue)}}, out_path);
  } else if (opt->parsed()) {
    im::PayoffMatrix env = load_env(env_path);
    im::TypeGrid grid = resolve_grid(load_dist(dist_spec), grid_n);
    auto [sol, mech] = im::solve_optmech(env, grid);
    json options = json::array();
    for (std::size_t o = 0; o < mech.options.size(); ++o) {
      double lo = 1.0, hi = 0.0;
      for (std::size_t i = 0; i < mech.grid.size(); ++i)
        if (mech.assignment[i] == static_cast<int>(o)) {
          lo = std::min(lo, mech.grid.scalar(i));
          hi = (i + 1 < mech.grid.size()) ? mech.grid.scalar(i + 1) : 1.0;
        }
      options.push_back(json{{"q", im::num(im::q_of(env, mech.options[o].experiment).q)},
                             {"price", im::num(mech.options[o].price)},
                             {"type_interval", json::array({im::num(lo), im::num(hi)})}});
    }
    emit("opt",
         {{"revenue", im::num(sol.revenue)},
          {"options", options},
          {"option_size", sol.option_size}},
         out_path);
  } else if (fic->parsed()) {
    im::PayoffMatrix env = load_env(env_path);
    im::DistSpec ds = load_dist(dist_spec);
    if (ds.is_grid) throw std::invalid_argument("fullinfo-check: continuous distribution required");
    json payload{{"p_hat", im::num(im::p_hat(env))},
                 {"premise", im::check_premise(env, ds.dist)}};
    im::VirtualPair vp = im::virtual_values(ds.dist);
    if (popt->count() > 0) {
      double eta = eopt->count() > 0 ? arg_eta : 0.0;
      if (eopt->count() == 0) {
        double tl = arg_p / env.u[0][0];
        eta = tl * ds.dist.pdf(tl) + ds.dist.cdf(tl);
      }
      im::Certificate cert = im::check_fullinfo_optimal(env, ds.dist, arg_p, eta, arg_lambda, &vp);
      payload["price"] = im::num(arg_p);
      payload["certificate"] = json{{"eta", im::num(cert.eta)},
                                    {"lambda", im::num(cert.lambda)},
                                    {"cond1", cert.cond1},
                                    {"cond2", cert.cond2},
                                    {"cond3", cert.cond3},
                                    {"cond2_slack", im::num(cert.cond2_slack)},
                                    {"ok", cert.ok}};
    } else {
      std::optional<double> p = im::solve_price(env, ds.dist);
      if (p) {
        double tl = *p / env.u[0][0];
        double eta = tl * ds.dist.pdf(tl) + ds.dist.cdf(tl);
        im::Certificate cert = im::check_fullinfo_optimal(env, ds.dist, *p, eta, 0.0, &vp);
        payload["price"] = im::num(*p);
        payload["certificate"] = json{{"eta", im::num(cert.eta)},
                                      {"lambda", 0.0},
                                      {"cond1", cert.cond1},
                                      {"cond2", cert.cond2},
                                      {"cond3", cert.cond3},
                                      {"cond2_slack", im::num(cert.cond2_slack)},
                                      {"ok", cert.ok}};
      } else {
        payload["price"] = nullptr;
      }
    }
    emit("fullinfo-check", payload, out_path);
  } else if (lb->parsed()) {
    im::Rational eps = im::Rational::parse(lb_eps);
    im::LBConstruction c = im::lb_build(lb_m, eps);
    im::LBMechanism mech = im::lb_mechanism(c);
    json payload{{"m", lb_m}, {"eps", eps.to_string()}};
    json thetas = json::array();
    for (int i = 1; i <= lb_m - 1; ++i) thetas.push_back(c.theta[i].to_string());
    json prices = json::array();
    for (int i = 1; i <= c.pieces(); ++i) prices.push_back(c.p[i].to_string());
    payload["theta"] = thetas;
    payload["prices"] = prices;
    try {
      im::LBVerify v = im::lb_verify(c, mech);
      payload["delta"] = v.delta.to_string();
      payload["delta_bound"] = v.delta_bound.to_string();
      payload["delta_bound_ok"] = true;
      payload["ir_ok"] = v.ir_exact;
    } catch (const std::runtime_error& e) {
      throw GateFailure(e.what());
    }
    im::LBRevenue rr = im::lb_revenue_and_ratio(c, mech);
    payload["frev"] = rr.frev.to_string();
    payload["rev"] = rr.rev.to_string();
    payload["surplus_over_frev"] = im::num(rr.surplus_ratio);
    im::LBMenu menu = im::lb_menu(c);
    payload["menu_revenue"] = menu.revenue.to_string();
    payload["menu_rev_over_frev"] = im::num((menu.revenue / rr.frev).to_double());
    if (!emit_menu.empty()) {
      json mj = im::menu_to_json(menu.as_float(c));
      mj["schema"] = im::kSchema;
      write_text(emit_menu, mj.dump(2) + "\n");
    }
    emit("lowerbound", payload, out_path);
  } else if (ms->parsed()) {
    auto pts = im::shell_points(ms_n);
    im::RatioInstance inst = im::build_ratio_instance(pts, ms_eps);
    im::CertifyReport rep;
    try {
      rep = im::certify(inst);
    } catch (const std::runtime_error& e) {
      throw GateFailure(e.what());
    }
    im::Mechanism mech = im::mechanism_from_instance(inst);
    double frev = inst.xi[0];
    double rev = im::revenue(mech);
    double sum_gap = 0.0;
    json points = json::array();
    for (const auto& p : pts) {
      sum_gap += p.gap;
      points.push_back(json::array({im::num(p.y1), im::num(p.y2)}));
    }
    emit("multistate",
         {{"n", ms_n},
          {"eps", im::num(ms_eps)},
          {"ratio_lb", im::num(1.5 * (1.0 - ms_eps) * sum_gap)},
          {"frev", im::num(frev)},
          {"rev", im::num(rev)},
          {"rev_over_frev", im::num(rev / frev)},
          {"ic_ok", rep.ok},
          {"points", points}},
         out_path);
  } else if (msu->parsed()) {
    im::PayoffMatrix env = im::matching_environment(3);
    im::TypeGrid grid = im::simplex_grid(simplex_g);
    im::FrevResult res = im::frev(env, grid);
    if (!curve_csv.empty()) {
      // Revenue curve p -> p * Pr[U >= p] on a uniform p-grid over [0, 1/2].
      std::vector<double> gains(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i)
        gains[i] = im::gain_of(env, grid.points[i]);
      std::ostringstream csv;
      csv << "p,revenue\n";
      int steps = 2 * simplex_g;
      for (int s = 0; s <= steps; ++s) {
        double p = 0.5 * s / steps;
        double tail = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
          if (gains[i] >= p - 1e-15) tail += grid.masses[i];
        csv << im::round12(p) << ',' << im::round12(p * tail) << '\n';
      }
      write_text(curve_csv, csv.str());
    }
    emit("multistate-uniform",
         {{"grid", simplex_g},
          {"price", im::num(res.price)},
          {"revenue", im::num(res.revenue)}},
         out_path);
  } else if (ver->parsed()) {
    im::PayoffMatrix env = load_env(env_path);
    im::Mechanism mech = im::mechanism_from_json(read_json(mech_path), env);
    im::ICReport rep = im::verify(mech, env);
    json payload = im::ic_report_to_json(rep);
    emit("verify", payload, out_path);
  } else if (ext->parsed()) {
    im::PayoffMatrix env = load_env(env_path);
    im::Menu menu = im::menu_from_json(read_json(menu_path), env);
    im::TypeGrid grid = resolve_grid(load_dist(dist_spec), grid_n);
    json payload{{"mode", mode}};
    if (mode == "fullinfo") {
      im::Mechanism mech = im::as_mechanism(menu, env, grid);
      auto [price, rev] = im::full_info_extraction(mech, env, grid);
      payload["price"] = im::num(price);
      payload["revenue"] = im::num(rev);
      payload["option_size"] = mech.option_size();
    } else {
      im::BucketExtraction b = im::price_bucket_extraction(menu, env, grid);
      payload["price"] = im::num(b.price);
      payload["revenue"] = im::num(b.revenue);
      payload["buckets"] = b.bucket_count;
    }
    emit("extract", payload, out_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const GateFailure& e) {
    std::cerr << "gate failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
