#pragma once

// JSON (de)serialization for the exchange formats. All emitted documents
// carry "schema": "infomech/1"; floats are rounded to 12 significant digits
// so identical inputs give byte-identical outputs.

#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "infomech/dist.hpp"
#include "infomech/env.hpp"
#include "infomech/experiment.hpp"
#include "infomech/mech.hpp"
#include "infomech/pwl.hpp"

namespace infomech {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "infomech/1";

inline double round12(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline json num(double v) { return json(round12(v)); }

inline json num_array(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

inline json matrix_json(const std::vector<std::vector<double>>& m) {
  json a = json::array();
  for (const auto& row : m) a.push_back(num_array(row));
  return a;
}

// ---- piecewise linear -----------------------------------------------------

inline json pwl_to_json(const PiecewiseLinear& f) {
  return json{{"x", num_array(f.breakpoints())}, {"y", num_array(f.values())}};
}

inline PiecewiseLinear pwl_from_json(const json& j) {
  if (!j.contains("x") || !j.contains("y"))
    throw std::invalid_argument("pwl: expected fields x and y");
  return PiecewiseLinear(j.at("x").get<std::vector<double>>(),
                         j.at("y").get<std::vector<double>>());
}

// ---- environment ----------------------------------------------------------

inline json env_to_json(const PayoffMatrix& env) {
  return json{{"n", env.n}, {"m", env.m}, {"u", matrix_json(env.u)}};
}

inline PayoffMatrix env_from_json(const json& j) {
  if (j.contains("matching")) return matching_environment(j.at("matching").get<int>());
  PayoffMatrix env;
  env.u = j.at("u").get<std::vector<std::vector<double>>>();
  env.n = j.contains("n") ? j.at("n").get<int>() : static_cast<int>(env.u.size());
  env.m = j.contains("m") ? j.at("m").get<int>()
                          : (env.u.empty() ? 0 : static_cast<int>(env.u[0].size()));
  if (static_cast<int>(env.u.size()) != env.n)
    throw std::invalid_argument("env: row count mismatch at /u");
  for (const auto& row : env.u)
    if (static_cast<int>(row.size()) != env.m)
      throw std::invalid_argument("env: column count mismatch at /u");
  return env;
}

inline json transform_log_to_json(const TransformLog& log) {
  json perm = json::array();
  for (int p : log.permutation) perm.push_back(p);
  return json{{"shift1", num(log.shift1)},
              {"shift2", num(log.shift2)},
              {"scale", num(log.scale)},
              {"permutation", perm},
              {"swapped", log.swapped}};
}

// ---- distributions --------------------------------------------------------

struct DistSpec {
  bool is_grid = false;
  TypeGrid grid;
  ContinuousDist dist;
};

inline DistSpec dist_from_json(const json& j) {
  DistSpec out;
  if (j.contains("grid")) {
    out.is_grid = true;
    const json& g = j.at("grid");
    out.grid = TypeGrid::binary(g.at("theta").get<std::vector<double>>(),
                                g.at("mass").get<std::vector<double>>());
    return out;
  }
  std::string family = j.at("family").get<std::string>();
  if (family == "uniform") {
    out.dist = uniform_dist();
  } else if (family == "exp") {
    out.dist = exponential_trunc(j.at("lambda").get<double>());
  } else if (family == "normal") {
    out.dist = normal_trunc(j.at("sigma2").get<double>());
  } else if (family == "er") {
    out.dist = er_dist(pwl_from_json(j.at("h")));
  } else {
    throw std::invalid_argument("dist: unknown family at /family");
  }
  return out;
}

inline json grid_to_json(const TypeGrid& grid) {
  if (grid.n != 2) throw std::invalid_argument("grid_to_json: binary grids only");
  std::vector<double> theta;
  theta.reserve(grid.size());
  for (const auto& p : grid.points) theta.push_back(p[0]);
  return json{{"theta", num_array(theta)}, {"mass", num_array(grid.masses)}};
}

// ---- experiments, menus, mechanisms ----------------------------------------

inline json experiment_to_json(const Experiment& e) { return json{{"pi", matrix_json(e.pi)}}; }

inline Experiment experiment_from_json(const json& j, const PayoffMatrix& env) {
  if (j.contains("q")) return experiment_of(env, j.at("q").get<double>());
  Experiment e;
  e.pi = j.at("pi").get<std::vector<std::vector<double>>>();
  e.n = static_cast<int>(e.pi.size());
  e.m = e.pi.empty() ? 0 : static_cast<int>(e.pi[0].size());
  e.validate();
  return e;
}

inline json menu_to_json(const Menu& menu) {
  json opts = json::array();
  for (const auto& o : menu.options)
    opts.push_back(json{{"experiment", experiment_to_json(o.experiment)}, {"price", num(o.price)}});
  return json{{"options", opts}};
}

inline Menu menu_from_json(const json& j, const PayoffMatrix& env) {
  Menu menu;
  for (const auto& o : j.at("options"))
    menu.options.push_back(
        {experiment_from_json(o.at("experiment"), env), o.at("price").get<double>()});
  return menu;
}

inline json mechanism_to_json(const Mechanism& mech) {
  json opts = json::array();
  for (const auto& o : mech.options)
    opts.push_back(json{{"experiment", experiment_to_json(o.experiment)}, {"price", num(o.price)}});
  json assign = json::array();
  for (int a : mech.assignment) assign.push_back(a);
  return json{{"grid", grid_to_json(mech.grid)}, {"options", opts}, {"assignment", assign}};
}

inline Mechanism mechanism_from_json(const json& j, const PayoffMatrix& env) {
  Mechanism mech;
  const json& g = j.at("grid");
  mech.grid = TypeGrid::binary(g.at("theta").get<std::vector<double>>(),
                               g.at("mass").get<std::vector<double>>());
  for (const auto& o : j.at("options"))
    mech.options.push_back(
        {experiment_from_json(o.at("experiment"), env), o.at("price").get<double>()});
  mech.assignment = j.at("assignment").get<std::vector<int>>();
  mech.validate();
  return mech;
}

inline json ic_report_to_json(const ICReport& rep) {
  return json{{"ic_violation", num(rep.ic_violation)},
              {"responsive_ic_violation", num(rep.responsive_ic_violation)},
              {"ir_violation", num(rep.ir_violation)},
              {"ic_witness", json::array({rep.ic_witness_from, rep.ic_witness_to})},
              {"ir_witness", rep.ir_witness}};
}

}  // namespace infomech
