#include "maxvol/config.hpp"

#include <fstream>

#include "maxvol/errors.hpp"

namespace maxvol {

namespace {

using nlohmann::json;

RateCurve curve_from(const std::vector<double>& bounds, const std::vector<double>& values,
                     const char* what) {
  if (bounds.empty()) {
    if (values.size() != 1) throw ConfigError(std::string(what) + ": scalar curve needs one value");
    return RateCurve(values[0]);
  }
  return RateCurve(bounds, values);
}

json curve_to_json(const std::vector<double>& bounds, const std::vector<double>& values) {
  if (bounds.empty()) return values.at(0);
  return json{{"bounds", bounds}, {"values", values}};
}

void curve_from_json(const json& j, std::vector<double>& bounds, std::vector<double>& values,
                     const char* what) {
  if (j.is_number()) {
    bounds.clear();
    values = {j.get<double>()};
    return;
  }
  if (!j.is_object() || !j.contains("bounds") || !j.contains("values"))
    throw ConfigError(std::string(what) + ": expected a number or {bounds, values}");
  bounds = j.at("bounds").get<std::vector<double>>();
  values = j.at("values").get<std::vector<double>>();
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::unique_ptr<VolSurface> SurfaceSpec::build(double spot) const {
  if (kind == "constant") return std::make_unique<ConstantVol>(constant_vol);
  if (kind == "svi-average")
    return std::make_unique<SviAverageVol>(svi, spot, bump, closed_form_derivative);
  throw ConfigError("surface.kind must be \"svi-average\" or \"constant\"");
}

MarketParams RunConfig::market() const {
  return MarketParams(spot, curve_from(rate_bounds, rate_values, "market.rate"),
                      curve_from(dividend_bounds, dividend_values, "market.dividend_yield"));
}

nlohmann::json RunConfig::to_json() const {
  json j;
  j["market"] = {{"spot", spot},
                 {"rate", curve_to_json(rate_bounds, rate_values)},
                 {"dividend_yield", curve_to_json(dividend_bounds, dividend_values)}};
  j["surface"] = {{"kind", surface.kind},
                  {"svi",
                   {{"a", surface.svi.a},
                    {"b", surface.svi.b},
                    {"rho", surface.svi.rho},
                    {"m", surface.svi.m},
                    {"sigma", surface.svi.sigma}}},
                  {"constant_vol", surface.constant_vol},
                  {"bump", surface.bump},
                  {"closed_form_derivative", surface.closed_form_derivative}};
  j["grid"] = {{"target_dk", grid.target_dk}, {"target_dt", grid.target_dt},
               {"b_max", grid.b_max},         {"t_max", grid.t_max},
               {"theta", grid.theta},         {"rannacher", grid.rannacher},
               {"correction", grid.correction}, {"store_every", grid.store_every}};
  j["experiment"] = experiment;
  j["output"] = {{"directory", out_dir}};
  j["seed"] = seed;
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  if (j.contains("market")) {
    const json& m = j.at("market");
    read_if(m, "spot", c.spot);
    if (m.contains("rate")) curve_from_json(m.at("rate"), c.rate_bounds, c.rate_values, "rate");
    if (m.contains("dividend_yield"))
      curve_from_json(m.at("dividend_yield"), c.dividend_bounds, c.dividend_values,
                      "dividend_yield");
  }
  if (j.contains("surface")) {
    const json& s = j.at("surface");
    read_if(s, "kind", c.surface.kind);
    if (s.contains("svi")) {
      const json& p = s.at("svi");
      read_if(p, "a", c.surface.svi.a);
      read_if(p, "b", c.surface.svi.b);
      read_if(p, "rho", c.surface.svi.rho);
      read_if(p, "m", c.surface.svi.m);
      read_if(p, "sigma", c.surface.svi.sigma);
    }
    read_if(s, "constant_vol", c.surface.constant_vol);
    read_if(s, "bump", c.surface.bump);
    read_if(s, "closed_form_derivative", c.surface.closed_form_derivative);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    read_if(g, "target_dk", c.grid.target_dk);
    read_if(g, "target_dt", c.grid.target_dt);
    read_if(g, "b_max", c.grid.b_max);
    read_if(g, "t_max", c.grid.t_max);
    read_if(g, "theta", c.grid.theta);
    read_if(g, "rannacher", c.grid.rannacher);
    read_if(g, "correction", c.grid.correction);
    read_if(g, "store_every", c.grid.store_every);
  }
  if (j.contains("experiment")) c.experiment = j.at("experiment");
  if (j.contains("output")) read_if(j.at("output"), "directory", c.out_dir);
  read_if(j, "seed", c.seed);

  // fail fast on anything structurally wrong
  c.market();
  c.surface.build(c.spot);
  if (c.grid.correction != "explicit" && c.grid.correction != "taylor")
    throw ConfigError("grid.correction must be \"explicit\" or \"taylor\"");
  if (c.grid.theta < 0.0 || c.grid.theta > 1.0) throw ConfigError("grid.theta must be in [0, 1]");
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return from_json(j);
}

void RunConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << to_json().dump(2) << "\n";
}

}  // namespace maxvol
