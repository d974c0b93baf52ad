#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <json.hpp>

#include "maxvol/market.hpp"
#include "maxvol/surface.hpp"

namespace maxvol {

/// Surface block of a run configuration.
struct SurfaceSpec {
  std::string kind = "svi-average";  // "svi-average" | "constant"
  SviParams svi{0.04, 0.2, 0.0, 0.0, 0.2};
  double constant_vol = 0.25;
  double bump = 1e-4;
  bool closed_form_derivative = false;

  std::unique_ptr<VolSurface> build(double spot) const;
};

/// Grid block (forward solver defaults; the other solvers read their own
/// experiment keys).
struct GridSpec {
  double target_dk = 0.02;
  double target_dt = 1e-3;
  double b_max = 120.0;
  double t_max = 1.0;
  double theta = 0.5;
  bool rannacher = true;
  std::string correction = "explicit";  // "explicit" | "taylor"
  int store_every = 0;
};

/// One config file drives every subcommand; experiment carries the
/// command-specific block verbatim.
struct RunConfig {
  double spot = 100.0;
  std::vector<double> rate_bounds, dividend_bounds;  // empty: scalar curve
  std::vector<double> rate_values{0.1};
  std::vector<double> dividend_values{0.05};
  SurfaceSpec surface;
  GridSpec grid;
  nlohmann::json experiment = nlohmann::json::object();
  std::string out_dir = "out";
  std::uint64_t seed = 42;

  MarketParams market() const;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
  void save(const std::string& path) const;
};

}  // namespace maxvol
