#pragma once

#include <Eigen/Dense>
#include <vector>

#include "maxvol/market.hpp"
#include "maxvol/mesh.hpp"
#include "maxvol/schedule.hpp"
#include "maxvol/surface.hpp"

namespace maxvol {

struct BackwardDeal {
  double strike = 0.0;
  double barrier = 0.0;
  double maturity = 0.0;

  void validate() const {
    if (strike < 0.0) throw ConfigError("BackwardDeal: strike must be >= 0");
    if (!(maturity > 0.0)) throw ConfigError("BackwardDeal: maturity must be > 0");
    if (!(barrier > 0.0)) throw ConfigError("BackwardDeal: barrier must be > 0");
  }
};

struct BackwardSolverConfig {
  double dy = 0.02;  // target mesh width for the y levels and per-layer spot grids
  int steps = 1000;  // time steps per layer
  double theta = 0.5;
  bool rannacher = true;
};

/// Dirichlet value at x = y_i from the running-maximum Neumann condition:
/// second-order Taylor bootstrap through the values of the two layers above,
/// read at spot x = y_i. The topmost interior layers use first order instead
/// (the caller passes the value from the layer immediately above).
inline double layer_boundary_value(double c_up1, double c_up2, double y_i, double y_ip1,
                                   double y_ip2) {
  double a = (y_ip2 - y_i) * (y_ip2 - y_i);
  double b = (y_ip1 - y_i) * (y_ip1 - y_i);
  if (a == b) throw GridError("layer_boundary_value: degenerate level spacing");
  return c_up2 + a / (a - b) * (c_up1 - c_up2);
}

/// One Black-Scholes-type PDE layer at maximum level y: spot grid x (strictly
/// increasing, x.front() == 0, x.back() == y), terminal payoff (x - K)^+,
/// v = 0 at x = 0 and the given Dirichlet series at x = y. The schedule runs
/// in time-to-maturity; boundary.size() == sched.steps() + 1. Returns the
/// field over all schedule points (row p = values at sched.times[p] before
/// maturity).
Eigen::ArrayXXd solve_layer(const std::vector<double>& x, double y, double strike,
                            double maturity, const VolSurface& surface,
                            const MarketParams& market, const StepSchedule& sched,
                            const Eigen::ArrayXd& boundary);

struct BackwardResult {
  double price = 0.0;
  bool knocked_out = false;
};

/// Prices one deal with the augmented-state backward PDE, layering in the
/// running maximum from the barrier down to the spot. The premium is read at
/// (spot, spot, 0).
BackwardResult price_backward(const BackwardDeal& deal, const VolSurface& surface,
                              const MarketParams& market,
                              const BackwardSolverConfig& cfg = {});

/// Same bootstrap solved once for a whole strike ladder at fixed (B, T); the
/// layer systems are strike-independent, so all strikes share factorizations.
Eigen::ArrayXd price_backward_ladder(const std::vector<double>& strikes, double barrier,
                                     double maturity, const VolSurface& surface,
                                     const MarketParams& market,
                                     const BackwardSolverConfig& cfg = {});

}  // namespace maxvol
