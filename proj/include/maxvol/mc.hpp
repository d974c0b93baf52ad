#pragma once

#include <cstdint>
#include <vector>

#include "maxvol/backward_pde.hpp"
#include "maxvol/market.hpp"
#include "maxvol/surface.hpp"

namespace maxvol {

enum class BarrierCrossing { discrete_max, brownian_bridge };

struct McConfig {
  std::int64_t paths = 100000;
  int steps_per_year = 512;
  std::uint64_t seed = 42;
  bool antithetic = false;
  BarrierCrossing crossing = BarrierCrossing::brownian_bridge;
  int threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (paths < 1) throw ConfigError("McConfig: paths must be >= 1");
    if (steps_per_year < 1) throw ConfigError("McConfig: steps_per_year must be >= 1");
  }
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t paths = 0;
};

/// Log-Euler simulation of the mimicking diffusion with the running maximum
/// tracked per step; in bridge mode the in-step maximum is sampled from the
/// Brownian-bridge law with the step-local volatility. Identical config and
/// seed give bitwise-identical results, independent of the thread count
/// (counter-based per-path substreams, fixed-order block reduction).
McEstimate simulate_price(const BackwardDeal& deal, const VolSurface& surface,
                          const MarketParams& market, const McConfig& cfg);

struct JointSample {
  std::vector<double> spot;  // S_T per path
  std::vector<double> maxi;  // M_T per path
};

/// Terminal joint sample of (S_T, M_T) for density comparisons.
JointSample simulate_joint_sample(const VolSurface& surface, const MarketParams& market,
                                  const McConfig& cfg, double t_end);

}  // namespace maxvol
