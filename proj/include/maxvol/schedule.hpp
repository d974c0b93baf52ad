#pragma once

#include <vector>

#include "maxvol/errors.hpp"

namespace maxvol {

/// Time-stepping schedule shared by the layer solvers: uniform theta steps,
/// optionally with the first step replaced by two implicit-Euler half-steps
/// (Rannacher start-up, applied only for theta = 1/2).
struct StepSchedule {
  std::vector<double> times;   // ascending, times.front() == 0
  std::vector<double> thetas;  // one per step
  bool rannacher = false;

  int steps() const { return static_cast<int>(thetas.size()); }

  /// Schedule-point index of uniform step m (half-points shift by one).
  int point_of_step(int m) const { return rannacher && m > 0 ? m + 1 : m; }

  static StepSchedule uniform(double t_end, int m, double theta, bool rannacher) {
    if (m < 1) throw ConfigError("StepSchedule: need at least one step");
    if (theta < 0.0 || theta > 1.0) throw ConfigError("StepSchedule: theta must be in [0, 1]");
    StepSchedule s;
    double dt = t_end / m;
    s.rannacher = rannacher && theta == 0.5;
    s.times.push_back(0.0);
    if (s.rannacher) {
      s.times.push_back(0.5 * dt);
      s.thetas.push_back(1.0);
      s.times.push_back(dt);
      s.thetas.push_back(1.0);
    } else {
      s.times.push_back(dt);
      s.thetas.push_back(theta);
    }
    for (int k = 2; k <= m; ++k) {
      s.times.push_back(k * dt);
      s.thetas.push_back(theta);
    }
    return s;
  }
};

}  // namespace maxvol
