#pragma once

#include <cmath>
#include <vector>

#include "maxvol/errors.hpp"

namespace maxvol {

/// Aligned (K, B, T) lattice for the forward solver. Strikes span [0, b_max]
/// with step dk, barrier levels span [spot, b_max] with the same step, so
/// every barrier coincides with a strike node. Nodes are always integer index
/// times exact step, never accumulated.
struct ForwardGrid {
  double dk = 0.0;   // strike and barrier step (dk == db)
  double dt = 0.0;   // time step
  int n = 0;         // strike nodes are K_i = i*dk, i in [0, n]
  int p = 0;         // barrier layers are B_j, j in [0, p]
  int m = 0;         // time nodes are T_m, m in [0, m]
  int spot_index = 0;  // spot = strike(spot_index)
  double t_max = 0.0;

  double strike(int i) const { return i * dk; }
  double barrier(int j) const { return strike(spot_index + j); }
  double time(int k) const { return k * dt; }
  double spot() const { return strike(spot_index); }
  double b_max() const { return strike(n); }

  /// Global strike index of the layer-j barrier (its Dirichlet node).
  int top_index(int j) const { return spot_index + j; }
  /// Number of strike nodes in layer j: B_j/dk + 1.
  int layer_size(int j) const { return top_index(j) + 1; }
};

/// Picks dk as the largest tick-size value <= target_dk such that both
/// spot/dk and (b_max - spot)/dk are integers, then derives the node counts.
/// Ticks are scanned over {1, 2, 2.5, 5} x 10^e; no admissible tick above
/// target_dk/10 is a configuration error. dt = t_max / ceil(t_max/target_dt).
ForwardGrid build_forward_grid(double spot, double b_max, double t_max, double target_dk,
                               double target_dt);

/// Exponentially graded running-maximum levels for the backward solver:
///   y_i = (spot - g) + g*exp(lambda*z_i),  z_i = i/(n_y+1),  lambda = 2,
///   g = (barrier - spot)/(e^lambda - 1),   i in [0, n_y],
/// with n_y = ceil((barrier - spot)/dy) and the level y = barrier appended on
/// top (the z = 1 endpoint, an algebraic identity of the grading map).
std::vector<double> build_backward_ygrid(double spot, double barrier, double dy);

/// Spot grid for the backward PDE layer at level y_i: uniform with step
/// dx = y_{i-2}/(n_x - 2) up to y_{i-2}, then the three topmost nodes pinned
/// to (y_{i-2}, y_{i-1}, y_i) so lower layers can read boundary values
/// without interpolation. n_x = ceil(y_i/dy).
std::vector<double> build_layer_xgrid(double y_i, double y_im1, double y_im2, double dy);

}  // namespace maxvol
