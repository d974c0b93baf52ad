#include "maxvol/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace maxvol {

namespace {

bool divides_exactly(double step, double length) {
  double ratio = length / step;
  return std::abs(ratio - std::round(ratio)) < 1e-9 && std::round(ratio) >= 1.0;
}

}  // namespace

ForwardGrid build_forward_grid(double spot, double b_max, double t_max, double target_dk,
                               double target_dt) {
  if (!(spot > 0.0) || !(b_max > spot)) throw ConfigError("forward grid: need b_max > spot > 0");
  if (!(target_dk > 0.0) || !(target_dt > 0.0))
    throw ConfigError("forward grid: steps must be > 0");
  if (!(t_max > 0.0)) throw ConfigError("forward grid: t_max must be > 0");

  // Largest tick m*10^e <= target_dk dividing both spot and b_max - spot.
  static const double ticks[] = {5.0, 2.5, 2.0, 1.0};
  double dk = 0.0;
  double e = std::pow(10.0, std::floor(std::log10(target_dk)) + 1.0);
  for (int scale = 0; scale < 4 && dk == 0.0; ++scale, e /= 10.0) {
    for (double tick : ticks) {
      double cand = tick * e;
      if (cand > target_dk * (1.0 + 1e-12) || cand <= target_dk / 10.0) continue;
      if (divides_exactly(cand, spot) && divides_exactly(cand, b_max - spot)) {
        dk = cand;
        break;
      }
    }
  }
  if (dk == 0.0)
    throw ConfigError("forward grid: no admissible dk in (target/10, target] divides spot and b_max - spot");

  ForwardGrid g;
  g.spot_index = static_cast<int>(std::round(spot / dk));
  g.p = static_cast<int>(std::round((b_max - spot) / dk));
  g.dk = spot / g.spot_index;  // pin the step so spot lands exactly on a node
  g.n = g.spot_index + g.p;
  g.m = std::max(1, static_cast<int>(std::ceil(t_max / target_dt - 1e-9)));
  g.dt = t_max / g.m;
  g.t_max = t_max;
  if (g.layer_size(0) < 5) throw GridError("forward grid: fewer than 5 strike nodes per layer");
  return g;
}

std::vector<double> build_backward_ygrid(double spot, double barrier, double dy) {
  if (!(barrier > spot)) throw ConfigError("backward grid: need barrier > spot");
  if (!(dy > 0.0)) throw ConfigError("backward grid: dy must be > 0");

  const double lambda = 2.0;
  int n_y = static_cast<int>(std::ceil((barrier - spot) / dy));
  double g = (barrier - spot) / std::expm1(lambda);

  std::vector<double> y(n_y + 2);
  y[0] = spot;  // z = 0 identity, imposed exactly
  for (int i = 1; i <= n_y; ++i) {
    double z = static_cast<double>(i) / (n_y + 1);
    y[i] = (spot - g) + g * std::exp(lambda * z);
  }
  y[n_y + 1] = barrier;  // z = 1 identity, imposed exactly
  for (int i = 0; i <= n_y; ++i)
    if (!(y[i + 1] > y[i])) throw GridError("backward grid: y levels not strictly increasing");
  return y;
}

std::vector<double> build_layer_xgrid(double y_i, double y_im1, double y_im2, double dy) {
  if (!(y_im2 < y_im1) || !(y_im1 < y_i))
    throw GridError("layer grid: need y_{i-2} < y_{i-1} < y_i");
  if (!(dy > 0.0)) throw ConfigError("layer grid: dy must be > 0");

  int n_x = static_cast<int>(std::ceil(y_i / dy));
  if (n_x < 4) throw GridError("layer grid: fewer than 4 spot intervals");
  double dx = y_im2 / (n_x - 2);

  std::vector<double> x(n_x + 1);
  for (int j = 0; j <= n_x - 3; ++j) x[j] = j * dx;
  x[n_x - 2] = y_im2;
  x[n_x - 1] = y_im1;
  x[n_x] = y_i;
  return x;
}

}  // namespace maxvol
