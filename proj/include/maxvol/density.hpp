#pragma once

#include <string>
#include <vector>

#include "maxvol/market.hpp"
#include "maxvol/surface.hpp"

namespace maxvol {

struct KfeConfig {
  double dx = 0.25;    // node spacing; must divide spot and b_max - spot
  double b_max = 300.0;
  int steps = 500;
  double theta = 1.0;      // implicit Euler by default
  bool rannacher = false;  // two implicit half-steps first (only for theta = 1/2)
  double mollifier_width = 4.0;  // initial bump half-width, in units of dx
  bool warm_start = false;       // start from the frozen-coefficient closed-form density
  double warm_start_time = 0.01;
  std::vector<double> store_times;  // extra slices to retain; t_end always kept
};

struct KfeReport {
  double initial_mass = 0.0;
  double final_mass = 0.0;
  double min_mass = 0.0;
  long clip_events = 0;     // stored-slice nodes below -1e-8
  long clipped_nodes = 0;   // stored-slice nodes clipped to zero
  bool mass_warning = false;
  std::string message;
};

/// Joint density phi(x, y, t) of the spot and its running maximum on the
/// triangle {0 < x <= y, spot <= y <= b_max}, advanced by the Kolmogorov
/// forward equation with the diagonal flux condition
///   d_x(sigma^2 x^2 phi) + d_y(sigma^2 x^2 phi)/2 = mu x phi   at x = y.
/// Rows are y levels; row j holds nodes x_i = i dx, i = 0..spot/dx + j.
class DensitySolution {
 public:
  double dx() const { return dx_; }
  double spot() const { return market_.spot; }
  double b_max() const { return y_level(rows_ - 1); }
  int rows() const { return rows_; }
  double y_level(int j) const { return (g0_ + j) * dx_; }
  int row_nodes(int j) const { return g0_ + j + 1; }

  int slices() const { return static_cast<int>(slice_times_.size()); }
  double slice_time(int s) const { return slice_times_[s]; }

  /// Stored (clipped) density value at slice s, row j, node i.
  double value(int s, int j, int i) const { return slices_[s][offset_[j] + i]; }

  /// Triangle trapezoid mass of a stored slice.
  double mass(int s) const;

  /// Mass at every time step (pre-clip), for monotonicity checks.
  const std::vector<double>& mass_series() const { return mass_series_; }
  const std::vector<double>& step_times() const { return step_times_; }

  /// Marginal density of the spot: integral of the slice over y.
  double marginal_x(int s, int i) const;

  /// One-sided quadratic limit of phi toward the diagonal of row j.
  double diagonal_limit(int s, int j) const;

  /// d^3 C~/dK^2 dB at K = B = barrier: D(t) Q(t) phi(B, B^-, t), linearly
  /// interpolated in t over the per-step diagonal record.
  double boundary_kkb(double barrier, double t) const;

  /// Discounted price D(T) integral of (x - K)^+ 1_{y < B} phi(.,.,T).
  /// T is matched to a stored slice; otherwise the two nearest slices are
  /// blended and *warned is set.
  double price(double strike, double barrier, double t, bool* warned = nullptr) const;

  const KfeReport& report() const { return report_; }
  const MarketParams& market() const { return market_; }

 private:
  friend DensitySolution solve_kfe(const VolSurface&, const MarketParams&, const KfeConfig&,
                                   double);
  DensitySolution(MarketParams market) : market_(std::move(market)) {}

  double row_payoff_integral(const std::vector<double>& slice, int j, double strike) const;

  MarketParams market_;
  double dx_ = 0.0;
  int g0_ = 0, rows_ = 0;
  std::vector<std::size_t> offset_;
  std::vector<double> slice_times_;
  std::vector<std::vector<double>> slices_;
  std::vector<double> step_times_, mass_series_;
  std::vector<double> diag_kkb_;  // extrapolated diagonal, [step * rows + j]
  KfeReport report_;
};

DensitySolution solve_kfe(const VolSurface& surface, const MarketParams& market,
                          const KfeConfig& cfg, double t_end);

/// Spec-facing aliases.
inline double price_from_density(const DensitySolution& d, double strike, double barrier,
                                 double t, bool* warned = nullptr) {
  return d.price(strike, barrier, t, warned);
}
inline double boundary_third_derivative(const DensitySolution& d, double barrier, double t) {
  return d.boundary_kkb(barrier, t);
}

}  // namespace maxvol
