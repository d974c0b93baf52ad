#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "maxvol/market.hpp"
#include "maxvol/mesh.hpp"

namespace maxvol {

/// Capitalized up-and-out call prices C~(K, B, T) on the forward grid,
/// layer-structured in B (layer j holds strikes 0..B_j/dk) and retained at a
/// subset of the time nodes. Values for K >= B_j read as 0 (knocked out
/// before being in the money). Immutable once the solver has filled it.
class PriceCube {
 public:
  PriceCube(ForwardGrid grid, MarketParams market, std::vector<int> stored_steps);

  const ForwardGrid& grid() const { return grid_; }
  const MarketParams& market() const { return market_; }

  int slices() const { return static_cast<int>(steps_.size()); }
  int slice_step(int s) const { return steps_[s]; }
  double slice_time(int s) const { return grid_.time(steps_[s]); }
  /// Index of the stored slice at time step m, or -1.
  int slice_of_step(int m) const;

  /// Capitalized price at slice s, layer j, strike index i (0 for i > top).
  double value(int s, int j, int i) const {
    const Eigen::ArrayXd& l = data_[s][j];
    return i < l.size() ? l[i] : 0.0;
  }
  /// Discounted market price C = C~ / Q(T).
  double discounted(int s, int j, int i) const {
    return value(s, j, i) / market_.capitalization(slice_time(s));
  }

  Eigen::ArrayXd& layer(int s, int j) { return data_[s][j]; }
  const Eigen::ArrayXd& layer(int s, int j) const { return data_[s][j]; }
  bool layer_ready(int s, int j) const { return data_[s][j].size() > 0; }

  /// Discounted price by trilinear interpolation of C~, exact at nodes.
  double lookup(double strike, double barrier, double t) const;

  /// CSV with columns K,B,T,capitalized,price across all stored slices.
  void write_csv(std::ostream& out) const;

  void write_binary(const std::string& path) const;
  static PriceCube read_binary(const std::string& path);

 private:
  ForwardGrid grid_;
  MarketParams market_;
  std::vector<int> steps_;
  std::vector<std::vector<Eigen::ArrayXd>> data_;  // [slice][layer]
};

}  // namespace maxvol
