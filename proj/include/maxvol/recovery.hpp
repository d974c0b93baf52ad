#pragma once

#include <Eigen/Dense>
#include <vector>

#include "maxvol/price_cube.hpp"
#include "maxvol/surface.hpp"

namespace maxvol {

/// The five cube partials entering the mimicking-volatility formula,
/// evaluated at one interior (slice, layer, strike) node.
struct CubeDerivs {
  double cbt = 0.0;     // d2 C~ / dB dT
  double c0t = 0.0;     // d  C~(0,B,T) / dT
  double c0tb = 0.0;    // d2 C~(0,B,T) / dT dB
  double ckb = 0.0;     // d2 C~ / dK dB
  double ckkb = 0.0;    // d3 C~ / dK^2 dB
  bool complete = false;
};

/// Central second-order differences on the stored cube; one-sided backward in
/// T on the final slice. Nodes without two neighbours in a direction come
/// back with complete = false.
CubeDerivs cube_derivatives(const PriceCube& cube, int s, int j, int i);

/// Volatility recovered from a price cube node by node, with a validity mask.
class RecoveredSurface {
 public:
  RecoveredSurface(const PriceCube* cube, double tau_den)
      : cube_(cube), tau_den_(tau_den),
        sigma_(cube->slices(), std::vector<Eigen::ArrayXd>(cube->grid().p + 1)),
        mask_(cube->slices(), std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>>(cube->grid().p + 1)) {}

  const PriceCube& cube() const { return *cube_; }
  double tau_den() const { return tau_den_; }

  double sigma(int s, int j, int i) const { return sigma_[s][j][i]; }
  bool valid(int s, int j, int i) const { return mask_[s][j][i]; }

  long valid_count = 0;
  long negative_variance_count = 0;
  long small_denominator_count = 0;

 private:
  friend RecoveredSurface recover_sigma(const PriceCube&, double);
  const PriceCube* cube_;
  double tau_den_;
  std::vector<std::vector<Eigen::ArrayXd>> sigma_;
  std::vector<std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>>> mask_;
};

/// Dupire-type recovery of sigma(K, B, T) from the capitalized cube:
///   sigma^2 = [C~_BT - (K/B^2) C~(0)_T - ((B-K)/B) C~(0)_TB + mu K C~_KB]
///             / (K^2 C~_KKB / 2),
/// masked where the denominator falls below tau_den, the variance comes out
/// nonpositive, a stencil is incomplete, or T is one of the first two slices.
/// tau_den < 0 selects the default 1e-7 / spot.
RecoveredSurface recover_sigma(const PriceCube& cube, double tau_den = -1.0);

struct FntCheck {
  double residual = 0.0;  // dC~(0,B,T)/dT + sigma^2(B,B,T) B^3 C~_KKB|_{K=B} / 2
  double fnt = 0.0;       // C~(0,B,T)/Q(T)
};

/// d^3C~/dK^2dB at K = B via the cube's own one-sided stencil (the relation
/// d3/dK3 = -d3/dK2dB on the boundary).
double cube_kkb_at_diagonal(const PriceCube& cube, int s, int j);

/// Residual of the zero-strike forward equation at (B_j, T_s); kkb_at_diag
/// comes either from cube_kkb_at_diagonal or from a density solve.
FntCheck fnt_residual(const PriceCube& cube, const VolSurface& surface, int s, int j,
                      double kkb_at_diag);

}  // namespace maxvol
