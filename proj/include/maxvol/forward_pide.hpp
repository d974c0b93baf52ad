#pragma once

#include <Eigen/Dense>
#include <functional>

#include "maxvol/banded.hpp"
#include "maxvol/market.hpp"
#include "maxvol/mesh.hpp"
#include "maxvol/price_cube.hpp"
#include "maxvol/surface.hpp"

namespace maxvol {

/// How the quadrature endpoint correction enters the diffusion coefficient:
/// either explicitly as sigma^2 - (d sigma^2/dB) dB/2, or through the Taylor
/// shifted evaluation sigma^2(K, B - dB/2, T).
enum class DiffusionCorrection { explicit_term, taylor_shift };

/// Source of the boundary derivative term at K = B: the one-sided 4-point
/// stencil applied to the layer itself, or a precomputed value of the joint
/// density on the diagonal (second-order alternative).
enum class BoundaryTerm { phi_stencil, density };

/// Third-derivative stencil at K = B. four_point is the plain one-sided
/// difference; boundary_cubic additionally uses the exact knock-out data
/// C~ = C~_K = C~_KK = 0 at K = B, which collapses the stencil to
/// -6 u_{n-2}/dk^3 and carries a six-fold smaller first-order constant.
enum class BoundaryStencil { four_point, boundary_cubic };

struct ForwardSolverConfig {
  double theta = 0.5;
  bool rannacher = true;  // two implicit-Euler half-steps before Crank-Nicolson
  DiffusionCorrection correction = DiffusionCorrection::explicit_term;
  BoundaryTerm boundary = BoundaryTerm::phi_stencil;
  BoundaryStencil stencil = BoundaryStencil::boundary_cubic;
  /// d^3C~/dK^2dB at K = B = barrier for BoundaryTerm::density, as a function
  /// of (barrier, t); typically DensitySolution::boundary_kkb.
  std::function<double(double, double)> boundary_kkb;
  /// Retain every k-th time slice (plus 0 and the final one); 0 keeps only
  /// the first and final slices.
  int store_every = 0;
};

/// Diagonal coefficients of the layer operator L = A D + B D2 + C Phi at one
/// (barrier layer, time): conv = mu(T) K_i, diff carries the corrected
/// diffusion -(sigma_eff^2 K_i^2)/2, bnd the boundary-derivative weights
/// -(sigma^2(B,B,T) B^2 (B - K_i)^+)/2.
struct LayerSystem {
  int n = 0;
  double dk = 0.0;
  BoundaryStencil stencil = BoundaryStencil::four_point;
  Eigen::ArrayXd conv, diff, bnd;

  /// L in banded-plus-tail form (zero coefficients are skipped, which keeps
  /// the K = 0 and K = B edge rows inside the sparsity pattern).
  TailBandMatrix matrix() const;
  /// Dense L via the reference operators; oracle for matrix().
  Eigen::MatrixXd dense() const;
};

LayerSystem build_layer_system(const ForwardGrid& grid, int j, double t,
                               const VolSurface& surface, const MarketParams& market,
                               DiffusionCorrection correction = DiffusionCorrection::explicit_term,
                               bool include_boundary_term = true,
                               BoundaryStencil stencil = BoundaryStencil::four_point);

/// Quadrature source for layer j at stored slice s of a partially solved
/// cube: f_i = -sum_{n<j} K_i^2/2 * dKK C~(K_i,B_n,T) * dsigma^2/dB * dB.
/// Layers 1..j-1 must already be written at that slice.
Eigen::VectorXd source_vector(const PriceCube& cube, int j, int s, const VolSurface& surface);

/// One theta-step: solves (I + th dt L1) u1 = (I - (1-th) dt L0) u0
///                        + th dt f1 + (1-th) dt f0,
/// then re-imposes the Dirichlet row u1[n-1] = 0 unless dirichlet_top is off.
Eigen::VectorXd theta_step(const Eigen::VectorXd& u0, const LayerSystem& l0,
                           const LayerSystem& l1, const Eigen::VectorXd& f0,
                           const Eigen::VectorXd& f1, double theta, double dt,
                           bool dirichlet_top = true);

/// Solves the forward equation over all barrier layers by induction in B,
/// accumulating the quadrature source layer by layer. One call prices the
/// whole (K, B, T) cube.
PriceCube solve_all(const ForwardGrid& grid, const VolSurface& surface,
                    const MarketParams& market, const ForwardSolverConfig& cfg = {});

}  // namespace maxvol
