#include "maxvol/recovery.hpp"

#include <cmath>

#include "maxvol/errors.hpp"

namespace maxvol {

namespace {

/// Second derivative in K at (s, j, i) with the layer values extended by zero
/// above the barrier.
double dkk(const PriceCube& c, int s, int j, int i) {
  double dk = c.grid().dk;
  return (c.value(s, j, i - 1) - 2.0 * c.value(s, j, i) + c.value(s, j, i + 1)) / (dk * dk);
}

}  // namespace

CubeDerivs cube_derivatives(const PriceCube& cube, int s, int j, int i) {
  CubeDerivs out;
  const ForwardGrid& g = cube.grid();
  const int ns = cube.slices();
  if (s < 1 || j < 1 || j > g.p - 1 || i < 1) return out;
  if (i + 1 > g.top_index(j - 1)) return out;  // need full K stencils one layer down

  // Uniform slice spacing is required for the central T stencils.
  int s0 = s, s1 = s, mode_backward = 0;
  if (s + 1 < ns) {
    s0 = s - 1;
    s1 = s + 1;
  } else if (s >= 2) {
    mode_backward = 1;
  } else {
    return out;
  }
  double dt2, dtv;
  const double db = g.dk;

  auto d_t = [&](auto value_at) {
    if (!mode_backward) return (value_at(s1) - value_at(s0)) / dt2;
    return (3.0 * value_at(s) - 4.0 * value_at(s - 1) + value_at(s - 2)) / dtv;
  };
  if (!mode_backward) {
    dt2 = cube.slice_time(s1) - cube.slice_time(s0);
    if (std::abs((cube.slice_time(s1) - cube.slice_time(s)) -
                 (cube.slice_time(s) - cube.slice_time(s0))) > 1e-9 * g.t_max)
      return out;
    dtv = 0.0;
  } else {
    double h1 = cube.slice_time(s) - cube.slice_time(s - 1);
    double h2 = cube.slice_time(s - 1) - cube.slice_time(s - 2);
    if (std::abs(h1 - h2) > 1e-9 * g.t_max) return out;
    dtv = 2.0 * h1;
    dt2 = 0.0;
  }

  out.cbt = d_t([&](int ss) { return (cube.value(ss, j + 1, i) - cube.value(ss, j - 1, i)) / (2.0 * db); });
  out.c0t = d_t([&](int ss) { return cube.value(ss, j, 0); });
  out.c0tb = d_t([&](int ss) { return (cube.value(ss, j + 1, 0) - cube.value(ss, j - 1, 0)) / (2.0 * db); });
  out.ckb = (cube.value(s, j + 1, i + 1) - cube.value(s, j + 1, i - 1) - cube.value(s, j - 1, i + 1) +
             cube.value(s, j - 1, i - 1)) /
            (4.0 * g.dk * db);
  out.ckkb = (dkk(cube, s, j + 1, i) - dkk(cube, s, j - 1, i)) / (2.0 * db);
  out.complete = true;
  return out;
}

RecoveredSurface recover_sigma(const PriceCube& cube, double tau_den) {
  const ForwardGrid& g = cube.grid();
  if (tau_den < 0.0) tau_den = 1e-7 / g.spot();
  RecoveredSurface rec(&cube, tau_den);

  for (int s = 0; s < cube.slices(); ++s) {
    double t = cube.slice_time(s);
    double mu = cube.market().drift(t);
    for (int j = 0; j <= g.p; ++j) {
      int n = g.layer_size(j);
      rec.sigma_[s][j] = Eigen::ArrayXd::Zero(n);
      rec.mask_[s][j] = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false);
      if (s < 2) continue;  // kinked early slices stay unmasked
      for (int i = 1; i < n - 1; ++i) {
        CubeDerivs der = cube_derivatives(cube, s, j, i);
        if (!der.complete) continue;
        double k = g.strike(i);
        double b = g.barrier(j);
        double den = 0.5 * k * k * der.ckkb;
        if (!(den >= tau_den)) {
          ++rec.small_denominator_count;
          continue;
        }
        double num = der.cbt - (k / (b * b)) * der.c0t - ((b - k) / b) * der.c0tb + mu * k * der.ckb;
        double var = num / den;
        if (!(var > 0.0)) {
          ++rec.negative_variance_count;
          continue;
        }
        rec.sigma_[s][j][i] = std::sqrt(var);
        rec.mask_[s][j][i] = true;
        ++rec.valid_count;
      }
    }
  }
  return rec;
}

double cube_kkb_at_diagonal(const PriceCube& cube, int s, int j) {
  const ForwardGrid& g = cube.grid();
  int top = g.top_index(j);
  if (top < 3) throw GridError("cube_kkb_at_diagonal: layer too short");
  double dk3 = g.dk * g.dk * g.dk;
  double phi_u = (-cube.value(s, j, top - 3) + 3.0 * cube.value(s, j, top - 2) -
                  3.0 * cube.value(s, j, top - 1) + cube.value(s, j, top)) /
                 dk3;
  return -phi_u;  // d3/dK2dB = -d3/dK3 on the K = B boundary
}

FntCheck fnt_residual(const PriceCube& cube, const VolSurface& surface, int s, int j,
                      double kkb_at_diag) {
  const ForwardGrid& g = cube.grid();
  if (j < 0 || j > g.p) throw DomainError("fnt_residual: layer out of range");
  FntCheck out;
  double t = cube.slice_time(s);
  double b = g.barrier(j);
  // dC~(0,B,T)/dT, central where possible
  double c0t;
  if (s >= 1 && s + 1 < cube.slices()) {
    c0t = (cube.value(s + 1, j, 0) - cube.value(s - 1, j, 0)) /
          (cube.slice_time(s + 1) - cube.slice_time(s - 1));
  } else if (s + 1 < cube.slices()) {
    c0t = (cube.value(s + 1, j, 0) - cube.value(s, j, 0)) /
          (cube.slice_time(s + 1) - cube.slice_time(s));
  } else if (s >= 1) {
    c0t = (cube.value(s, j, 0) - cube.value(s - 1, j, 0)) /
          (cube.slice_time(s) - cube.slice_time(s - 1));
  } else {
    throw DomainError("fnt_residual: need at least two slices");
  }
  if (j == 0) {
    out.residual = 0.0;
    out.fnt = 0.0;
    return out;
  }
  out.residual = c0t + 0.5 * surface.sigma2(b, b, t) * b * b * b * kkb_at_diag;
  out.fnt = cube.value(s, j, 0) / cube.market().capitalization(t);
  return out;
}

}  // namespace maxvol
