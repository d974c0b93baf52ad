#include "maxvol/forward_pide.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "maxvol/operators.hpp"
#include "maxvol/schedule.hpp"

namespace maxvol {

namespace {

void add_entry(TailBandMatrix& a, int i, int j, double v) {
  if (v != 0.0) a.add(i, j, v);
}

/// Writes c_scale * conv D + d_scale * diff D2 + b_scale * bnd Phi into a.
void add_rows(TailBandMatrix& a, const LayerSystem& sys, double c_scale, double d_scale,
              double b_scale) {
  const int n = sys.n;
  const double dk = sys.dk;
  const double w1 = 1.0 / dk, w2 = 1.0 / (dk * dk), w3 = 1.0 / (dk * dk * dk);
  for (int i = 0; i < n; ++i) {
    double c = c_scale * sys.conv[i];
    if (c != 0.0) {
      if (i == 0) {
        add_entry(a, 0, 0, -c * w1);
        add_entry(a, 0, 1, c * w1);
      } else if (i == n - 1) {
        add_entry(a, i, i - 1, -c * w1);
        add_entry(a, i, i, c * w1);
      } else {
        add_entry(a, i, i - 1, -0.5 * c * w1);
        add_entry(a, i, i + 1, 0.5 * c * w1);
      }
    }
    double d = d_scale * sys.diff[i] * w2;
    if (d != 0.0) {
      int ctr = std::clamp(i, 1, n - 2);
      add_entry(a, i, ctr - 1, d);
      add_entry(a, i, ctr, -2.0 * d);
      add_entry(a, i, ctr + 1, d);
    }
    double b = b_scale * sys.bnd[i] * w3;
    if (b != 0.0) {
      if (sys.stencil == BoundaryStencil::boundary_cubic) {
        add_entry(a, i, n - 2, -6.0 * b);
      } else {
        add_entry(a, i, n - 4, -b);
        add_entry(a, i, n - 3, 3.0 * b);
        add_entry(a, i, n - 2, -3.0 * b);
        add_entry(a, i, n - 1, b);
      }
    }
  }
}

}  // namespace

TailBandMatrix LayerSystem::matrix() const {
  if (n < 5) throw GridError("LayerSystem: need at least 5 nodes");
  TailBandMatrix a(n);
  add_rows(a, *this, 1.0, 1.0, 1.0);
  return a;
}

Eigen::MatrixXd LayerSystem::dense() const {
  DifferenceOperators ops = assemble_operators(n, dk);
  Eigen::MatrixXd phi = ops.phi;
  if (stencil == BoundaryStencil::boundary_cubic) {
    phi.setZero();
    phi.col(n - 2).setConstant(-6.0 / (dk * dk * dk));
  }
  return conv.matrix().asDiagonal() * ops.d1 + diff.matrix().asDiagonal() * ops.d2 +
         bnd.matrix().asDiagonal() * phi;
}

LayerSystem build_layer_system(const ForwardGrid& grid, int j, double t,
                               const VolSurface& surface, const MarketParams& market,
                               DiffusionCorrection correction, bool include_boundary_term,
                               BoundaryStencil stencil) {
  const int n = grid.layer_size(j);
  const double barrier = grid.barrier(j);
  const double mu = market.drift(t);
  LayerSystem sys;
  sys.n = n;
  sys.dk = grid.dk;
  sys.stencil = stencil;
  sys.conv.resize(n);
  sys.diff.resize(n);
  sys.bnd.resize(n);
  const double sig2_diag = surface.sigma2(barrier, barrier, t);
  for (int i = 0; i < n; ++i) {
    double k = grid.strike(i);
    sys.conv[i] = mu * k;
    if (i == 0) {
      sys.diff[i] = 0.0;  // K = 0: convection and diffusion vanish exactly
    } else if (correction == DiffusionCorrection::taylor_shift) {
      double ye = barrier - 0.5 * grid.dk;
      sys.diff[i] = -0.5 * surface.sigma2(std::min(k, ye), ye, t) * k * k;
    } else {
      double s2 = surface.sigma2(k, barrier, t) - 0.5 * surface.dsigma2_dy(k, barrier, t) * grid.dk;
      sys.diff[i] = -0.5 * s2 * k * k;
    }
    sys.bnd[i] =
        include_boundary_term ? -0.5 * sig2_diag * barrier * barrier * std::max(barrier - k, 0.0)
                              : 0.0;
  }
  return sys;
}

Eigen::VectorXd source_vector(const PriceCube& cube, int j, int s, const VolSurface& surface) {
  const ForwardGrid& grid = cube.grid();
  const int n = grid.layer_size(j);
  const double t = cube.slice_time(s);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  const double inv_dk2 = 1.0 / (grid.dk * grid.dk);
  for (int layer = 1; layer < j; ++layer) {
    if (!cube.layer_ready(s, layer))
      throw SequencingError("source_vector: layer " + std::to_string(layer) + " not solved yet");
    const double b = grid.barrier(layer);
    const int top = grid.top_index(layer);
    for (int i = 1; i <= std::min(top, n - 1); ++i) {
      double dkk =
          (cube.value(s, layer, i - 1) - 2.0 * cube.value(s, layer, i) + cube.value(s, layer, i + 1)) *
          inv_dk2;
      double k = grid.strike(i);
      f[i] -= 0.5 * k * k * dkk * surface.dsigma2_dy(k, b, t) * grid.dk;
    }
  }
  return f;
}

Eigen::VectorXd theta_step(const Eigen::VectorXd& u0, const LayerSystem& l0,
                           const LayerSystem& l1, const Eigen::VectorXd& f0,
                           const Eigen::VectorXd& f1, double theta, double dt,
                           bool dirichlet_top) {
  if (theta < 0.0 || theta > 1.0) throw ConfigError("theta_step: theta must be in [0, 1]");
  const int n = l0.n;
  if (u0.size() != n || f0.size() != n || f1.size() != n || l1.n != n)
    throw GridError("theta_step: dimension mismatch");
  TailBandMatrix expl = l0.matrix().identity_plus(-(1.0 - theta) * dt);
  Eigen::VectorXd rhs = expl.multiply(u0);
  rhs += theta * dt * f1 + (1.0 - theta) * dt * f0;
  if (dirichlet_top) rhs[n - 1] = 0.0;
  Eigen::VectorXd u1;
  if (theta == 0.0) {
    u1 = std::move(rhs);
  } else {
    TailBandMatrix imp = l1.matrix().identity_plus(theta * dt);
    if (dirichlet_top) imp.set_identity_row(n - 1);
    u1 = TailBandLU(imp).solve(std::move(rhs));
  }
  if (dirichlet_top) u1[n - 1] = 0.0;
  return u1;
}

PriceCube solve_all(const ForwardGrid& grid, const VolSurface& surface,
                    const MarketParams& market, const ForwardSolverConfig& cfg) {
  if (cfg.theta < 0.0 || cfg.theta > 1.0) throw ConfigError("solve_all: theta must be in [0, 1]");
  if (cfg.boundary == BoundaryTerm::density && !cfg.boundary_kkb)
    throw ConfigError("solve_all: density boundary term requires boundary_kkb");

  const StepSchedule sched = StepSchedule::uniform(grid.t_max, grid.m, cfg.theta, cfg.rannacher);
  const int n_points = sched.steps() + 1;
  const int n_max = grid.layer_size(grid.p);

  std::vector<int> stored;
  stored.push_back(0);
  if (cfg.store_every > 0)
    for (int m = cfg.store_every; m < grid.m; m += cfg.store_every) stored.push_back(m);
  stored.push_back(grid.m);

  PriceCube cube(grid, market, stored);

  const bool market_frozen = market.rate.is_constant() && market.dividend.is_constant();
  enum class TimeMode { frozen, separable, general };
  TimeMode mode = TimeMode::general;
  if (!surface.time_dependent() && market_frozen)
    mode = TimeMode::frozen;
  else if (surface.time_separable() && market_frozen)
    mode = TimeMode::separable;
  const bool phi_term = cfg.boundary == BoundaryTerm::phi_stencil;

  // Running quadrature source over all schedule points (layers 1..j-1 summed).
  std::vector<double> source(static_cast<std::size_t>(n_points) * n_max, 0.0);
  std::vector<double> hist(static_cast<std::size_t>(n_points) * n_max, 0.0);
  std::vector<double> rhs(n_max), u(n_max), wsrc(n_max);
  TailBandMatrix imp_work(1);

  for (int j = 0; j <= grid.p; ++j) {
    const int n = grid.layer_size(j);
    const int top = n - 1;
    const double barrier = grid.barrier(j);

    if (j == 0) {
      for (int s = 0; s < cube.slices(); ++s) cube.layer(s, 0) = Eigen::ArrayXd::Zero(n);
      continue;  // B = spot: knocked out at inception, stays zero, zero source
    }

    for (int i = 0; i < n; ++i) u[i] = std::max(grid.spot() - grid.strike(i), 0.0);
    u[top] = 0.0;
    std::copy(u.begin(), u.begin() + n, hist.begin());

    struct StepOp {
      double theta = -1.0, dt = 0.0;
      TailBandMatrix expl{1};
      TailBandLU imp;
    };
    // scale factors: explicit side tau0, implicit side tau1
    auto fill_op = [&](StepOp& op, const LayerSystem& s0, const LayerSystem& s1, double th,
                       double dt, double tau0, double tau1) {
      op.theta = th;
      op.dt = dt;
      if (op.expl.size() != n) op.expl = TailBandMatrix(n);
      op.expl.set_zero();
      double we = -(1.0 - th) * dt;
      add_rows(op.expl, s0, we, we * tau0, we * tau0);
      for (int i = 0; i < n; ++i) op.expl.add(i, i, 1.0);
      if (imp_work.size() != n) imp_work = TailBandMatrix(n);
      imp_work.set_zero();
      double wi = th * dt;
      add_rows(imp_work, s1, wi, wi * tau1, wi * tau1);
      for (int i = 0; i < n; ++i) imp_work.add(i, i, 1.0);
      imp_work.set_identity_row(n - 1);
      op.imp.factor(imp_work);
    };

    LayerSystem base = build_layer_system(grid, j, 0.0, surface, market, cfg.correction, phi_term,
                                          cfg.stencil);
    std::vector<StepOp> frozen_ops;
    StepOp work;
    if (mode == TimeMode::frozen) {
      for (int s = 0; s < sched.steps(); ++s) {
        double th = sched.thetas[s], dt = sched.times[s + 1] - sched.times[s];
        bool found = false;
        for (auto& op : frozen_ops)
          if (op.theta == th && op.dt == dt) found = true;
        if (!found) {
          frozen_ops.emplace_back();
          fill_op(frozen_ops.back(), base, base, th, dt, 1.0, 1.0);
        }
      }
    }

    for (int s = 0; s < sched.steps(); ++s) {
      const double th = sched.thetas[s];
      const double dt = sched.times[s + 1] - sched.times[s];
      const double t0 = sched.times[s], t1 = sched.times[s + 1];
      const double* f0 = &source[static_cast<std::size_t>(s) * n_max];
      const double* f1 = f0 + n_max;

      const StepOp* op = nullptr;
      if (mode == TimeMode::frozen) {
        for (auto& o : frozen_ops)
          if (o.theta == th && o.dt == dt) op = &o;
      } else if (mode == TimeMode::separable) {
        fill_op(work, base, base, th, dt, surface.time_factor(t0), surface.time_factor(t1));
        op = &work;
      } else {
        LayerSystem s0 = build_layer_system(grid, j, t0, surface, market, cfg.correction,
                                            phi_term, cfg.stencil);
        LayerSystem s1 = build_layer_system(grid, j, t1, surface, market, cfg.correction,
                                            phi_term, cfg.stencil);
        fill_op(work, s0, s1, th, dt, 1.0, 1.0);
        op = &work;
      }

      op->expl.multiply(u.data(), rhs.data());
      for (int i = 0; i < n; ++i) rhs[i] += dt * (th * f1[i] + (1.0 - th) * f0[i]);
      if (!phi_term) {
        // Boundary-derivative term from the density, entering as a source:
        // f_i += C_i * d^3C~/dK^2dB |_{K=B}, with the usual theta weighting.
        double g0 = surface.sigma2(barrier, barrier, t0) * cfg.boundary_kkb(barrier, t0);
        double g1 = surface.sigma2(barrier, barrier, t1) * cfg.boundary_kkb(barrier, t1);
        double wb = -0.5 * barrier * barrier * dt * (th * g1 + (1.0 - th) * g0);
        for (int i = 0; i < n; ++i) rhs[i] += wb * std::max(barrier - grid.strike(i), 0.0);
      }
      rhs[top] = 0.0;  // Dirichlet row at K = B_j
      try {
        op->imp.solve_in_place(rhs.data());
      } catch (const NumericalError& e) {
        throw NumericalError(std::string("forward solve failed: ") + e.what(), j, s);
      }
      std::copy(rhs.begin(), rhs.begin() + n, u.begin());
      u[top] = 0.0;
      std::copy(u.begin(), u.begin() + n, hist.begin() + static_cast<std::size_t>(s + 1) * n_max);
    }

    for (int s = 0; s < cube.slices(); ++s) {
      const double* row =
          &hist[static_cast<std::size_t>(sched.point_of_step(cube.slice_step(s))) * n_max];
      cube.layer(s, j) = Eigen::Map<const Eigen::ArrayXd>(row, n);
    }

    // Fold this layer into the running source for the layers above.
    if (j < grid.p) {
      bool any = false;
      for (int i = 0; i < n; ++i) {
        double k = grid.strike(i);
        wsrc[i] = i == 0 ? 0.0 : -0.5 * k * k * surface.dsigma2_dy(k, barrier, 0.0) / grid.dk;
        if (wsrc[i] != 0.0) any = true;
      }
      if (!any && mode != TimeMode::general) continue;
      for (int s = 0; s < n_points; ++s) {
        const double* row = &hist[static_cast<std::size_t>(s) * n_max];
        double* frow = &source[static_cast<std::size_t>(s) * n_max];
        double t = sched.times[s];
        if (mode == TimeMode::general) {
          for (int i = 1; i < top; ++i) {
            double k = grid.strike(i);
            double w = -0.5 * k * k * surface.dsigma2_dy(k, barrier, t) / grid.dk;
            frow[i] += w * (row[i - 1] - 2.0 * row[i] + row[i + 1]);
          }
          double k = grid.strike(top);
          double w = -0.5 * k * k * surface.dsigma2_dy(k, barrier, t) / grid.dk;
          frow[top] += w * row[top - 1];
        } else {
          double tau = mode == TimeMode::separable ? surface.time_factor(t) : 1.0;
          for (int i = 1; i < top; ++i)
            frow[i] += tau * wsrc[i] * (row[i - 1] - 2.0 * row[i] + row[i + 1]);
          frow[top] += tau * wsrc[top] * row[top - 1];
        }
      }
    }
  }
  return cube;
}

}  // namespace maxvol
