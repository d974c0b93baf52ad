#include "maxvol/backward_pde.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "maxvol/banded.hpp"

namespace maxvol {

namespace {

/// Nonuniform three-point first/second derivative weights at one node.
struct Stencil {
  double lo1, di1, up1;  // d/dx
  double lo2, di2, up2;  // d2/dx2
};

Stencil stencil(double hm, double hp) {
  Stencil s;
  double denom = hm * (hm + hp), denop = hp * (hm + hp);
  s.lo1 = -hp / denom;
  s.di1 = (hp - hm) / (hm * hp);
  s.up1 = hm / denop;
  s.lo2 = 2.0 / denom;
  s.di2 = -2.0 / (hm * hp);
  s.up2 = 2.0 / denop;
  return s;
}

/// Spatial operator A v = mu x v_x + sigma^2 x^2 v_xx / 2 - r v on interior
/// rows of one layer, split into a drift/discount part and a diffusion part
/// so time-separable surfaces can rescale the latter per step. Rows 0 and
/// n-1 stay empty (Dirichlet).
struct LayerOperator {
  std::vector<double> clo, cdi, cup;  // mu x v_x - r v
  std::vector<double> dlo, ddi, dup;  // sigma^2(., t_eval) x^2 v_xx / 2

  LayerOperator(const std::vector<double>& x, double y, double t_eval, const VolSurface& surface,
                const MarketParams& market) {
    int n = static_cast<int>(x.size());
    clo.assign(n, 0.0);
    cdi.assign(n, 0.0);
    cup.assign(n, 0.0);
    dlo.assign(n, 0.0);
    ddi.assign(n, 0.0);
    dup.assign(n, 0.0);
    double mu = market.drift(t_eval), r = market.rate.value(t_eval);
    for (int i = 1; i < n - 1; ++i) {
      Stencil s = stencil(x[i] - x[i - 1], x[i + 1] - x[i]);
      double conv = mu * x[i];
      double diff = 0.5 * surface.sigma2(x[i], y, t_eval) * x[i] * x[i];
      clo[i] = conv * s.lo1;
      cdi[i] = conv * s.di1 - r;
      cup[i] = conv * s.up1;
      dlo[i] = diff * s.lo2;
      ddi[i] = diff * s.di2;
      dup[i] = diff * s.up2;
    }
  }
};

/// Per-step operators: factored implicit matrix (I - th dtau A with Dirichlet
/// rows) and explicit coefficients (I + (1-th) dtau A), where the diffusion
/// part of A carries per-level scale factors tau. Reusable across steps.
struct StepOp {
  double theta = -1.0, dtau = 0.0;
  TriDiagLU imp;
  std::vector<double> lo, di, up, elo, edi, eup;
  bool explicit_identity = false;

  void build(const LayerOperator& a_imp, const LayerOperator& a_exp, double th, double dt,
             double tau_imp, double tau_exp) {
    theta = th;
    dtau = dt;
    int n = static_cast<int>(a_imp.cdi.size());
    lo.assign(n, 0.0);
    di.assign(n, 1.0);
    up.assign(n, 0.0);
    for (int i = 1; i < n - 1; ++i) {
      lo[i] = -th * dt * (a_imp.clo[i] + tau_imp * a_imp.dlo[i]);
      di[i] = 1.0 - th * dt * (a_imp.cdi[i] + tau_imp * a_imp.ddi[i]);
      up[i] = -th * dt * (a_imp.cup[i] + tau_imp * a_imp.dup[i]);
    }
    imp.factor(lo, di, up);
    explicit_identity = th == 1.0;
    if (!explicit_identity) {
      elo.assign(n, 0.0);
      edi.assign(n, 1.0);
      eup.assign(n, 0.0);
      double w = (1.0 - th) * dt;
      for (int i = 1; i < n - 1; ++i) {
        elo[i] = w * (a_exp.clo[i] + tau_exp * a_exp.dlo[i]);
        edi[i] = 1.0 + w * (a_exp.cdi[i] + tau_exp * a_exp.ddi[i]);
        eup[i] = w * (a_exp.cup[i] + tau_exp * a_exp.dup[i]);
      }
    }
  }
};

/// Steps one layer over the whole schedule for `lanes` strikes at once.
/// v has stride `stride` per node; g is the Dirichlet series at x = y,
/// indexed [point * stride + lane]. record(point, v) is called for every
/// schedule point including the terminal one.
template <typename Record>
void run_layer(const std::vector<double>& x, double y, double t_max, const VolSurface& surface,
               const MarketParams& market, const StepSchedule& sched, const double* strikes,
               int lanes, int stride, const double* g, std::vector<double>& v,
               std::vector<double>& w, Record record) {
  const int n = static_cast<int>(x.size());
  const bool market_frozen = market.rate.is_constant() && market.dividend.is_constant();
  enum class TimeMode { frozen, separable, general };
  TimeMode mode = TimeMode::general;
  if (!surface.time_dependent() && market_frozen)
    mode = TimeMode::frozen;
  else if (surface.time_separable() && market_frozen)
    mode = TimeMode::separable;

  for (int i = 0; i < n; ++i)
    for (int l = 0; l < lanes; ++l)
      v[static_cast<std::size_t>(i) * stride + l] = std::max(x[i] - strikes[l], 0.0);
  record(0, v.data());

  LayerOperator base(x, y, mode == TimeMode::general ? t_max : 0.0, surface, market);
  std::vector<StepOp> frozen_ops;
  StepOp work;
  if (mode == TimeMode::frozen) {
    for (int p = 0; p < sched.steps(); ++p) {
      double th = sched.thetas[p], dt = sched.times[p + 1] - sched.times[p];
      bool found = false;
      for (auto& op : frozen_ops)
        if (op.theta == th && op.dtau == dt) found = true;
      if (!found) {
        frozen_ops.emplace_back();
        frozen_ops.back().build(base, base, th, dt, 1.0, 1.0);
      }
    }
  }

  for (int p = 0; p < sched.steps(); ++p) {
    double th = sched.thetas[p], dt = sched.times[p + 1] - sched.times[p];
    const StepOp* op = nullptr;
    if (mode == TimeMode::frozen) {
      for (auto& o : frozen_ops)
        if (o.theta == th && o.dtau == dt) op = &o;
    } else if (mode == TimeMode::separable) {
      // calendar times of this step (tau = t_max - time to maturity)
      double tnew = t_max - sched.times[p + 1], told = t_max - sched.times[p];
      work.build(base, base, th, dt, surface.time_factor(tnew), surface.time_factor(told));
      op = &work;
    } else {
      LayerOperator a1(x, y, t_max - sched.times[p + 1], surface, market);
      LayerOperator a0(x, y, t_max - sched.times[p], surface, market);
      work.build(a1, a0, th, dt, 1.0, 1.0);
      op = &work;
    }

    if (op->explicit_identity) {
      std::copy(v.begin(), v.begin() + static_cast<std::size_t>(n) * stride, w.begin());
    } else {
      for (int i = 1; i < n - 1; ++i) {
        const double* pm = &v[static_cast<std::size_t>(i - 1) * stride];
        const double* pc = pm + stride;
        const double* pp = pc + stride;
        double* out = &w[static_cast<std::size_t>(i) * stride];
        double clo = op->elo[i], cdi = op->edi[i], cup = op->eup[i];
        for (int l = 0; l < lanes; ++l) out[l] = clo * pm[l] + cdi * pc[l] + cup * pp[l];
      }
    }
    for (int l = 0; l < lanes; ++l) w[l] = 0.0;
    const double* gp = g + static_cast<std::size_t>(p + 1) * stride;
    double* top = &w[static_cast<std::size_t>(n - 1) * stride];
    for (int l = 0; l < lanes; ++l) top[l] = gp[l];

    op->imp.solve_lanes(w.data(), lanes, stride);
    std::swap(v, w);
    record(p + 1, v.data());
  }
}

std::vector<double> xgrid_layer1(double y0, double y1, double dy) {
  int n_x = static_cast<int>(std::ceil(y1 / dy));
  if (n_x < 3) throw GridError("layer grid: fewer than 3 spot intervals");
  double dx = y0 / (n_x - 1);
  std::vector<double> x(n_x + 1);
  for (int j = 0; j <= n_x - 1; ++j) x[j] = j * dx;
  x[n_x - 1] = y0;
  x[n_x] = y1;
  return x;
}

}  // namespace

Eigen::ArrayXXd solve_layer(const std::vector<double>& x, double y, double strike,
                            double maturity, const VolSurface& surface,
                            const MarketParams& market, const StepSchedule& sched,
                            const Eigen::ArrayXd& boundary) {
  const int n = static_cast<int>(x.size());
  if (n < 3 || x.front() != 0.0 || x.back() != y)
    throw GridError("solve_layer: grid must run from 0 to y");
  if (boundary.size() != sched.steps() + 1)
    throw GridError("solve_layer: boundary series does not match the schedule");
  Eigen::ArrayXXd field(sched.steps() + 1, n);
  std::vector<double> v(n), w(n);
  run_layer(x, y, maturity, surface, market, sched, &strike, 1, 1, boundary.data(), v, w,
            [&](int p, const double* vals) {
              for (int i = 0; i < n; ++i) field(p, i) = vals[i];
            });
  return field;
}

Eigen::ArrayXd price_backward_ladder(const std::vector<double>& strikes, double barrier,
                                     double maturity, const VolSurface& surface,
                                     const MarketParams& market,
                                     const BackwardSolverConfig& cfg) {
  const int lanes = static_cast<int>(strikes.size());
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(lanes);
  if (lanes == 0) return out;
  if (!(maturity > 0.0)) throw ConfigError("price_backward_ladder: maturity must be > 0");
  if (barrier <= market.spot) return out;  // knocked out at inception

  const std::vector<double> y = build_backward_ygrid(market.spot, barrier, cfg.dy);
  const int n_y = static_cast<int>(y.size()) - 2;
  const StepSchedule sched = StepSchedule::uniform(maturity, cfg.steps, cfg.theta, cfg.rannacher);
  const int points = sched.steps() + 1;
  const int stride = (lanes + 3) & ~3;

  // Rolling per-layer records: value series at the second and third topmost
  // spot nodes (x = y_{i-1} and x = y_{i-2}) of the two layers above.
  Eigen::ArrayXXd sub1_up1(points, stride), sub2_up1(points, stride);
  Eigen::ArrayXXd sub1_cur(points, stride), sub2_cur(points, stride);
  Eigen::ArrayXXd sub2_up2(points, stride);
  sub1_up1.setZero();
  sub2_up1.setZero();
  sub2_up2.setZero();

  std::vector<double> g(static_cast<std::size_t>(points) * stride, 0.0);
  int max_nodes = static_cast<int>(std::ceil(barrier / cfg.dy)) + 2;
  std::vector<double> v(static_cast<std::size_t>(max_nodes) * stride);
  std::vector<double> w(static_cast<std::size_t>(max_nodes) * stride);

  // The top layer carries the alive limit y -> B^-: the knock-out shows up as
  // the Dirichlet zero at x = B, not as a zero value field (the zero field is
  // the state after knock-out and would shift the barrier down by the top
  // level spacing when bootstrapped from).
  for (int i = n_y + 1; i >= 1; --i) {
    // Dirichlet series at x = y_i from the layers above.
    if (i == n_y + 1) {
      std::fill(g.begin(), g.end(), 0.0);
    } else if (i >= n_y - 1) {
      for (int p = 0; p < points; ++p)
        for (int l = 0; l < lanes; ++l) g[static_cast<std::size_t>(p) * stride + l] = sub1_up1(p, l);
    } else {
      for (int p = 0; p < points; ++p)
        for (int l = 0; l < lanes; ++l)
          g[static_cast<std::size_t>(p) * stride + l] =
              layer_boundary_value(sub1_up1(p, l), sub2_up2(p, l), y[i], y[i + 1], y[i + 2]);
    }

    std::vector<double> x =
        i >= 2 ? build_layer_xgrid(y[i], y[i - 1], y[i - 2], cfg.dy) : xgrid_layer1(y[0], y[1], cfg.dy);
    const int n = static_cast<int>(x.size());
    sub1_cur.setZero();
    sub2_cur.setZero();
    run_layer(x, y[i], maturity, surface, market, sched, strikes.data(), lanes, stride, g.data(),
              v, w, [&](int p, const double* vals) {
                const double* r1 = vals + static_cast<std::size_t>(n - 2) * stride;
                const double* r2 = vals + static_cast<std::size_t>(n - 3) * stride;
                for (int l = 0; l < lanes; ++l) {
                  sub1_cur(p, l) = r1[l];
                  sub2_cur(p, l) = r2[l];
                }
              });

    sub2_up2.swap(sub2_up1);
    sub1_up1.swap(sub1_cur);
    sub2_up1.swap(sub2_cur);
  }

  // Premium at (spot, spot, 0): the bootstrapped value of the bottom layer.
  const int last = points - 1;
  for (int l = 0; l < lanes; ++l) {
    double price;
    if (n_y == 1)
      price = sub1_up1(last, l);
    else
      price = layer_boundary_value(sub1_up1(last, l), sub2_up2(last, l), y[0], y[1], y[2]);
    out[l] = price;
  }
  for (int l = 0; l < lanes; ++l)
    if (strikes[l] >= barrier) out[l] = 0.0;
  return out;
}

BackwardResult price_backward(const BackwardDeal& deal, const VolSurface& surface,
                              const MarketParams& market, const BackwardSolverConfig& cfg) {
  deal.validate();
  BackwardResult res;
  if (deal.barrier <= market.spot) {
    res.knocked_out = true;
    return res;
  }
  res.price = price_backward_ladder({deal.strike}, deal.barrier, deal.maturity, surface, market,
                                    cfg)[0];
  return res;
}

}  // namespace maxvol
