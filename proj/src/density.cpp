#include "maxvol/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "maxvol/analytic.hpp"
#include "maxvol/errors.hpp"
#include "maxvol/schedule.hpp"

namespace maxvol {

namespace {

int exact_multiple(double length, double dx, const char* what) {
  double ratio = length / dx;
  int n = static_cast<int>(std::round(ratio));
  if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError(std::string("solve_kfe: dx must divide ") + what);
  return n;
}

/// Tridiagonal solve with one extra entry at (n-1, n-3), in place.
void solve_diag_system(std::vector<double>& lo, std::vector<double>& di, std::vector<double>& up,
                       double extra, std::vector<double>& rhs, int n, double* out) {
  for (int i = 1; i < n - 1; ++i) {
    double m = lo[i] / di[i - 1];
    di[i] -= m * up[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  // last row: eliminate the (n-1, n-3) entry, then the subdiagonal
  double l1 = lo[n - 1], d = di[n - 1], r = rhs[n - 1];
  if (n >= 3 && extra != 0.0) {
    double m2 = extra / di[n - 3];
    l1 -= m2 * up[n - 3];
    r -= m2 * rhs[n - 3];
  }
  {
    double m1 = l1 / di[n - 2];
    d -= m1 * up[n - 2];
    r -= m1 * rhs[n - 2];
  }
  if (std::abs(d) < 1e-300) throw NumericalError("solve_kfe: singular diagonal row");
  out[n - 1] = r / d;
  for (int i = n - 2; i >= 0; --i) out[i] = (rhs[i] - up[i] * out[i + 1]) / di[i];
}

}  // namespace

double DensitySolution::mass(int s) const {
  const std::vector<double>& f = slices_[s];
  double total = 0.0;
  for (int j = 0; j < rows_; ++j) {
    int n = row_nodes(j);
    const double* row = &f[offset_[j]];
    double rowsum = 0.5 * (row[0] + row[n - 1]);
    for (int i = 1; i < n - 1; ++i) rowsum += row[i];
    double wy = (j == 0 || j == rows_ - 1) ? 0.5 : 1.0;
    total += wy * rowsum;
  }
  return total * dx_ * dx_;
}

double DensitySolution::marginal_x(int s, int i) const {
  const std::vector<double>& f = slices_[s];
  double sum = 0.0;
  for (int j = 0; j < rows_; ++j) {
    if (i >= row_nodes(j)) continue;
    double wy = (j == 0 || j == rows_ - 1) ? 0.5 : 1.0;
    // the diagonal node x_i = y_j is the lower end of the valid y range for x_i
    if (i == row_nodes(j) - 1) wy = 0.5;
    sum += wy * f[offset_[j] + i];
  }
  return sum * dx_;
}

double DensitySolution::diagonal_limit(int s, int j) const {
  const double* row = &slices_[s][offset_[j]];
  int n = row_nodes(j);
  if (n < 4) throw GridError("diagonal_limit: row too short");
  return 3.0 * row[n - 2] - 3.0 * row[n - 3] + row[n - 4];
}

double DensitySolution::boundary_kkb(double barrier, double t) const {
  double pos = (barrier - spot()) / dx_;
  int j = static_cast<int>(std::round(pos));
  if (j < 0 || j >= rows_ || std::abs(pos - j) > 1e-6)
    throw DomainError("boundary_kkb: barrier not on the density grid");
  const std::vector<double>& ts = step_times_;
  if (t <= ts.front()) t = ts.front();
  if (t > ts.back() + 1e-9) throw DomainError("boundary_kkb: t beyond the solved horizon");
  auto it = std::lower_bound(ts.begin(), ts.end(), t);
  std::size_t hi = std::min<std::size_t>(it - ts.begin(), ts.size() - 1);
  std::size_t lo = hi > 0 && ts[hi] > t ? hi - 1 : hi;
  double v;
  if (hi == lo || ts[hi] == ts[lo]) {
    v = diag_kkb_[hi * rows_ + j];
  } else {
    double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    v = (1.0 - w) * diag_kkb_[lo * rows_ + j] + w * diag_kkb_[hi * rows_ + j];
  }
  return market_.discount(t) * market_.capitalization(t) * v;
}

double DensitySolution::row_payoff_integral(const std::vector<double>& f, int j,
                                            double strike) const {
  int n = row_nodes(j);
  const double* row = &f[offset_[j]];
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double pay = i * dx_ - strike;
    if (pay <= 0.0) continue;
    double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    sum += w * pay * row[i];
  }
  // trapezoid correction on the half-cell where the payoff kinks off-node
  return sum * dx_;
}

double DensitySolution::price(double strike, double barrier, double t, bool* warned) const {
  if (warned) *warned = false;
  if (barrier <= spot() || strike >= barrier) return 0.0;
  if (barrier > b_max() + 1e-9) throw DomainError("price_from_density: barrier beyond b_max");

  // integral up to y row jb (trapezoid over [spot, y_jb])
  auto integrate_rows = [&](int sl, int jb) {
    const std::vector<double>& f = slices_[sl];
    double total = 0.0;
    for (int j = 0; j <= jb; ++j) {
      double wy = (j == 0 || j == jb) ? 0.5 : 1.0;
      total += wy * row_payoff_integral(f, j, strike);
    }
    return total * dx_;
  };
  // blend in B when the barrier is off the row grid
  auto integrate = [&](int sl) {
    double bpos = (barrier - spot()) / dx_;
    int j_lo = std::clamp(static_cast<int>(std::floor(bpos + 1e-9)), 0, rows_ - 1);
    double w = bpos - j_lo;
    if (w < 1e-9 || j_lo == rows_ - 1) return integrate_rows(sl, j_lo);
    return (1.0 - w) * integrate_rows(sl, j_lo) + w * integrate_rows(sl, j_lo + 1);
  };

  int s = -1;
  for (int k = 0; k < slices(); ++k)
    if (std::abs(slice_times_[k] - t) < 1e-9) s = k;
  double undiscounted;
  if (s >= 0) {
    undiscounted = integrate(s);
  } else {
    if (warned) *warned = true;
    if (t < slice_times_.front() - 1e-9 || t > slice_times_.back() + 1e-9)
      throw DomainError("price_from_density: t outside stored slices");
    int hi = 0;
    while (hi + 1 < slices() && slice_times_[hi] < t) ++hi;
    int lo = std::max(hi - 1, 0);
    double w = slice_times_[hi] == slice_times_[lo]
                   ? 0.0
                   : (t - slice_times_[lo]) / (slice_times_[hi] - slice_times_[lo]);
    undiscounted = (1.0 - w) * integrate(lo) + w * integrate(hi);
  }
  return market_.discount(t) * undiscounted;
}

DensitySolution solve_kfe(const VolSurface& surface, const MarketParams& market,
                          const KfeConfig& cfg, double t_end) {
  if (!(t_end > 0.0)) throw ConfigError("solve_kfe: t_end must be > 0");
  if (!(cfg.dx > 0.0)) throw ConfigError("solve_kfe: dx must be > 0");
  if (!(cfg.b_max > market.spot)) throw ConfigError("solve_kfe: need b_max > spot");
  if (cfg.mollifier_width < 2.0)
    throw ConfigError("solve_kfe: mollifier width must be at least 2 dx");

  DensitySolution d(market);
  d.dx_ = cfg.dx;
  d.g0_ = exact_multiple(market.spot, cfg.dx, "spot");
  d.rows_ = exact_multiple(cfg.b_max - market.spot, cfg.dx, "b_max - spot") + 1;
  d.dx_ = market.spot / d.g0_;
  if (d.g0_ < 4) throw GridError("solve_kfe: grid too coarse below the spot");
  const double dx = d.dx_;
  const int rows = d.rows_, g0 = d.g0_;

  d.offset_.resize(rows + 1);
  d.offset_[0] = 0;
  for (int j = 0; j < rows; ++j) d.offset_[j + 1] = d.offset_[j] + d.row_nodes(j);
  const std::size_t n_nodes = d.offset_[rows];

  const bool market_frozen = market.rate.is_constant() && market.dividend.is_constant();
  const bool general = !(surface.time_separable() && market_frozen);

  // sigma^2 x^2 at t = 0 on every node; separable surfaces rescale per step.
  const int max_n = g0 + rows;
  std::vector<double> g2flat;
  if (!general) {
    g2flat.resize(n_nodes);
    for (int j = 0; j < rows; ++j) {
      double y = d.y_level(j);
      g2flat[d.offset_[j]] = 0.0;
      for (int i = 1; i < d.row_nodes(j); ++i) {
        double x = i * dx;
        g2flat[d.offset_[j] + i] = surface.sigma2(x, y, 0.0) * x * x;
      }
    }
  }

  std::vector<double> phi(n_nodes, 0.0), phi_new(n_nodes, 0.0);

  double t0 = 0.0;
  if (cfg.warm_start) {
    t0 = cfg.warm_start_time;
    if (!(t0 > 0.0) || t0 >= t_end) throw ConfigError("solve_kfe: bad warm start time");
    double vol0 = surface.sigma(market.spot, market.spot, 0.0);
    double r0 = market.rate.value(0.0), q0 = market.dividend.value(0.0);
    for (int j = 0; j < rows; ++j) {
      double y = d.y_level(j);
      for (int i = 1; i < d.row_nodes(j); ++i)
        phi[d.offset_[j] + i] = reflection_joint_pdf(i * dx, y, market.spot, t0, vol0, r0, q0);
    }
  } else {
    double eps = cfg.mollifier_width * dx;
    for (int j = 0; j < rows; ++j) {
      double wy = (d.y_level(j) - market.spot) / eps;
      if (wy >= 1.0) break;
      double by = std::cos(0.5 * std::numbers::pi * wy);
      for (int i = 1; i < d.row_nodes(j); ++i) {
        double wx = std::abs(i * dx - market.spot) / eps;
        if (wx >= 1.0) continue;
        double bx = std::cos(0.5 * std::numbers::pi * wx);
        phi[d.offset_[j] + i] = bx * bx * by * by;
      }
    }
  }

  // Normalize the start slice to unit triangle mass.
  {
    d.slices_.push_back(phi);
    double m0 = d.mass(0);
    d.slices_.clear();
    if (!(m0 > 0.0)) throw NumericalError("solve_kfe: empty initial mass");
    for (double& v : phi) v /= m0;
  }

  StepSchedule sched = StepSchedule::uniform(t_end - t0, cfg.steps, cfg.theta, cfg.rannacher);
  const int n_steps = sched.steps();

  // Slice bookkeeping: always store the final time; optional extras snap to
  // the nearest schedule point.
  std::vector<int> store_at(n_steps + 1, 0);
  store_at[0] = 1;
  store_at[n_steps] = 1;
  for (double ts : cfg.store_times) {
    if (ts < t0 - 1e-12 || ts > t_end + 1e-12) continue;
    int best = 0;
    for (int p = 1; p <= n_steps; ++p)
      if (std::abs(t0 + sched.times[p] - ts) < std::abs(t0 + sched.times[best] - ts)) best = p;
    store_at[best] = 1;
  }

  d.step_times_.resize(n_steps + 1);
  d.mass_series_.resize(n_steps + 1);
  d.diag_kkb_.assign(static_cast<std::size_t>(n_steps + 1) * rows, 0.0);

  std::vector<double> lo(max_n), di(max_n), up(max_n), rhs(max_n);
  std::vector<double> sig2(max_n), sig2_old(max_n);  // general surfaces only
  std::vector<double> diag_val(rows, 0.0);  // sigma^2 y^2 phi on the diagonal, new time

  auto record = [&](int p, const std::vector<double>& f) {
    d.step_times_[p] = t0 + sched.times[p];
    double total = 0.0;
    for (int j = 0; j < rows; ++j) {
      int n = d.row_nodes(j);
      const double* row = &f[d.offset_[j]];
      double rowsum = 0.5 * (row[0] + row[n - 1]);
      for (int i = 1; i < n - 1; ++i) rowsum += row[i];
      total += ((j == 0 || j == rows - 1) ? 0.5 : 1.0) * rowsum;
      d.diag_kkb_[static_cast<std::size_t>(p) * rows + j] =
          n >= 4 ? 3.0 * row[n - 2] - 3.0 * row[n - 3] + row[n - 4] : row[n - 1];
    }
    d.mass_series_[p] = total * dx * dx;
  };
  record(0, phi);

  auto store_slice = [&](int p, const std::vector<double>& f) {
    if (!store_at[p]) return;
    std::vector<double> s = f;
    for (double& v : s) {
      if (v < 0.0) {
        if (v < -1e-8) ++d.report_.clip_events;
        ++d.report_.clipped_nodes;
        v = 0.0;
      }
    }
    d.slice_times_.push_back(t0 + sched.times[p]);
    d.slices_.push_back(std::move(s));
  };
  store_slice(0, phi);

  for (int p = 0; p < n_steps; ++p) {
    const double th = sched.thetas[p];
    const double dt = sched.times[p + 1] - sched.times[p];
    const double t_new = t0 + sched.times[p + 1];
    const double t_old = t0 + sched.times[p];
    const double mu_new = market.drift(t_new);
    const double mu_old = market.drift(t_old);

    for (int j = 0; j < rows; ++j) {
      const int n = d.row_nodes(j);
      const double y = d.y_level(j);
      const double* f0 = &phi[d.offset_[j]];
      double* f1 = &phi_new[d.offset_[j]];

      const double* s2n;
      const double* s2o;
      double tau_n = 1.0, tau_o = 1.0;
      if (general) {
        for (int i = 1; i < n; ++i) {
          double x = i * dx;
          sig2[i] = surface.sigma2(x, y, t_new) * x * x;
          sig2_old[i] = surface.sigma2(x, y, t_old) * x * x;
        }
        sig2[0] = sig2_old[0] = 0.0;
        s2n = sig2.data();
        s2o = sig2_old.data();
      } else {
        s2n = s2o = &g2flat[d.offset_[j]];
        tau_n = surface.time_factor(t_new);
        tau_o = surface.time_factor(t_old);
      }

      lo[0] = 0.0;
      di[0] = 1.0;
      up[0] = 0.0;
      rhs[0] = 0.0;
      const double inv2dx = 0.5 / dx, invdx2 = 1.0 / (dx * dx);
      for (int i = 1; i < n - 1; ++i) {
        double klo = -mu_new * (i - 1) * dx * inv2dx - 0.5 * tau_n * s2n[i - 1] * invdx2;
        double kdi = tau_n * s2n[i] * invdx2;
        double kup = mu_new * (i + 1) * dx * inv2dx - 0.5 * tau_n * s2n[i + 1] * invdx2;
        lo[i] = th * dt * klo;
        di[i] = 1.0 + th * dt * kdi;
        up[i] = th * dt * kup;
        double klo0 = -mu_old * (i - 1) * dx * inv2dx - 0.5 * tau_o * s2o[i - 1] * invdx2;
        double kdi0 = tau_o * s2o[i] * invdx2;
        double kup0 = mu_old * (i + 1) * dx * inv2dx - 0.5 * tau_o * s2o[i + 1] * invdx2;
        rhs[i] = f0[i] - (1.0 - th) * dt * (klo0 * f0[i - 1] + kdi0 * f0[i] + kup0 * f0[i + 1]);
      }

      double extra = 0.0;
      if (j == 0) {
        lo[n - 1] = 0.0;
        di[n - 1] = 1.0;
        rhs[n - 1] = 0.0;  // phi(spot, spot, t) = 0 for t > 0
      } else {
        // flux condition: d_x(sigma^2 x^2 phi) + d/dy[sigma^2 y^2 phi(y,y)]
        // along the diagonal = 2 mu y phi, one-sided second order both ways
        double gd = tau_n * s2n[n - 1];  // sigma^2 y^2 on the diagonal of this row
        double cdiag = j >= 2 ? 3.0 * inv2dx : 1.0 / dx;
        di[n - 1] = 3.0 * inv2dx * gd + cdiag * gd - 2.0 * mu_new * y;
        lo[n - 1] = -4.0 * inv2dx * tau_n * s2n[n - 2];
        extra = 1.0 * inv2dx * tau_n * s2n[n - 3];
        rhs[n - 1] = j >= 2 ? inv2dx * (4.0 * diag_val[j - 1] - diag_val[j - 2])
                            : diag_val[j - 1] / dx;
      }
      up[n - 1] = 0.0;

      try {
        solve_diag_system(lo, di, up, extra, rhs, n, f1);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string("solve_kfe: ") + e.what(), j, p);
      }
      diag_val[j] = tau_n * s2n[n - 1] * f1[n - 1];
    }

    phi.swap(phi_new);
    record(p + 1, phi);
    store_slice(p + 1, phi);
  }

  d.report_.initial_mass = d.mass_series_.front();
  d.report_.final_mass = d.mass_series_.back();
  d.report_.min_mass = *std::min_element(d.mass_series_.begin(), d.mass_series_.end());
  if (d.report_.min_mass < 0.98) {
    d.report_.mass_warning = true;
    d.report_.message = "mass fell below 98% before t_end; domain truncation too tight";
  }
  return d;
}

}  // namespace maxvol
