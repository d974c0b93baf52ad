#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <atomic>
#include <memory>
#include <thread>

#include "maxvol/analytic.hpp"
#include "maxvol/backward_pde.hpp"
#include "maxvol/csv.hpp"
#include "maxvol/density.hpp"
#include "maxvol/forward_pide.hpp"
#include "maxvol/mc.hpp"
#include "maxvol/recovery.hpp"

namespace maxvol::cli {

namespace {

using nlohmann::json;

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  std::string path = cfg.out_dir + "/" + name;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file " + path);
  return out;
}

/// Relative difference when the reference has NPV above one, absolute
/// otherwise (the comparison metric used throughout).
double mixed_metric(double value, double reference) {
  double d = std::abs(value - reference);
  return std::abs(reference) > 1.0 ? d / std::abs(reference) : d;
}

ForwardSolverConfig forward_config(const RunConfig& cfg) {
  ForwardSolverConfig fc;
  fc.theta = cfg.grid.theta;
  fc.rannacher = cfg.grid.rannacher;
  fc.correction = cfg.grid.correction == "taylor" ? DiffusionCorrection::taylor_shift
                                                  : DiffusionCorrection::explicit_term;
  fc.store_every = cfg.grid.store_every;
  std::string stencil = cfg.experiment.value("stencil", "boundary-cubic");
  if (stencil == "four-point")
    fc.stencil = BoundaryStencil::four_point;
  else if (stencil == "boundary-cubic")
    fc.stencil = BoundaryStencil::boundary_cubic;
  else
    throw ConfigError("experiment.stencil must be \"boundary-cubic\" or \"four-point\"");
  return fc;
}

BackwardSolverConfig backward_config(const RunConfig& cfg) {
  BackwardSolverConfig bc;
  if (cfg.experiment.contains("backward")) {
    const json& b = cfg.experiment.at("backward");
    bc.dy = b.value("dy", bc.dy);
    bc.steps = b.value("steps", bc.steps);
    bc.theta = b.value("theta", bc.theta);
    bc.rannacher = b.value("rannacher", bc.rannacher);
  }
  return bc;
}

KfeConfig kfe_config(const RunConfig& cfg) {
  KfeConfig kc;
  if (cfg.experiment.contains("density")) {
    const json& d = cfg.experiment.at("density");
    kc.dx = d.value("dx", kc.dx);
    kc.b_max = d.value("b_max", kc.b_max);
    kc.steps = d.value("steps", kc.steps);
    kc.theta = d.value("theta", kc.theta);
    kc.rannacher = d.value("rannacher", kc.rannacher);
    kc.mollifier_width = d.value("mollifier_width", kc.mollifier_width);
    kc.warm_start = d.value("warm_start", kc.warm_start);
    kc.warm_start_time = d.value("warm_start_time", kc.warm_start_time);
    if (d.contains("store_times")) kc.store_times = d.at("store_times").get<std::vector<double>>();
  }
  return kc;
}

std::vector<double> ladder_strikes(const RunConfig& cfg, double barrier) {
  if (cfg.experiment.contains("ladder") && cfg.experiment.at("ladder").contains("strikes"))
    return cfg.experiment.at("ladder").at("strikes").get<std::vector<double>>();
  std::vector<double> ks;
  for (int i = 0; i <= 15; ++i) ks.push_back(barrier * i / 15.0);
  return ks;
}

std::vector<double> axis_values(const json& spec) {
  if (spec.is_array()) return spec.get<std::vector<double>>();
  double from = spec.at("from").get<double>();
  double to = spec.at("to").get<double>();
  int count = spec.at("count").get<int>();
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i)
    v[i] = count == 1 ? from : from + (to - from) * i / (count - 1);
  return v;
}

struct CheckState {
  bool enabled = false;
  bool breached = false;

  void require(bool ok, const std::string& what) {
    if (!enabled) return;
    if (!ok) {
      breached = true;
      std::cerr << "check failed: " << what << "\n";
    }
  }
  int exit_code() const { return breached ? kExitToleranceBreach : kExitOk; }
};

/// Optional per-strike reference table: [[K, price], ...] under the metric
/// tolerances of the check block.
void check_reference(CheckState& st, const json& check, const std::vector<double>& strikes,
                     const Eigen::ArrayXd& prices) {
  if (!check.contains("reference")) return;
  double rel_tol = check.value("rel_tol", 5e-3);
  double abs_tol = check.value("abs_tol", 5e-4);
  for (const auto& row : check.at("reference")) {
    double k = row.at(0).get<double>(), ref = row.at(1).get<double>();
    for (std::size_t i = 0; i < strikes.size(); ++i) {
      if (std::abs(strikes[i] - k) > 1e-9) continue;
      double tol = std::abs(ref) > 1.0 ? rel_tol : abs_tol;
      st.require(mixed_metric(prices[i], ref) <= tol,
                 "strike " + csv::num(k) + ": price " + csv::num(prices[i]) + " vs reference " +
                     csv::num(ref));
    }
  }
}

}  // namespace

int cmd_price_forward(const RunConfig& cfg, bool check) {
  MarketParams mkt = cfg.market();
  auto surf = cfg.surface.build(cfg.spot);
  ForwardGrid grid = build_forward_grid(cfg.spot, cfg.grid.b_max, cfg.grid.t_max,
                                        cfg.grid.target_dk, cfg.grid.target_dt);
  PriceCube cube = solve_all(grid, *surf, mkt, forward_config(cfg));

  double barrier = cfg.grid.b_max, maturity = cfg.grid.t_max;
  if (cfg.experiment.contains("ladder")) {
    const json& l = cfg.experiment.at("ladder");
    barrier = l.value("barrier", barrier);
    maturity = l.value("maturity", maturity);
  }
  std::vector<double> ks = ladder_strikes(cfg, barrier);
  Eigen::ArrayXd prices(ks.size());
  auto out = open_out(cfg, "ladder.csv");
  csv::header(out, "ladder", "K,B,T,price");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    prices[i] = cube.lookup(ks[i], barrier, maturity);
    out << csv::num(ks[i]) << ',' << csv::num(barrier) << ',' << csv::num(maturity) << ','
        << csv::num(prices[i]) << '\n';
  }
  if (cfg.experiment.value("write_cube_csv", false)) {
    auto cout_ = open_out(cfg, "cube.csv");
    cube.write_csv(cout_);
  }
  if (cfg.experiment.value("write_cube_binary", false))
    cube.write_binary(cfg.out_dir + "/cube.bin");

  CheckState st;
  st.enabled = check;
  const json chk = cfg.experiment.value("check", json::object());
  check_reference(st, chk, ks, prices);
  if (cfg.surface.kind == "constant" && check) {
    double tol = chk.value("analytic_tol", 2e-3);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      double ana = up_and_out_call(cfg.spot, ks[i], barrier, maturity, cfg.surface.constant_vol,
                                   mkt.rate.value(0.0), mkt.dividend.value(0.0));
      st.require(mixed_metric(prices[i], ana) <= tol,
                 "analytic check at K=" + csv::num(ks[i]));
    }
  }
  std::cout << "price-forward: " << ks.size() << " ladder strikes at B=" << barrier
            << " written to " << cfg.out_dir << "/ladder.csv\n";
  return st.exit_code();
}

int cmd_price_backward(const RunConfig& cfg, bool check) {
  MarketParams mkt = cfg.market();
  auto surf = cfg.surface.build(cfg.spot);
  BackwardSolverConfig bc = backward_config(cfg);
  auto out = open_out(cfg, "deals.csv");
  csv::header(out, "backward-deals", "K,B,T,price,knocked_out,runtime_s");

  CheckState st;
  st.enabled = check;
  const json chk = cfg.experiment.value("check", json::object());
  if (!cfg.experiment.contains("deals")) throw ConfigError("price-backward: experiment.deals missing");
  for (const auto& d : cfg.experiment.at("deals")) {
    BackwardDeal deal{d.at("strike").get<double>(), d.at("barrier").get<double>(),
                      d.value("maturity", cfg.grid.t_max)};
    double t0 = now_seconds();
    BackwardResult r = price_backward(deal, *surf, mkt, bc);
    double dt = now_seconds() - t0;
    out << csv::num(deal.strike) << ',' << csv::num(deal.barrier) << ','
        << csv::num(deal.maturity) << ',' << csv::num(r.price) << ',' << (r.knocked_out ? 1 : 0)
        << ',' << csv::num(dt) << '\n';
    if (check && cfg.surface.kind == "constant") {
      double ana = up_and_out_call(cfg.spot, deal.strike, deal.barrier, deal.maturity,
                                   cfg.surface.constant_vol, mkt.rate.value(0.0),
                                   mkt.dividend.value(0.0));
      st.require(mixed_metric(r.price, ana) <= chk.value("analytic_tol", 2e-3),
                 "analytic check at K=" + csv::num(deal.strike));
    }
    if (chk.contains("reference")) {
      std::vector<double> one{deal.strike};
      Eigen::ArrayXd p(1);
      p[0] = r.price;
      check_reference(st, chk, one, p);
    }
  }
  std::cout << "price-backward: deals written to " << cfg.out_dir << "/deals.csv\n";
  return st.exit_code();
}

int cmd_compare(const RunConfig& cfg, bool check) {
  MarketParams mkt = cfg.market();
  auto surf = cfg.surface.build(cfg.spot);
  const json& exp = cfg.experiment;
  std::vector<double> strikes = exp.contains("strikes")
                                    ? axis_values(exp.at("strikes"))
                                    : axis_values(json{{"from", 0.0}, {"to", 119.0}, {"count", 120}});
  std::vector<double> barriers = exp.contains("barriers")
                                     ? axis_values(exp.at("barriers"))
                                     : axis_values(json{{"from", 100.5}, {"to", 120.0}, {"count", 40}});
  double maturity = exp.value("maturity", cfg.grid.t_max);

  ForwardGrid grid = build_forward_grid(cfg.spot, cfg.grid.b_max, cfg.grid.t_max,
                                        cfg.grid.target_dk, cfg.grid.target_dt);
  PriceCube cube = solve_all(grid, *surf, mkt, forward_config(cfg));

  BackwardSolverConfig bc = backward_config(cfg);
  std::vector<Eigen::ArrayXd> bwd(barriers.size());
  {
    std::atomic<std::size_t> next{0};
    int threads = std::max(1u, std::thread::hardware_concurrency());
    auto worker = [&]() {
      for (;;) {
        std::size_t b = next.fetch_add(1);
        if (b >= barriers.size()) return;
        bwd[b] = price_backward_ladder(strikes, barriers[b], maturity, *surf, mkt, bc);
      }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  auto out = open_out(cfg, "panel.csv");
  csv::header(out, "compare-panel", "K,B,T,forward,backward,metric");
  double sum = 0.0, worst = 0.0, worst_k = 0.0, worst_b = 0.0;
  long count = 0;
  for (std::size_t b = 0; b < barriers.size(); ++b) {
    for (std::size_t i = 0; i < strikes.size(); ++i) {
      if (strikes[i] >= barriers[b]) continue;
      double f = cube.lookup(strikes[i], barriers[b], maturity);
      double w = bwd[b][i];
      double m = mixed_metric(f, w);
      out << csv::num(strikes[i]) << ',' << csv::num(barriers[b]) << ',' << csv::num(maturity)
          << ',' << csv::num(f) << ',' << csv::num(w) << ',' << csv::num(m) << '\n';
      sum += m;
      ++count;
      if (m > worst) {
        worst = m;
        worst_k = strikes[i];
        worst_b = barriers[b];
      }
    }
  }
  double avg = count ? sum / count : 0.0;
  auto sout = open_out(cfg, "summary.csv");
  csv::header(sout, "compare-summary", "points,avg_metric,max_metric,max_at_K,max_at_B");
  sout << count << ',' << csv::num(avg) << ',' << csv::num(worst) << ',' << csv::num(worst_k)
       << ',' << csv::num(worst_b) << '\n';
  std::cout << "compare: " << count << " points, avg=" << csv::num(avg)
            << " max=" << csv::num(worst) << " (K=" << worst_k << ", B=" << worst_b << ")\n";

  CheckState st;
  st.enabled = check;
  const json chk = exp.value("check", json::object());
  st.require(avg <= chk.value("avg_tol", 1e-4), "average metric " + csv::num(avg));
  st.require(worst <= chk.value("max_tol", 5e-4), "max metric " + csv::num(worst));
  return st.exit_code();
}

int cmd_recover(const RunConfig& cfg, bool check) {
  MarketParams mkt = cfg.market();
  auto surf = cfg.surface.build(cfg.spot);
  if (cfg.grid.store_every < 1)
    throw ConfigError("recover: grid.store_every must be >= 1 so the cube keeps time slices");
  ForwardGrid grid = build_forward_grid(cfg.spot, cfg.grid.b_max, cfg.grid.t_max,
                                        cfg.grid.target_dk, cfg.grid.target_dt);
  PriceCube cube = solve_all(grid, *surf, mkt, forward_config(cfg));
  double tau_den = cfg.experiment.value("tau_den", -1.0);
  RecoveredSurface rec = recover_sigma(cube, tau_den);

  double t_min = cfg.experiment.value("t_min", 0.25);
  int stride = cfg.experiment.value("csv_stride", 1);
  auto out = open_out(cfg, "recovered.csv");
  csv::header(out, "recovered-surface", "K,B,T,sigma_hat,valid");
  double worst = 0.0, sum = 0.0;
  long tested = 0;
  // coverage of the quoted interior region (B > spot, spot/2 < K < B)
  long region = 0, region_valid = 0;
  for (int s = 0; s < cube.slices(); ++s) {
    double t = cube.slice_time(s);
    for (int j = 0; j <= grid.p; j += stride) {
      for (int i = 0; i < grid.layer_size(j); i += stride) {
        bool valid = rec.valid(s, j, i);
        out << csv::num(grid.strike(i)) << ',' << csv::num(grid.barrier(j)) << ',' << csv::num(t)
            << ',' << csv::num(valid ? rec.sigma(s, j, i) : 0.0) << ',' << (valid ? 1 : 0)
            << '\n';
      }
    }
    if (s < 2) continue;
    for (int j = 1; j < grid.p; ++j) {
      for (int i = 1; i < grid.layer_size(j) - 1; ++i) {
        double k = grid.strike(i), b = grid.barrier(j);
        bool in_region = k > 0.5 * cfg.spot && k < b;
        if (in_region) ++region;
        if (!rec.valid(s, j, i)) continue;
        if (in_region) ++region_valid;
        if (t < t_min) continue;
        double rel = std::abs(rec.sigma(s, j, i) / surf->sigma(k, b, t) - 1.0);
        sum += rel;
        ++tested;
        worst = std::max(worst, rel);
      }
    }
  }
  double coverage = region ? static_cast<double>(region_valid) / region : 0.0;
  auto rout = open_out(cfg, "recover_report.csv");
  csv::header(rout, "recover-report",
              "valid,tested,avg_rel_err,max_rel_err,region_coverage,negative_variance,small_denominator");
  rout << rec.valid_count << ',' << tested << ',' << csv::num(tested ? sum / tested : 0.0) << ','
       << csv::num(worst) << ',' << csv::num(coverage) << ',' << rec.negative_variance_count
       << ',' << rec.small_denominator_count << '\n';
  std::cout << "recover: " << rec.valid_count << " valid nodes, round-trip max rel err "
            << csv::num(worst) << " (T >= " << t_min << "), region coverage "
            << csv::num(coverage) << "\n";

  CheckState st;
  st.enabled = check;
  st.require(tested > 0, "no masked nodes to test");
  st.require(worst <= cfg.experiment.value("check", json::object()).value("tol", 0.01),
             "round-trip max rel err " + csv::num(worst));
  return st.exit_code();
}

int cmd_density(const RunConfig& cfg, bool check) {
  MarketParams mkt = cfg.market();
  auto surf = cfg.surface.build(cfg.spot);
  KfeConfig kc = kfe_config(cfg);
  DensitySolution den = solve_kfe(*surf, mkt, kc, cfg.grid.t_max);

  auto mout = open_out(cfg, "mass.csv");
  csv::header(mout, "density-mass", "t,mass");
  for (std::size_t p = 0; p < den.step_times().size(); ++p)
    mout << csv::num(den.step_times()[p]) << ',' << csv::num(den.mass_series()[p]) << '\n';

  const json& exp = cfg.experiment;
  bool compare_fwd = exp.value("compare_forward", false);
  std::unique_ptr<PriceCube> cube;
  if (compare_fwd) {
    ForwardGrid grid = build_forward_grid(cfg.spot, cfg.grid.b_max, cfg.grid.t_max,
                                          cfg.grid.target_dk, cfg.grid.target_dt);
    cube = std::make_unique<PriceCube>(solve_all(grid, *surf, mkt, forward_config(cfg)));
  }

  CheckState st;
  st.enabled = check;
  const json chk = exp.value("check", json::object());
  auto pout = open_out(cfg, "price_check.csv");
  csv::header(pout, "density-prices", "K,B,T,density_price,reference,diff");
  double worst_diff = 0.0;
  if (exp.contains("deals")) {
    for (const auto& d : exp.at("deals")) {
      double k = d.at(0).get<double>(), b = d.at(1).get<double>();
      double p = den.price(k, b, cfg.grid.t_max);
      double ref = std::numeric_limits<double>::quiet_NaN();
      if (compare_fwd)
        ref = cube->lookup(k, b, cfg.grid.t_max);
      else if (cfg.surface.kind == "constant")
        ref = up_and_out_call(cfg.spot, k, b, cfg.grid.t_max, cfg.surface.constant_vol,
                              mkt.rate.value(0.0), mkt.dividend.value(0.0));
      double diff = std::isnan(ref) ? 0.0 : std::abs(p - ref);
      worst_diff = std::max(worst_diff, diff);
      pout << csv::num(k) << ',' << csv::num(b) << ',' << csv::num(cfg.grid.t_max) << ','
           << csv::num(p) << ',' << csv::num(ref) << ',' << csv::num(diff) << '\n';
    }
    st.require(worst_diff <= chk.value("price_tol", 1e-3),
               "density price diff " + csv::num(worst_diff));
  }
  if (exp.value("write_density_csv", false)) {
    int stride = exp.value("csv_stride", 1);
    auto dout = open_out(cfg, "density.csv");
    csv::header(dout, "density-slices", "x,y,t,phi");
    for (int s = 0; s < den.slices(); ++s)
      for (int j = 0; j < den.rows(); j += stride)
        for (int i = 0; i < den.row_nodes(j); i += stride)
          dout << csv::num(i * den.dx()) << ',' << csv::num(den.y_level(j)) << ','
               << csv::num(den.slice_time(s)) << ',' << csv::num(den.value(s, j, i)) << '\n';
  }

  double final_mass = den.report().final_mass;
  std::cout << "density: final mass " << csv::num(final_mass) << ", min mass "
            << csv::num(den.report().min_mass) << ", clipped " << den.report().clipped_nodes
            << " nodes";
  if (den.report().mass_warning) std::cout << " [warning: " << den.report().message << "]";
  std::cout << "\n";
  st.require(final_mass >= chk.value("mass_min", 0.99) &&
                 final_mass <= chk.value("mass_max", 1.0 + 1e-6),
             "final mass " + csv::num(final_mass));
  return st.exit_code();
}

int cmd_mc(const RunConfig& cfg, bool check) {
  MarketParams mkt = cfg.market();
  auto surf = cfg.surface.build(cfg.spot);
  McConfig mc;
  mc.seed = cfg.seed;
  const json& exp = cfg.experiment;
  if (exp.contains("mc")) {
    const json& m = exp.at("mc");
    mc.paths = m.value("paths", mc.paths);
    mc.steps_per_year = m.value("steps_per_year", mc.steps_per_year);
    mc.antithetic = m.value("antithetic", mc.antithetic);
    mc.threads = m.value("threads", mc.threads);
    std::string crossing = m.value("crossing", "bridge");
    if (crossing == "discrete")
      mc.crossing = BarrierCrossing::discrete_max;
    else if (crossing == "bridge")
      mc.crossing = BarrierCrossing::brownian_bridge;
    else
      throw ConfigError("mc.crossing must be \"bridge\" or \"discrete\"");
  }
  if (!exp.contains("deals")) throw ConfigError("mc: experiment.deals missing");

  CheckState st;
  st.enabled = check;
  const json chk = exp.value("check", json::object());
  auto out = open_out(cfg, "mc.csv");
  csv::header(out, "mc-estimates", "K,B,T,estimate,std_error,paths");
  for (const auto& d : exp.at("deals")) {
    BackwardDeal deal{d.at("strike").get<double>(), d.at("barrier").get<double>(),
                      d.value("maturity", cfg.grid.t_max)};
    McEstimate est = simulate_price(deal, *surf, mkt, mc);
    out << csv::num(deal.strike) << ',' << csv::num(deal.barrier) << ','
        << csv::num(deal.maturity) << ',' << csv::num(est.value) << ','
        << csv::num(est.std_error) << ',' << est.paths << '\n';
    if (check && cfg.surface.kind == "constant" && deal.barrier > cfg.spot) {
      double ana = up_and_out_call(cfg.spot, deal.strike, deal.barrier, deal.maturity,
                                   cfg.surface.constant_vol, mkt.rate.value(0.0),
                                   mkt.dividend.value(0.0));
      double band = chk.value("se_band", 3.0) * std::max(est.std_error, 1e-12);
      st.require(std::abs(est.value - ana) <= band,
                 "MC vs analytic at K=" + csv::num(deal.strike));
    }
  }
  std::cout << "mc: estimates written to " << cfg.out_dir << "/mc.csv\n";
  return st.exit_code();
}

int cmd_convergence(const RunConfig& cfg, bool check) {
  MarketParams mkt = cfg.market();
  auto surf = cfg.surface.build(cfg.spot);
  const json& exp = cfg.experiment;
  double maturity = exp.value("maturity", cfg.grid.t_max);
  std::vector<std::pair<double, double>> probes;
  if (exp.contains("probes")) {
    for (const auto& p : exp.at("probes")) probes.emplace_back(p.at(0), p.at(1));
  } else {
    probes = {{0.0, cfg.grid.b_max}, {0.75 * cfg.spot, cfg.grid.b_max},
              {cfg.spot, cfg.grid.b_max}};
  }
  CheckState st;
  st.enabled = check;
  const json chk = exp.value("check", json::object());

  auto ladder_err = [&](const PriceCube& cube, const PriceCube& ref) {
    double err = 0.0;
    for (auto& [k, b] : probes)
      err = std::max(err, std::abs(cube.lookup(k, b, maturity) - ref.lookup(k, b, maturity)));
    return err;
  };
  auto out = open_out(cfg, "convergence.csv");
  csv::header(out, "convergence", "axis,h,error,order");

  auto run_axis = [&](const std::string& axis) {
    const json a = exp.value(axis, json::object());
    std::vector<double> hs = a.contains("values")
                                 ? a.at("values").get<std::vector<double>>()
                                 : (axis == "dk" ? std::vector<double>{0.4, 0.2, 0.1}
                                                 : std::vector<double>{0.04, 0.02, 0.01});
    double href = a.value("reference", axis == "dk" ? 0.025 : 0.00125);
    double fixed = a.value(axis == "dk" ? "dt" : "dk", axis == "dk" ? 0.002 : 0.1);
    auto solve_at = [&](double dk, double dt) {
      ForwardGrid g = build_forward_grid(cfg.spot, cfg.grid.b_max, cfg.grid.t_max, dk, dt);
      return solve_all(g, *surf, mkt, forward_config(cfg));
    };
    PriceCube ref = axis == "dk" ? solve_at(href, fixed) : solve_at(fixed, href);
    std::vector<double> errs;
    for (double h : hs)
      errs.push_back(ladder_err(axis == "dk" ? solve_at(h, fixed) : solve_at(fixed, h), ref));
    double order_min = 1e9;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      double order = 0.0;
      if (i > 0) {
        order = std::log(errs[i - 1] / errs[i]) / std::log(hs[i - 1] / hs[i]);
        order_min = std::min(order_min, order);
      }
      out << axis << ',' << csv::num(hs[i]) << ',' << csv::num(errs[i]) << ','
          << csv::num(i > 0 ? order : 0.0) << '\n';
    }
    std::cout << "convergence " << axis << ": min empirical order "
              << csv::num(order_min == 1e9 ? 0.0 : order_min) << "\n";
    return order_min;
  };

  std::string kind = exp.value("kind", "both");
  if (kind == "dk" || kind == "both")
    st.require(run_axis("dk") >= chk.value("dk_order", 0.9), "dk order");
  if (kind == "dt" || kind == "both")
    st.require(run_axis("dt") >= chk.value("dt_order", 1.8), "dt order");
  return st.exit_code();
}

nlohmann::json reference_config() {
  RunConfig def;
  json j = def.to_json();
  j["experiment"] = {
      {"ladder", {{"barrier", 120.0}, {"maturity", 1.0}, {"strikes", json::array()}}},
      {"stencil", "boundary-cubic"},
      {"write_cube_csv", false},
      {"write_cube_binary", false},
      {"deals", json::array()},
      {"backward", {{"dy", 0.02}, {"steps", 1000}, {"theta", 0.5}, {"rannacher", true}}},
      {"strikes", {{"from", 0.0}, {"to", 119.0}, {"count", 120}}},
      {"barriers", {{"from", 100.5}, {"to", 120.0}, {"count", 40}}},
      {"maturity", 1.0},
      {"tau_den", -1.0},
      {"t_min", 0.25},
      {"csv_stride", 1},
      {"density",
       {{"dx", 0.25},
        {"b_max", 300.0},
        {"steps", 500},
        {"theta", 1.0},
        {"rannacher", false},
        {"mollifier_width", 4.0},
        {"warm_start", false},
        {"warm_start_time", 0.01},
        {"store_times", json::array()}}},
      {"compare_forward", false},
      {"write_density_csv", false},
      {"mc",
       {{"paths", 100000},
        {"steps_per_year", 512},
        {"antithetic", false},
        {"crossing", "bridge"},
        {"threads", 0}}},
      {"kind", "both"},
      {"dk", {{"values", {0.4, 0.2, 0.1}}, {"reference", 0.025}, {"dt", 0.002}}},
      {"dt", {{"values", {0.04, 0.02, 0.01}}, {"reference", 0.00125}, {"dk", 0.1}}},
      {"probes", json::array()},
      {"check", json::object()},
  };
  return j;
}

}  // namespace maxvol::cli
