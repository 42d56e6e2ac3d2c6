// Acceptance suite: runs every shipping criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code 0 only when every
// criterion holds.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cantor_measure.hpp"
#include "estimators.hpp"
#include "experiments.hpp"
#include "integrate.hpp"
#include "recurrence.hpp"
#include "rng.hpp"
#include "solenoid_measure.hpp"
#include "systems.hpp"

using namespace ebdim;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 2026;
constexpr int kThreads = 0;  // hardware

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
    return r;
  };
  const std::vector<double> ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += ra[i];
    sb += rb[i];
    saa += ra[i] * ra[i];
    sbb += rb[i] * rb[i];
    sab += ra[i] * rb[i];
  }
  return (n * sab - sa * sb) /
         std::sqrt((n * saa - sa * sa) * (n * sbb - sb * sb));
}

// independent cylinder-enumeration oracle (depth-n refinement of boundary
// chains only)
double brute_cantor(double lo, double hi, double cl, double ch, int depth,
                    int max_depth) {
  if (ch <= lo || cl >= hi) return 0.0;
  if (cl >= lo && ch <= hi) return std::pow(2.0, -depth);
  if (depth == max_depth) return 0.5 * std::pow(2.0, -depth);
  const double third = (ch - cl) / 3.0;
  return brute_cantor(lo, hi, cl, cl + third, depth + 1, max_depth) +
         brute_cantor(lo, hi, ch - third, ch, depth + 1, max_depth);
}

// ---------------------------------------------------------------------------

Check criterion1_cantor_oracle() {
  Check c;
  CounterRng rng(kSeed);
  const double tol = std::pow(2.0, -28);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const CantorPoint z = CantorPoint::random(64, rng);
    const double r = std::pow(10.0, -10.0 * rng.uniform()) * 0.9;
    const double a = cantor_ball_measure(z, r);
    const double b = brute_cantor(z.value() - r, z.value() + r, 0.0, 1.0, 0, 30);
    worst = std::max(worst, std::fabs(a - b));
  }
  c.expect(worst < tol, "worst |closed-brute| = " + fmt(worst));
  c.note("max deviation " + fmt(worst) + " vs 2^-28 = " + fmt(tol));
  return c;
}

Check criterion2_cantor_regular_variation() {
  Check c;
  CounterRng rng(kSeed + 1);
  // b = 1/3 must return exactly 0.5; sampled at triadic radii, where the
  // self-similar cancellation is exact for every center
  int exact = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const CantorPoint z = CantorPoint::random(64, rng);
    const int m = 1 + static_cast<int>(rng.uniform() * 20);
    if (cantor_ratio(z, std::pow(3.0, -m), 1.0 / 3.0) == 0.5) ++exact;
  }
  c.expect(exact == 100, "b=1/3 exact hits " + std::to_string(exact) + "/100");

  // the endpoint configuration at b = 1/2 returns exactly 1
  int exact_half = 0;
  for (int m = 2; m <= 11; ++m) {
    std::vector<std::uint8_t> d(48, 0);
    for (int i = 0; i + 1 < m; ++i)
      d[static_cast<std::size_t>(i)] = rng.bernoulli() ? 2 : 0;
    d[static_cast<std::size_t>(m - 1)] = 0;  // gap right, all-zero tail
    const CantorPoint z = CantorPoint::from_digits(d);
    if (cantor_ratio(z, 2.0 * std::pow(3.0, -m), 0.5) == 1.0) ++exact_half;
  }
  c.expect(exact_half == 10,
           "endpoint config hits " + std::to_string(exact_half) + "/10");

  // empirical zoom: R oscillates through the final three decades
  ExperimentConfig cfg;
  cfg.experiment = "zoom";
  cfg.system = "cantor-shift";
  cfg.seed = kSeed;
  cfg.iters = 10000000;
  cfg.k = 5000;
  cfg.threads = kThreads;
  const ZoomRunOutput out = run_zoom_like(cfg);
  const auto& cps = out.traces[0].checkpoints;
  c.expect(!out.traces[0].partial && cps.size() >= 4, "zoom trace too short");
  if (c.ok) {
    const double r_final = cps.back().r;
    double mx = -1.0, mn = 2.0;
    for (const auto& cp : cps) {
      if (cp.r > 1000.0 * r_final) continue;
      mx = std::max(mx, cp.R_half);
      mn = std::min(mn, cp.R_half);
    }
    c.expect(mx - mn >= 0.1, "R oscillation " + fmt(mx - mn) + " < 0.1");
    c.note("R_half span over final 3 decades = " + fmt(mx - mn));
  }
  return c;
}

Check criterion3_fat_cantor() {
  Check c;
  ExperimentConfig cfg;
  cfg.experiment = "ensemble";
  cfg.system = "fat-cantor";
  cfg.seed = kSeed;
  cfg.refs = 8;
  cfg.iters = 1000000;  // sampled points
  cfg.k = 5000;
  cfg.threads = kThreads;
  const ZoomRunOutput out = run_zoom_like(cfg);
  std::vector<double> r_means, ebd_finals;
  for (const auto& t : out.traces) {
    if (t.partial || t.checkpoints.empty()) continue;
    const double r_final = t.checkpoints.back().r;
    std::vector<double> rs;
    for (const auto& cp : t.checkpoints)
      if (cp.r <= 10.0 * r_final) rs.push_back(cp.R_half);
    if (!rs.empty()) r_means.push_back(mean_of(rs));
    ebd_finals.push_back(t.checkpoints.back().ebd_dim);
  }
  c.expect(r_means.size() >= 6, "too few complete traces");
  if (c.ok) {
    const double r_mean = mean_of(r_means);
    const double ebd = mean_of(ebd_finals);
    c.expect(r_mean >= 0.45 && r_mean <= 0.55,
             "final-decade R mean " + fmt(r_mean) + " outside [0.45, 0.55]");
    c.expect(ebd >= 0.9 && ebd <= 1.1,
             "final ebd " + fmt(ebd) + " outside [0.9, 1.1]");
    c.note("R=" + fmt(r_mean) + ", ebd=" + fmt(ebd));
  }
  return c;
}

Check criterion4_henon() {
  Check c;
  ExperimentConfig ens;
  ens.experiment = "ensemble";
  ens.system = "henon";
  ens.seed = kSeed;
  ens.refs = 200;
  ens.iters = 1000000;
  ens.k = 5000;
  ens.threads = kThreads;
  const ZoomRunOutput eo = run_zoom_like(ens);
  std::vector<double> curve;
  for (const auto& row : eo.agg) curve.push_back(row.mean_ebd);
  c.expect(!curve.empty(), "empty ensemble aggregate");
  const double ens_mean = curve.empty() ? 0.0 : mean_of(curve);
  c.expect(ens_mean >= 1.15 && ens_mean <= 1.35,
           "ensemble mean " + fmt(ens_mean) + " outside [1.15, 1.35]");

  ExperimentConfig orb = ens;
  orb.mode = "orbit";
  const ZoomRunOutput oo = run_zoom_like(orb);
  c.expect(oo.notes.contains("mean_series_ebd"), "missing series estimate");
  const double orb_mean = oo.notes.value("mean_series_ebd", 0.0);
  c.expect(orb_mean >= 1.25 && orb_mean <= 1.47,
           "single-orbit mean " + fmt(orb_mean) + " outside [1.25, 1.47]");
  c.expect(orb_mean > ens_mean, "orbit estimate not above ensemble estimate");
  c.note("ensemble=" + fmt(ens_mean) + ", orbit=" + fmt(orb_mean));
  return c;
}

Check criterion5_solenoid_analytic() {
  Check c;
  const int k = 30;
  const double a = 0.076;
  SolenoidQuery q;
  q.depth = k;
  q.contraction = a;
  q.section_angle = 0.0;
  q.center_branch = solenoid_nearest_branch(k, a, 0.0, {0.0, 0.0}, {0.4, 0.2});

  // slope over 14 decades
  std::vector<double> lx, ly;
  const int n = 300;
  for (int i = 0; i < n; ++i) {
    const double logr = -15.0 + 14.0 * i / (n - 1);
    q.radius = std::pow(10.0, logr);
    const double mu = solenoid_ball_measure(q);
    if (!(mu > 0.0)) {
      c.expect(false, "zero measure at log r = " + fmt(logr));
      return c;
    }
    lx.push_back(logr);
    ly.push_back(std::log10(mu));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  c.expect(std::fabs(slope - 1.2689) < 0.01,
           "slope " + fmt(slope) + " not within 0.01 of 1.2689");

  // kink spacing of R(r) local maxima
  const int ng = 1200;
  std::vector<double> rr(ng), ratio(ng);
  for (int i = 0; i < ng; ++i) {
    const double r = std::pow(10.0, -9.0 + 8.0 * i / (ng - 1));
    q.radius = r;
    const double mu = solenoid_ball_measure(q);
    q.radius = r / 2.0;
    ratio[static_cast<std::size_t>(i)] = solenoid_ball_measure(q) / mu;
    rr[static_cast<std::size_t>(i)] = r;
  }
  std::vector<double> maxima;
  for (int i = 2; i + 2 < ng; ++i)
    if (ratio[i] > ratio[i - 1] && ratio[i] > ratio[i + 1] &&
        ratio[i] > ratio[i - 2] && ratio[i] > ratio[i + 2])
      maxima.push_back(rr[static_cast<std::size_t>(i)]);
  c.expect(maxima.size() >= 4,
           "found only " + std::to_string(maxima.size()) + " kinks");
  double worst = 0.0;
  for (std::size_t i = 1; i < maxima.size(); ++i) {
    const double spacing = maxima[i - 1] / maxima[i];  // factor toward smaller r
    worst = std::max(worst, std::fabs(spacing - a) / a);
  }
  c.expect(worst < 0.10, "kink spacing off by " + fmt(100.0 * worst) + "%");
  c.note("slope=" + fmt(slope) + ", worst kink spacing dev=" +
         fmt(100.0 * worst) + "%");
  return c;
}

Check criterion6_lorenz63() {
  Check c;
  ExperimentConfig cfg;
  cfg.experiment = "ensemble";
  cfg.system = "lorenz63";
  cfg.seed = kSeed;
  cfg.refs = 100;
  cfg.total_time = 20000.0;
  cfg.dt = 0.01;
  cfg.k = 200;
  cfg.threads = kThreads;
  const ZoomRunOutput out = run_zoom_like(cfg);
  std::vector<double> curve;
  for (const auto& row : out.agg) curve.push_back(row.mean_ebd);
  c.expect(curve.size() >= 3, "aggregate too short");
  const double mean = curve.empty() ? 0.0 : mean_of(curve);
  c.expect(mean >= 1.9 && mean <= 2.2,
           "ensemble mean " + fmt(mean) + " outside [1.9, 2.2]");

  // transit audit on one reference: every ball transit at the final radius
  // contributes exactly one kept point
  const Rhs rhs = [](const Vec& y, double t, Vec& dy) {
    flow_rhs("lorenz63", {}, y, t, dy);
  };
  Vec y = integrate_to(rhs, Vec{1.0, 1.0, 20.0}, 0.0, 0.01, 10000);
  const Vec zeta = y;
  Vec y0 = integrate_to(rhs, y, 0.0, 0.01, 50000);
  FlowZoomParams fp;
  fp.dt = 0.01;
  fp.total_time = 5000.0;
  fp.k = 120;
  const ContinuousZoomResult res = continuous_zoom(rhs, y0, 0.0, zeta, fp);
  c.expect(!res.partial, "audit zoom is partial");
  if (!res.partial) {
    const double r_scan = res.final_radius * (1.0 + 1e-9);
    TransitScanner scanner(zeta, r_scan);
    integrate_stream(rhs, y0, 0.0, fp.dt,
                     static_cast<std::int64_t>(fp.total_time / fp.dt),
                     [&](const FlowSegment& seg) {
                       scanner.feed(seg);
                       return true;
                     });
    const TransitScan scan = scanner.finish();
    std::size_t matched = 0;
    std::size_t eligible = 0;  // transits whose minimum is inside the final ball
    bool dupes = false;
    for (const auto& tr : scan.transits) {
      int inside = 0;
      for (const auto& kept : res.kept)
        if (kept.t >= tr.t_entry && kept.t <= tr.t_exit) ++inside;
      if (inside > 1) dupes = true;
      matched += static_cast<std::size_t>(inside);
      if (tr.d_min <= res.final_radius) ++eligible;
    }
    c.expect(!dupes, "a transit holds more than one kept point");
    c.expect(matched == res.kept.size(),
             "kept points outside any transit: " +
                 std::to_string(res.kept.size() - matched));
    c.expect(eligible == res.kept.size(),
             "transit/kept count mismatch: " + std::to_string(eligible) +
                 " vs " + std::to_string(res.kept.size()));
    c.note("mean=" + fmt(mean) + ", transits=" + std::to_string(eligible) +
           ", kept=" + std::to_string(res.kept.size()));
  }
  return c;
}

Check criterion7_lorenz96() {
  Check c;
  ExperimentConfig cfg;
  cfg.experiment = "ensemble";
  cfg.system = "lorenz96";
  cfg.seed = kSeed;
  cfg.refs = 60;
  cfg.total_time = 100000.0;
  cfg.dt = 0.005;
  cfg.k = 200;
  cfg.threads = kThreads;
  const ZoomRunOutput out = run_zoom_like(cfg);
  // the estimate distribution stabilizes below r ~ 10^0.5
  std::vector<double> curve;
  for (const auto& row : out.agg)
    if (row.log10_r <= 0.5) curve.push_back(row.mean_ebd);
  c.expect(curve.size() >= 3, "too few stabilized aggregate rows");
  const double mean = curve.empty() ? 0.0 : mean_of(curve);
  c.expect(mean >= 2.8 && mean <= 3.25,
           "ensemble mean " + fmt(mean) + " outside [2.8, 3.25]");
  c.note("mean=" + fmt(mean) + " over " + std::to_string(curve.size()) + " rows");
  return c;
}

Check criterion8_ei_sweep() {
  Check c;
  ExperimentConfig cfg;
  cfg.experiment = "ei-sweep";
  cfg.system = "lorenz63";
  cfg.seed = kSeed;
  cfg.refs = 40;
  cfg.t_len = 1000.0;
  cfg.q = 0.99;
  cfg.threads = kThreads;
  const auto rows = run_ei_sweep(cfg);

  std::vector<double> dt_f, th_f, tc_f, dt_v, th_v, tc_v;
  std::vector<double> tl_f, thl_f, tcl_f, tl_v, thl_v, tcl_v;
  for (const auto& r : rows) {
    const bool from_dt_grid = dt_f.size() + dt_v.size() < 16;
    if (from_dt_grid) {
      if (r.q_mode == "fixed") {
        dt_f.push_back(r.dt);
        th_f.push_back(r.theta_mean);
        tc_f.push_back(r.tc_mean);
      } else {
        dt_v.push_back(r.dt);
        th_v.push_back(r.theta_mean);
        tc_v.push_back(r.tc_mean);
      }
    } else {
      if (r.q_mode == "fixed") {
        tl_f.push_back(r.t_len);
        thl_f.push_back(r.theta_mean);
        tcl_f.push_back(r.tc_mean);
      } else {
        tl_v.push_back(r.t_len);
        thl_v.push_back(r.theta_mean);
        tcl_v.push_back(r.tc_mean);
      }
    }
  }
  c.expect(dt_f.size() == 8 && dt_v.size() == 8, "dt grid incomplete");
  c.expect(tl_f.size() == 5 && tl_v.size() == 5, "t_len grid incomplete");
  if (!c.ok) return c;

  const double rc_f = spearman(th_f, dt_f);
  const double rc_v = spearman(th_v, dt_v);
  c.expect(rc_f > 0.9, "fixed-q rank corr(theta, dt) = " + fmt(rc_f));
  c.expect(rc_v > 0.9, "varying-q rank corr(theta, dt) = " + fmt(rc_v));

  const double rel_f = (*std::max_element(thl_f.begin(), thl_f.end()) -
                        *std::min_element(thl_f.begin(), thl_f.end())) /
                       mean_of(thl_f);
  c.expect(rel_f < 0.2,
           "fixed-q theta varies " + fmt(100.0 * rel_f) + "% with t_len");

  bool increasing = true;
  for (std::size_t i = 1; i < thl_v.size(); ++i)
    if (thl_v[i] <= thl_v[i - 1]) increasing = false;
  c.expect(increasing, "varying-q theta not increasing in t_len");

  // cluster times: denser sampling shortens the measured clusters. Under a
  // fixed quantile the curve flattens toward small dt, so only a net
  // decrease plus a positive trend is demanded; under the varying quantile
  // the decrease is almost linear.
  const double tc_rc_f = spearman(tc_f, dt_f);
  const double tc_rc_v = spearman(tc_v, dt_v);
  c.expect(tc_f.back() > tc_f.front() && tc_rc_f > 0.5,
           "fixed-q tc not decreasing with denser sampling (rank corr " +
               fmt(tc_rc_f) + ")");
  c.expect(tc_rc_v > 0.9, "varying-q rank corr(tc, dt) = " + fmt(tc_rc_v));
  const double tcl_rel_f = (*std::max_element(tcl_f.begin(), tcl_f.end()) -
                            *std::min_element(tcl_f.begin(), tcl_f.end())) /
                           mean_of(tcl_f);
  c.expect(tcl_rel_f < 0.3,
           "fixed-q tc varies " + fmt(100.0 * tcl_rel_f) + "% with t_len");
  bool tc_decreasing = true;
  for (std::size_t i = 1; i < tcl_v.size(); ++i)
    if (tcl_v[i] >= tcl_v[i - 1]) tc_decreasing = false;
  c.expect(tc_decreasing, "varying-q tc not decreasing in t_len");
  c.note("rank-corr theta/dt fixed=" + fmt(rc_f) + " varying=" + fmt(rc_v) +
         ", fixed-q theta rel var=" + fmt(100.0 * rel_f) + "%");
  return c;
}

Check criterion9_iid_demo() {
  Check c;
  ExperimentConfig cfg;
  cfg.experiment = "iid-demo";
  cfg.seed = kSeed;
  cfg.q = 0.99;
  cfg.params["n"] = 100000;
  cfg.params["lambda"] = 1.0;
  const IidReport rep = run_iid_demo(cfg);
  c.expect(rep.pot_agree, "PoT fits of V and U disagree beyond 3 stderr");
  c.expect(rep.theta_u >= 0.45 && rep.theta_u <= 0.55,
           "theta(U) = " + fmt(rep.theta_u) + " outside [0.45, 0.55]");
  c.expect(rep.theta_v >= 0.95 && rep.theta_v <= 1.0,
           "theta(V) = " + fmt(rep.theta_v) + " outside [0.95, 1.0]");
  c.expect(rep.ks_u < rep.ks_critical,
           "KS(F_U, F_V^2) = " + fmt(rep.ks_u) + " >= " + fmt(rep.ks_critical));
  c.note("dV=" + fmt(rep.delta_v) + ", dU=" + fmt(rep.delta_u) +
         ", thetaU=" + fmt(rep.theta_u) + ", thetaV=" + fmt(rep.theta_v));
  return c;
}

Check criterion10_estimator_sanity() {
  Check c;
  CounterRng rng(kSeed + 10);

  // d = 1: uniform points on the unit interval around 0.5
  RecurrenceBuffer line(5000);
  std::vector<double> dline;
  for (int i = 0; i < 100000; ++i) {
    const double d = std::fabs(rng.uniform() - 0.5);
    line.insert(d, i, Vec{0.0});
    dline.push_back(d);
  }
  const double ebd1 = ebd_at_radius(line.sorted_distances(), line.radius());
  const double corr1 = correlation_dimension(dline).value;
  c.expect(std::fabs(ebd1 - 1.0) < 0.05, "interval ebd = " + fmt(ebd1));
  c.expect(std::fabs(corr1 - 1.0) < 0.05, "interval corr = " + fmt(corr1));

  // d = 2: uniform points on the unit square around the center
  RecurrenceBuffer sq(5000);
  std::vector<double> dsq;
  for (int i = 0; i < 100000; ++i) {
    const double dx = rng.uniform() - 0.5, dy = rng.uniform() - 0.5;
    const double d = std::hypot(dx, dy);
    sq.insert(d, i, Vec{0.0, 0.0});
    dsq.push_back(d);
  }
  const double ebd2 = ebd_at_radius(sq.sorted_distances(), sq.radius());
  const double corr2 = correlation_dimension(dsq).value;
  c.expect(std::fabs(ebd2 - 2.0) < 0.1, "square ebd = " + fmt(ebd2));
  c.expect(std::fabs(corr2 - 2.0) < 0.1, "square corr = " + fmt(corr2));
  c.note("interval ebd=" + fmt(ebd1) + " corr=" + fmt(corr1) + "; square ebd=" +
         fmt(ebd2) + " corr=" + fmt(corr2));
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Check criterion11_reproducibility() {
  Check c;
  const fs::path base = fs::temp_directory_path() / "ebdim_acceptance";
  fs::remove_all(base);

  ExperimentConfig cfg;
  cfg.experiment = "ensemble";
  cfg.system = "henon";
  cfg.seed = kSeed;
  cfg.refs = 6;
  cfg.iters = 150000;
  cfg.k = 1000;
  cfg.threads = 1;
  run_experiment(cfg, (base / "a").string());
  cfg.threads = 2;  // worker count must not leak into the tables
  run_experiment(cfg, (base / "b").string());
  c.expect(slurp(base / "a" / "zoom.csv") == slurp(base / "b" / "zoom.csv"),
           "zoom.csv differs across reruns");
  c.expect(slurp(base / "a" / "agg.csv") == slurp(base / "b" / "agg.csv"),
           "agg.csv differs across reruns");

  ExperimentConfig ei;
  ei.experiment = "ei-sweep";
  ei.system = "lorenz63";
  ei.seed = kSeed;
  ei.refs = 4;
  ei.t_len = 200.0;
  ei.dt_grid = {0.01, 0.05};
  ei.t_len_grid = {100.0, 200.0};
  ei.threads = 2;
  run_experiment(ei, (base / "c").string());
  run_experiment(ei, (base / "d").string());
  c.expect(slurp(base / "c" / "ei.csv") == slurp(base / "d" / "ei.csv"),
           "ei.csv differs across reruns");

  ExperimentConfig demo;
  demo.experiment = "iid-demo";
  demo.seed = kSeed;
  demo.params["n"] = 20000;
  run_experiment(demo, (base / "e").string());
  run_experiment(demo, (base / "f").string());
  c.expect(slurp(base / "e" / "iid.csv") == slurp(base / "f" / "iid.csv"),
           "iid.csv differs across reruns");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int id;
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Entry> entries = {
      {1, "cantor-exact-oracle-equivalence", criterion1_cantor_oracle},
      {2, "cantor-non-regular-variation", criterion2_cantor_regular_variation},
      {3, "fat-cantor-regular-variation", criterion3_fat_cantor},
      {4, "henon-ensemble-vs-orbit", criterion4_henon},
      {5, "solenoid-analytic-measure", criterion5_solenoid_analytic},
      {6, "lorenz63-ensemble-and-transits", criterion6_lorenz63},
      {7, "lorenz96-ensemble", criterion7_lorenz96},
      {8, "extremal-index-sweep", criterion8_ei_sweep},
      {9, "iid-max-pair-demo", criterion9_iid_demo},
      {10, "estimator-sanity", criterion10_estimator_sanity},
      {11, "reproducibility", criterion11_reproducibility},
  };

  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& e : entries) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), e.id) == wanted.end())
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = e.run();
    } catch (const std::exception& ex) {
      c.ok = false;
      c.detail = std::string("exception: ") + ex.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%s] %2d. %-34s (%.1fs)%s%s\n", c.ok ? "PASS" : "FAIL", e.id,
                e.name, secs, c.detail.empty() ? "" : " -- ", c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
