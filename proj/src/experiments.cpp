#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cantor_measure.hpp"
#include "csv.hpp"
#include "estimators.hpp"
#include "integrate.hpp"
#include "solenoid_measure.hpp"
#include "systems.hpp"

namespace ebdim {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

const std::vector<std::string> kExperiments = {
    "zoom",     "ensemble",         "ei-sweep",
    "iid-demo", "solenoid-measure", "cantor-oracle"};

double get_param(const std::map<std::string, double>& params, const char* key,
                 double dflt) {
  auto it = params.find(key);
  return it == params.end() ? dflt : it->second;
}

}  // namespace

// ---------------------------------------------------------------------------
// config

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  const auto opt = [&](const char* key) { return j.contains(key); };
  if (opt("experiment")) c.experiment = j.at("experiment").get<std::string>();
  if (opt("system")) c.system = j.at("system").get<std::string>();
  if (opt("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (opt("refs")) c.refs = j.at("refs").get<int>();
  if (opt("iters")) c.iters = j.at("iters").get<std::int64_t>();
  if (opt("total_time")) c.total_time = j.at("total_time").get<double>();
  if (opt("dt")) c.dt = j.at("dt").get<double>();
  if (opt("k")) c.k = j.at("k").get<int>();
  if (opt("q")) c.q = j.at("q").get<double>();
  if (opt("q_mode")) c.q_mode = j.at("q_mode").get<std::string>();
  if (opt("b")) c.b = j.at("b").get<double>();
  if (opt("t_len")) c.t_len = j.at("t_len").get<double>();
  if (opt("dt_grid")) c.dt_grid = j.at("dt_grid").get<std::vector<double>>();
  if (opt("t_len_grid"))
    c.t_len_grid = j.at("t_len_grid").get<std::vector<double>>();
  if (opt("mode")) c.mode = j.at("mode").get<std::string>();
  if (opt("checkpoints")) c.checkpoints = j.at("checkpoints").get<int>();
  if (opt("threads")) c.threads = j.at("threads").get<int>();
  if (opt("format")) c.format = j.at("format").get<std::string>();
  if (opt("params"))
    c.params = j.at("params").get<std::map<std::string, double>>();
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["system"] = system;
  j["seed"] = seed;
  j["refs"] = refs;
  j["iters"] = iters;
  j["total_time"] = total_time;
  j["dt"] = dt;
  j["k"] = k;
  j["q"] = q;
  j["q_mode"] = q_mode;
  j["b"] = b;
  j["t_len"] = t_len;
  j["dt_grid"] = dt_grid;
  j["t_len_grid"] = t_len_grid;
  j["mode"] = mode;
  j["checkpoints"] = checkpoints;
  j["threads"] = threads;
  j["format"] = format;
  j["params"] = params;
  return j;
}

void ExperimentConfig::validate() const {
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) ==
      kExperiments.end())
    throw std::invalid_argument("unknown experiment: " + experiment);
  const bool needs_system = experiment == "zoom" || experiment == "ensemble" ||
                            experiment == "ei-sweep";
  if (needs_system) {
    if (!is_system(system)) throw std::invalid_argument("unknown system: " + system);
    SystemSpec spec = system_spec(system);
    for (const auto& [key, value] : params)
      if (spec.params.count(key)) spec.params[key] = value;
    validate_params(spec);
    if (experiment == "ei-sweep" && spec.kind != SystemKind::flow)
      throw std::invalid_argument("ei-sweep needs a flow system");
  }
  if (refs < 1) throw std::invalid_argument("refs must be >= 1");
  if (iters < 1) throw std::invalid_argument("iters must be >= 1");
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must be in (0, 1)");
  if (!(b > 0.0 && b <= 1.0)) throw std::invalid_argument("b must be in (0, 1]");
  if (q_mode != "fixed" && q_mode != "varying")
    throw std::invalid_argument("q_mode must be fixed or varying");
  if (mode != "independent" && mode != "orbit")
    throw std::invalid_argument("mode must be independent or orbit");
  if (format != "csv" && format != "json")
    throw std::invalid_argument("format must be csv or json");
  if (dt < 0.0 || total_time < 0.0 || t_len <= 0.0)
    throw std::invalid_argument("negative time parameter");
  for (double g : dt_grid)
    if (!(g > 0.0)) throw std::invalid_argument("dt_grid entries must be > 0");
  for (double g : t_len_grid)
    if (!(g > 0.0)) throw std::invalid_argument("t_len_grid entries must be > 0");
  if (threads < 0) throw std::invalid_argument("threads must be >= 0");
}

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig c = *this;
  if (c.experiment == "zoom") c.refs = 1;
  if (c.dt == 0.0) {
    if (c.system == "lorenz96")
      c.dt = 0.005;
    else
      c.dt = 0.01;
  }
  // long enough that the default k fills its buffer on every flow
  if (c.total_time == 0.0) c.total_time = 60000.0;
  if (c.experiment == "ei-sweep") {
    if (c.dt_grid.empty()) {
      // 8 log-spaced sampling steps
      const double lo = 0.002, hi = 0.2;
      for (int i = 0; i < 8; ++i)
        c.dt_grid.push_back(lo * std::pow(hi / lo, i / 7.0));
    }
    if (c.t_len_grid.empty()) c.t_len_grid = {250, 500, 1000, 2000, 4000};
  }
  return c;
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_fnv1a64_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a64_hex(ss.str());
}

std::string ExperimentConfig::hash() const {
  return fnv1a64_hex(resolved().to_json().dump());
}

// ---------------------------------------------------------------------------
// work pool

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

// ---------------------------------------------------------------------------
// discrete orbit drivers

namespace {

struct HenonDriver {
  double a, b;
  std::vector<Vec> zetas;

  static Vec converged(double a, double b, Vec x, CounterRng& rng) {
    // reject escaping initial conditions, retry nearby
    for (int attempt = 0; attempt < 64; ++attempt) {
      Vec y = x;
      bool ok = true;
      for (int i = 0; i < 1000; ++i) {
        y = henon_step(y, a, b);
        if (!all_finite(y) || std::fabs(y[0]) > 10.0 || std::fabs(y[1]) > 10.0) {
          ok = false;
          break;
        }
      }
      if (ok) return y;
      x = Vec{0.1 + 0.01 * rng.uniform(), 0.1 + 0.01 * rng.uniform()};
    }
    throw std::runtime_error("henon: could not converge an initial condition");
  }

  HenonDriver(const ExperimentConfig& cfg, CounterRng rng) {
    a = get_param(cfg.params, "a", 1.4);
    b = get_param(cfg.params, "b", 0.3);
    // zetas from a pilot orbit at decorrelating stride
    Vec y = converged(a, b, Vec{0.1, 0.1}, rng);
    zetas.reserve(static_cast<std::size_t>(cfg.refs));
    for (int j = 0; j < cfg.refs; ++j) {
      for (int i = 0; i < 1000; ++i) y = henon_step(y, a, b);
      zetas.push_back(y);
    }
  }

  void run_ref(const ExperimentConfig& cfg, int j, DiscreteZoom& zoom) const {
    CounterRng rng = CounterRng(cfg.seed).stream(1000 + j);
    Vec ic = zetas[static_cast<std::size_t>((j + 7) % cfg.refs)];
    ic[0] += 1e-3 * (rng.uniform() - 0.5);
    ic[1] += 1e-3 * (rng.uniform() - 0.5);
    Vec y = converged(a, b, ic, rng);
    for (std::int64_t i = 0; i < cfg.iters; ++i) {
      y = henon_step(y, a, b);
      zoom.offer(y);
    }
  }
};

// One stored orbit; references are points of the orbit itself.
std::vector<Vec> henon_orbit(const ExperimentConfig& cfg) {
  const double a = get_param(cfg.params, "a", 1.4);
  const double b = get_param(cfg.params, "b", 0.3);
  CounterRng rng = CounterRng(cfg.seed).stream(1);
  Vec y = HenonDriver::converged(a, b, Vec{0.1, 0.1}, rng);
  std::vector<Vec> orbit(static_cast<std::size_t>(cfg.iters));
  for (auto& p : orbit) {
    y = henon_step(y, a, b);
    p = y;
  }
  return orbit;
}

struct SolenoidDriver {
  double a;
  std::vector<Vec> zetas;
  std::vector<SolenoidState> ics;

  SolenoidDriver(const ExperimentConfig& cfg, CounterRng rng) {
    a = get_param(cfg.params, "a", 0.076);
    zetas.reserve(static_cast<std::size_t>(cfg.refs));
    ics.reserve(static_cast<std::size_t>(cfg.refs));
    for (int j = 0; j < cfg.refs; ++j) {
      SolenoidState s{kTwoPi * rng.uniform(), 0.0, 0.0};
      for (int i = 0; i < 1000; ++i) s = solenoid_step(s, a);
      zetas.push_back(solenoid_embed(s));
      SolenoidState ic{kTwoPi * rng.uniform(), 0.0, 0.0};
      for (int i = 0; i < 1000; ++i) ic = solenoid_step(ic, a);
      ics.push_back(ic);
    }
  }

  void run_ref(const ExperimentConfig& cfg, int j, DiscreteZoom& zoom) const {
    SolenoidState s = ics[static_cast<std::size_t>(j)];
    for (std::int64_t i = 0; i < cfg.iters; ++i) {
      s = solenoid_step(s, a);
      zoom.offer(solenoid_embed(s));
    }
  }
};

}  // namespace

namespace {

// Applications-style estimate along one orbit (the Eq-(8) usage): threshold
// at the q-quantile of the whole -log-distance series around an on-orbit
// reference, exponential fit to the excesses.
double series_quantile_ebd(const std::function<Vec(std::int64_t)>& point,
                           std::int64_t n, std::int64_t ref, const Vec& zeta,
                           double q, int w) {
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    if (std::llabs(i - ref) <= w) continue;
    const double d = dist(point(i), zeta);
    if (d < 1e-300) continue;
    x.push_back(-std::log(d));
  }
  ExcessSample ex;
  ex.quantile = q;
  ex.threshold = order_statistic_quantile(x, q);
  for (double xi : x)
    if (xi > ex.threshold) ex.excesses.push_back(xi - ex.threshold);
  return ebd_fit(ex).value;
}

}  // namespace

// ---------------------------------------------------------------------------
// zoom-like experiments

ZoomRunOutput run_zoom_like(const ExperimentConfig& raw, const ProgressFn& progress) {
  const ExperimentConfig cfg = raw.resolved();
  const SystemSpec spec = system_spec(cfg.system);
  ZoomRunOutput out;
  out.traces.resize(static_cast<std::size_t>(cfg.refs));

  ZoomParams zp;
  zp.k = cfg.k;
  zp.b = cfg.b;
  zp.max_checkpoints = cfg.checkpoints;

  std::vector<double> series_ebd;  // per-ref Eq-(8) series estimates
  if (cfg.mode == "orbit")
    series_ebd.assign(static_cast<std::size_t>(cfg.refs),
                      std::numeric_limits<double>::quiet_NaN());

  std::atomic<int> done{0};
  const auto tick = [&]() {
    const int d = ++done;
    if (progress) progress("refs", static_cast<double>(d) / cfg.refs);
  };

  if (spec.kind != SystemKind::flow) {
    // ---------------- discrete systems ----------------
    std::vector<RecurrenceBuffer> buffers;
    buffers.reserve(static_cast<std::size_t>(cfg.refs));
    for (int j = 0; j < cfg.refs; ++j) buffers.emplace_back(cfg.k);

    if (cfg.system == "henon" && cfg.mode == "independent") {
      HenonDriver drv(cfg, CounterRng(cfg.seed).stream(0));
      parallel_for(cfg.refs, cfg.threads, [&](int j) {
        DiscreteZoom zoom(drv.zetas[static_cast<std::size_t>(j)], zp);
        drv.run_ref(cfg, j, zoom);
        out.traces[static_cast<std::size_t>(j)] = zoom.finish();
        buffers[static_cast<std::size_t>(j)] = zoom.buffer();
        tick();
      });
    } else if (cfg.system == "henon") {  // mode == orbit
      const std::vector<Vec> orbit = henon_orbit(cfg);
      const std::int64_t n = static_cast<std::int64_t>(orbit.size());
      parallel_for(cfg.refs, cfg.threads, [&](int j) {
        const std::int64_t ref = (j + 1) * n / (cfg.refs + 1);
        const Vec zeta = orbit[static_cast<std::size_t>(ref)];
        DiscreteZoom zoom(zeta, zp, ReferenceMode::along_orbit, ref);
        for (const auto& p : orbit) zoom.offer(p);
        out.traces[static_cast<std::size_t>(j)] = zoom.finish();
        buffers[static_cast<std::size_t>(j)] = zoom.buffer();
        series_ebd[static_cast<std::size_t>(j)] = series_quantile_ebd(
            [&](std::int64_t i) { return orbit[static_cast<std::size_t>(i)]; }, n,
            ref, zeta, cfg.q, zp.exclusion_window);
        tick();
      });
    } else if (cfg.system == "cantor-shift") {
      if (cfg.mode == "independent") {
        parallel_for(cfg.refs, cfg.threads, [&](int j) {
          CounterRng rz = CounterRng(cfg.seed).stream(2000 + j);
          CantorPoint zp_digits = CantorPoint::random(kSymbolicDepth, rz);
          Vec zeta{zp_digits.value()};
          DiscreteZoom zoom(zeta, zp);
          CantorTape tape(cfg.iters, CounterRng(cfg.seed).stream(3000 + j));
          for (std::int64_t i = 0; i < cfg.iters; ++i) zoom.offer(Vec{tape.next()});
          out.traces[static_cast<std::size_t>(j)] = zoom.finish();
          buffers[static_cast<std::size_t>(j)] = zoom.buffer();
          tick();
        });
      } else {
        CounterRng rt = CounterRng(cfg.seed).stream(1);
        std::vector<std::uint8_t> digits(
            static_cast<std::size_t>(cfg.iters) + kSymbolicDepth);
        for (auto& d : digits) d = rt.bernoulli() ? 2 : 0;
        parallel_for(cfg.refs, cfg.threads, [&](int j) {
          const std::int64_t ref = (j + 1) * cfg.iters / (cfg.refs + 1);
          Vec zeta{cantor_embed(digits, static_cast<std::size_t>(ref), 40)};
          DiscreteZoom zoom(zeta, zp, ReferenceMode::along_orbit, ref);
          for (std::int64_t i = 0; i < cfg.iters; ++i)
            zoom.offer(Vec{cantor_embed(digits, static_cast<std::size_t>(i), 40)});
          out.traces[static_cast<std::size_t>(j)] = zoom.finish();
          buffers[static_cast<std::size_t>(j)] = zoom.buffer();
          series_ebd[static_cast<std::size_t>(j)] = series_quantile_ebd(
              [&](std::int64_t i) {
                return Vec{cantor_embed(digits, static_cast<std::size_t>(i), 40)};
              },
              cfg.iters, ref, zeta, cfg.q, zp.exclusion_window);
          tick();
        });
      }
    } else if (cfg.system == "fat-cantor") {
      const int depth = static_cast<int>(get_param(cfg.params, "depth", 20));
      const std::vector<double> set =
          fat_cantor_sample(cfg.iters, depth, CounterRng(cfg.seed).stream(0));
      parallel_for(cfg.refs, cfg.threads, [&](int j) {
        CounterRng rz = CounterRng(cfg.seed).stream(2000 + j);
        const double z =
            fat_cantor_sample(1, depth, rz, FatCantorMode::backward)[0];
        DiscreteZoom zoom(Vec{z}, zp);
        for (double x : set) zoom.offer(Vec{x});
        out.traces[static_cast<std::size_t>(j)] = zoom.finish();
        buffers[static_cast<std::size_t>(j)] = zoom.buffer();
        tick();
      });
    } else if (cfg.system == "solenoid") {
      if (cfg.mode == "independent") {
        SolenoidDriver drv(cfg, CounterRng(cfg.seed).stream(0));
        parallel_for(cfg.refs, cfg.threads, [&](int j) {
          DiscreteZoom zoom(drv.zetas[static_cast<std::size_t>(j)], zp);
          drv.run_ref(cfg, j, zoom);
          out.traces[static_cast<std::size_t>(j)] = zoom.finish();
          buffers[static_cast<std::size_t>(j)] = zoom.buffer();
          tick();
        });
      } else {
        const double a = get_param(cfg.params, "a", 0.076);
        CounterRng r0 = CounterRng(cfg.seed).stream(1);
        SolenoidState s{kTwoPi * r0.uniform(), 0.0, 0.0};
        for (int i = 0; i < 1000; ++i) s = solenoid_step(s, a);
        std::vector<Vec> orbit(static_cast<std::size_t>(cfg.iters));
        for (auto& p : orbit) {
          s = solenoid_step(s, a);
          p = solenoid_embed(s);
        }
        parallel_for(cfg.refs, cfg.threads, [&](int j) {
          const std::int64_t ref = (j + 1) * cfg.iters / (cfg.refs + 1);
          const Vec zeta = orbit[static_cast<std::size_t>(ref)];
          DiscreteZoom zoom(zeta, zp, ReferenceMode::along_orbit, ref);
          for (const auto& p : orbit) zoom.offer(p);
          out.traces[static_cast<std::size_t>(j)] = zoom.finish();
          buffers[static_cast<std::size_t>(j)] = zoom.buffer();
          series_ebd[static_cast<std::size_t>(j)] = series_quantile_ebd(
              [&](std::int64_t i) { return orbit[static_cast<std::size_t>(i)]; },
              cfg.iters, ref, zeta, cfg.q, zp.exclusion_window);
          tick();
        });
      }
    } else {
      throw std::invalid_argument("run_zoom_like: unsupported system " + cfg.system);
    }

    // excess histogram with the fitted exponential overlay (cantor figure)
    if (cfg.system == "cantor-shift" && !out.traces.empty() &&
        buffers[0].full()) {
      const ExcessSample ex = excesses_from_buffer(buffers[0], cfg.q);
      if (ex.excesses.size() >= 10) {
        const EstimateRecord fit = ebd_fit(ex);
        const double umax = *std::max_element(ex.excesses.begin(), ex.excesses.end());
        const int nb = 40;
        out.hist.assign(nb, HistBin{});
        for (int i = 0; i < nb; ++i) {
          out.hist[static_cast<std::size_t>(i)].left = umax * i / nb;
          out.hist[static_cast<std::size_t>(i)].right = umax * (i + 1) / nb;
        }
        for (double u : ex.excesses) {
          int bin = static_cast<int>(u / umax * nb);
          if (bin >= nb) bin = nb - 1;
          ++out.hist[static_cast<std::size_t>(bin)].count;
        }
        for (auto& hb : out.hist) {
          const double mid = 0.5 * (hb.left + hb.right);
          hb.fit_density = fit.value * std::exp(-fit.value * mid);
        }
        out.notes["ebd_fit"] = fit.value;
        out.notes["excess_count"] = ex.excesses.size();
      }
    }
  } else {
    // ---------------- flows ----------------
    FlowZoomParams fp;
    fp.dt = cfg.dt;
    fp.total_time = cfg.total_time;
    fp.k = cfg.k;
    fp.b = cfg.b;
    fp.max_checkpoints = cfg.checkpoints;

    SystemSpec flow_spec = spec;
    for (const auto& [key, value] : cfg.params)
      if (flow_spec.params.count(key)) flow_spec.params[key] = value;
    const Rhs rhs = [flow_spec](const Vec& y, double t, Vec& dy) {
      flow_rhs(flow_spec.name, flow_spec.params, y, t, dy);
    };

    Vec ic;
    if (cfg.system == "lorenz63") ic = Vec{1.0, 1.0, 20.0};
    else if (cfg.system == "lorenz96") {
      const double F = get_param(cfg.params, "F", 32.0);
      ic = Vec{F + 0.1, F, F - 0.1, F};
    } else {
      ic = Vec{0.0, -0.25, 0.42, 0.0};  // on the reference trajectory
    }

    // pilot orbit: transient discard, then samples at a decorrelating stride
    const double burn_t = 100.0;
    const double stride_t = 5.0;
    const bool hamiltonian = cfg.system == "henon-heiles";
    Vec y = integrate_to(rhs, ic, 0.0, cfg.dt,
                         static_cast<std::int64_t>(burn_t / cfg.dt));
    std::vector<Vec> pilot;
    pilot.reserve(static_cast<std::size_t>(2 * cfg.refs + 2));
    const std::int64_t stride_steps =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(stride_t / cfg.dt));
    for (int j = 0; j < 2 * cfg.refs + 2; ++j) {
      y = integrate_to(rhs, y, 0.0, cfg.dt, stride_steps);
      pilot.push_back(y);
    }

    std::vector<double> drifts(static_cast<std::size_t>(cfg.refs), 0.0);
    if (cfg.mode == "orbit") {
      // references are points of one shared trajectory; each reference gets
      // the same orbit with its own passage masked out
      const Vec y_start = pilot.back();
      parallel_for(cfg.refs, cfg.threads, [&](int j) {
        const double t_ref =
            static_cast<double>(stride_steps) * cfg.dt * (j + 1);
        const Vec zeta =
            integrate_to(rhs, y_start, 0.0, cfg.dt,
                         stride_steps * static_cast<std::int64_t>(j + 1));
        FlowZoomParams fpj = fp;
        fpj.exclude_center = t_ref;
        fpj.exclude_halfwidth = 10.0 * cfg.dt;
        ContinuousZoomResult res = continuous_zoom(rhs, y_start, 0.0, zeta, fpj);
        out.traces[static_cast<std::size_t>(j)] = std::move(res.trace);
        tick();
      });
    } else {
      parallel_for(cfg.refs, cfg.threads, [&](int j) {
        CounterRng rng = CounterRng(cfg.seed).stream(1000 + j);
        const Vec zeta = pilot[static_cast<std::size_t>(2 * j)];
        Vec y0 = pilot[static_cast<std::size_t>(2 * j + 1)];
        if (!hamiltonian) {
          for (int i = 0; i < y0.dim; ++i) y0[i] += 1e-3 * (rng.uniform() - 0.5);
          y0 = integrate_to(rhs, y0, 0.0, cfg.dt,
                            static_cast<std::int64_t>(burn_t / cfg.dt));
        }
        ContinuousZoomResult res = continuous_zoom(rhs, y0, 0.0, zeta, fp);
        if (hamiltonian)
          drifts[static_cast<std::size_t>(j)] =
              std::fabs(henon_heiles_energy(res.end_state) -
                        henon_heiles_energy(y0)) /
              std::max(1e-300, std::fabs(henon_heiles_energy(y0)));
        out.traces[static_cast<std::size_t>(j)] = std::move(res.trace);
        tick();
      });
    }
    if (hamiltonian && cfg.mode != "orbit")
      out.notes["max_rel_energy_drift"] =
          *std::max_element(drifts.begin(), drifts.end());
  }

  for (const auto& t : out.traces)
    if (t.partial) ++out.excluded_partial;
  if (cfg.experiment == "ensemble") out.agg = aggregate_traces(out.traces);

  // summary: mean over refs of the final-checkpoint estimates
  double mean_ebd = 0.0, mean_R = 0.0;
  int n_ok = 0;
  for (const auto& t : out.traces) {
    if (t.partial || t.checkpoints.empty()) continue;
    mean_ebd += t.checkpoints.back().ebd_dim;
    mean_R += t.checkpoints.back().R_half;
    ++n_ok;
  }
  if (n_ok > 0) {
    out.notes["mean_final_ebd"] = mean_ebd / n_ok;
    out.notes["mean_final_R"] = mean_R / n_ok;
    out.notes["complete_traces"] = n_ok;
  }
  if (!series_ebd.empty()) {
    double s = 0.0;
    int n = 0;
    for (double v : series_ebd)
      if (std::isfinite(v)) {
        s += v;
        ++n;
      }
    if (n > 0) out.notes["mean_series_ebd"] = s / n;
  }
  out.notes["excluded_partial"] = out.excluded_partial;
  return out;
}

// ---------------------------------------------------------------------------
// extremal-index sweep

namespace {

struct EiCell {
  double theta_mean, theta_std, tc_mean, tc_std;
};

EiCell ei_cell(const std::vector<Vec>& samples, double dt, double q, int refs) {
  const std::int64_t n = static_cast<std::int64_t>(samples.size());
  std::vector<double> thetas, tcs;
  for (int j = 0; j < refs; ++j) {
    const std::int64_t ref = (j + 1) * n / (refs + 1);
    const Vec& zeta = samples[static_cast<std::size_t>(ref)];
    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
      const double d =
          std::max(dist(samples[static_cast<std::size_t>(i)], zeta), 1e-300);
      x[static_cast<std::size_t>(i)] = -std::log(d);
    }
    const ExceedanceIndexSeries e = exceedance_indices(x, q, dt);
    if (e.indices.size() < 2) continue;
    const double theta = suveges_theta(e, q).value;
    thetas.push_back(theta);
    tcs.push_back(mean_cluster_time(theta, dt));
  }
  const auto mean_std = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::pair<double, double>(
        m, v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0);
  };
  const auto [tm, ts] = mean_std(thetas);
  const auto [cm, cs] = mean_std(tcs);
  return {tm, ts, cm, cs};
}

}  // namespace

std::vector<EiRow> run_ei_sweep(const ExperimentConfig& raw,
                                const ProgressFn& progress) {
  const ExperimentConfig cfg = raw.resolved();
  SystemSpec spec = system_spec(cfg.system);
  for (const auto& [key, value] : cfg.params)
    if (spec.params.count(key)) spec.params[key] = value;
  const Rhs rhs = [spec](const Vec& y, double t, Vec& dy) {
    flow_rhs(spec.name, spec.params, y, t, dy);
  };
  const Vec ic = cfg.system == "lorenz96"
                     ? Vec{get_param(cfg.params, "F", 32.0) + 0.1, 32.0, 31.9, 32.0}
                     : Vec{1.0, 1.0, 20.0};
  const double burn_t = 100.0;
  const double dt_ref = 0.0198;  // reference sampling step for the length sweep

  struct Task {
    double dt, t_len;
    bool from_dt_grid;
  };
  std::vector<Task> tasks;
  for (double dt : cfg.dt_grid) tasks.push_back({dt, cfg.t_len, true});
  for (double tl : cfg.t_len_grid) tasks.push_back({dt_ref, tl, false});

  std::vector<std::array<EiRow, 2>> rows(tasks.size());
  std::atomic<int> done{0};
  parallel_for(static_cast<int>(tasks.size()), cfg.threads, [&](int ti) {
    const Task& task = tasks[static_cast<std::size_t>(ti)];
    const std::int64_t n = static_cast<std::int64_t>(task.t_len / task.dt);
    // dt is the sampling step of the series; integrate on substeps whenever
    // it exceeds the stable step size
    const std::int64_t sub =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(task.dt / 0.01)));
    const double dt_int = task.dt / static_cast<double>(sub);
    Vec y = integrate_to(rhs, ic, 0.0, dt_int,
                         static_cast<std::int64_t>(burn_t / dt_int));
    std::vector<Vec> samples;
    samples.reserve(static_cast<std::size_t>(n));
    std::int64_t step = 0;
    integrate_stream(rhs, y, 0.0, dt_int, n * sub, [&](const FlowSegment& seg) {
      if (++step % sub == 0) samples.push_back(seg.y1);
      return true;
    });
    const double q_fixed = cfg.q;
    const double q_vary = 1.0 - 1.0 / std::sqrt(task.t_len / task.dt);
    for (int m = 0; m < 2; ++m) {
      const double q = m == 0 ? q_fixed : q_vary;
      const EiCell cell = ei_cell(samples, task.dt, q, cfg.refs);
      EiRow row;
      row.dt = task.dt;
      row.t_len = task.t_len;
      row.q_mode = m == 0 ? "fixed" : "varying";
      row.q = q;
      row.theta_mean = cell.theta_mean;
      row.theta_std = cell.theta_std;
      row.tc_mean = cell.tc_mean;
      row.tc_std = cell.tc_std;
      row.n_refs = cfg.refs;
      rows[static_cast<std::size_t>(ti)][static_cast<std::size_t>(m)] = row;
    }
    const int d = ++done;
    if (progress)
      progress("ei-cells", static_cast<double>(d) / static_cast<double>(tasks.size()));
  });

  std::vector<EiRow> out;
  for (const auto& pair : rows) {
    out.push_back(pair[0]);
    out.push_back(pair[1]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// i.i.d. / max-pair demonstration

IidReport run_iid_demo(const ExperimentConfig& raw) {
  const ExperimentConfig cfg = raw.resolved();
  const std::int64_t n =
      static_cast<std::int64_t>(get_param(cfg.params, "n", 100000));
  const double lambda = get_param(cfg.params, "lambda", 1.0);
  MaxPairSeries s = synthetic_max_pair(n, lambda, CounterRng(cfg.seed).stream(0));

  const auto pot_fit = [&](const std::vector<double>& series) {
    ExcessSample ex;
    ex.quantile = cfg.q;
    ex.threshold = order_statistic_quantile(series, cfg.q);
    for (double v : series)
      if (v > ex.threshold) ex.excesses.push_back(v - ex.threshold);
    return ebd_fit(ex);
  };
  const EstimateRecord fv = pot_fit(s.v);
  const EstimateRecord fu = pot_fit(s.u);

  IidReport rep;
  rep.n = n;
  rep.lambda = lambda;
  rep.delta_v = fv.value;
  rep.delta_v_se = fv.stderr_value;
  rep.delta_u = fu.value;
  rep.delta_u_se = fu.stderr_value;
  rep.pot_agree =
      std::fabs(fv.value - fu.value) <
      3.0 * std::sqrt(fv.stderr_value * fv.stderr_value +
                      fu.stderr_value * fu.stderr_value);
  rep.theta_v = suveges_theta(exceedance_indices(s.v, cfg.q), cfg.q).value;
  rep.theta_u = suveges_theta(exceedance_indices(s.u, cfg.q), cfg.q).value;
  rep.ks_u = ks_distance(s.u, [&](double y) {
    const double f = 1.0 - std::exp(-y / lambda);
    return f * f;
  });
  rep.ks_critical = 1.36 / std::sqrt(static_cast<double>(n));
  return rep;
}

// ---------------------------------------------------------------------------
// oracle curves

std::vector<CurvePoint> run_solenoid_measure(const ExperimentConfig& raw) {
  const ExperimentConfig cfg = raw.resolved();
  const int depth = static_cast<int>(get_param(cfg.params, "depth", 20));
  const double a = get_param(cfg.params, "a", 0.076);
  const double r_lo = get_param(cfg.params, "r_lo", 1e-12);
  const double r_hi = get_param(cfg.params, "r_hi", 0.5);
  const int points = static_cast<int>(get_param(cfg.params, "points", 200));
  if (!(r_hi > r_lo && r_lo > 0.0))
    throw std::invalid_argument("solenoid-measure: bad radius range");

  // center branch nearest to a sampled attractor point (deterministic)
  CounterRng rng = CounterRng(cfg.seed).stream(0);
  SolenoidState s{kTwoPi * rng.uniform(), 0.0, 0.0};
  for (int i = 0; i < 2000; ++i) s = solenoid_step(s, a);
  SolenoidQuery q;
  q.depth = depth;
  q.contraction = a;
  q.section_angle = s.phi;
  q.center_branch =
      solenoid_nearest_branch(depth, a, s.phi, {0.0, 0.0}, {s.v1, s.v2});
  q.raw_distance_form = get_param(cfg.params, "raw_form", 0.0) != 0.0;

  std::vector<CurvePoint> out;
  out.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double r =
        r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (points - 1));
    q.radius = r;
    const double mu = solenoid_ball_measure(q);
    q.radius = cfg.b * r;
    const double mu_b = solenoid_ball_measure(q);
    out.push_back({r, mu, mu > 0.0 ? mu_b / mu : 0.0});
  }
  return out;
}

std::vector<CurvePoint> run_cantor_oracle(const ExperimentConfig& raw) {
  const ExperimentConfig cfg = raw.resolved();
  const int depth = static_cast<int>(get_param(cfg.params, "depth", 60));
  const double r_lo = get_param(cfg.params, "r_lo", 1e-12);
  const double r_hi = get_param(cfg.params, "r_hi", 0.9);
  const int points = static_cast<int>(get_param(cfg.params, "points", 200));
  if (!(r_hi > r_lo && r_lo > 0.0 && r_hi < 1.0))
    throw std::invalid_argument("cantor-oracle: bad radius range");
  CounterRng rng = CounterRng(cfg.seed).stream(0);
  const CantorPoint zeta = CantorPoint::random(depth, rng);
  std::vector<CurvePoint> out;
  out.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double r =
        r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (points - 1));
    out.push_back(
        {r, cantor_ball_measure(zeta, r), cantor_ratio(zeta, r, cfg.b)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// file outputs

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// Buffers rows and writes them as CSV or as a JSON array of objects.
class Table {
 public:
  Table(std::string name, std::vector<std::string> columns)
      : name_(std::move(name)), cols_(std::move(columns)) {}

  void row(std::vector<CsvWriter::Cell> cells) { rows_.push_back(std::move(cells)); }

  std::string write(const std::string& dir, const std::string& format) const {
    namespace fs = std::filesystem;
    const std::string path =
        (fs::path(dir) / (name_ + (format == "json" ? ".json" : ".csv"))).string();
    if (format == "json") {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : rows_) {
        nlohmann::json obj;
        for (std::size_t i = 0; i < cols_.size(); ++i) {
          const auto& c = r[i];
          if (std::holds_alternative<std::int64_t>(c))
            obj[cols_[i]] = std::get<std::int64_t>(c);
          else if (std::holds_alternative<double>(c))
            obj[cols_[i]] = std::get<double>(c);
          else
            obj[cols_[i]] = std::get<std::string>(c);
        }
        arr.push_back(std::move(obj));
      }
      std::ofstream out(path);
      out << arr.dump(2) << '\n';
    } else {
      std::string header;
      for (std::size_t i = 0; i < cols_.size(); ++i) {
        if (i) header += ',';
        header += cols_[i];
      }
      CsvWriter w(path, header);
      for (const auto& r : rows_) w.row(r);
    }
    return path;
  }

 private:
  std::string name_;
  std::vector<std::string> cols_;
  std::vector<std::vector<CsvWriter::Cell>> rows_;
};

Table zoom_table(const std::vector<ZoomTrace>& traces) {
  Table t("zoom",
          {"point_id", "checkpoint", "iters", "r", "R_half", "ebd_dim", "corr_dim"});
  for (std::size_t p = 0; p < traces.size(); ++p) {
    const auto& cps = traces[p].checkpoints;
    for (std::size_t c = 0; c < cps.size(); ++c) {
      t.row({static_cast<std::int64_t>(p), static_cast<std::int64_t>(c),
             cps[c].iters, cps[c].r, cps[c].R_half, cps[c].ebd_dim,
             cps[c].corr_dim});
    }
  }
  return t;
}

Table agg_table(const std::vector<AggregateRow>& agg) {
  Table t("agg", {"checkpoint", "log10_r", "mean_R_half", "std_R_half", "mean_ebd",
                  "std_ebd", "mean_corr", "std_corr", "n_points"});
  for (std::size_t i = 0; i < agg.size(); ++i) {
    const auto& a = agg[i];
    t.row({static_cast<std::int64_t>(i), a.log10_r, a.mean_R, a.std_R, a.mean_ebd,
           a.std_ebd, a.mean_corr, a.std_corr, static_cast<std::int64_t>(a.n)});
  }
  return t;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& raw, const std::string& out_dir,
                         const ProgressFn& progress) {
  raw.validate();
  const ExperimentConfig cfg = raw.resolved();
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  std::vector<Table> tables;
  nlohmann::json notes;

  if (cfg.experiment == "zoom" || cfg.experiment == "ensemble") {
    ZoomRunOutput z = run_zoom_like(cfg, progress);
    tables.push_back(zoom_table(z.traces));
    if (cfg.experiment == "ensemble") tables.push_back(agg_table(z.agg));
    if (!z.hist.empty()) {
      Table h("hist", {"bin_left", "bin_right", "count", "fit_density"});
      for (const auto& hb : z.hist)
        h.row({hb.left, hb.right, hb.count, hb.fit_density});
      tables.push_back(std::move(h));
    }
    if (cfg.experiment == "ensemble" && cfg.system == "solenoid") {
      // analytic overlay over the aggregated radius range
      ExperimentConfig oc = cfg;
      if (!z.agg.empty()) {
        oc.params["r_lo"] = std::pow(10.0, z.agg.back().log10_r);
        oc.params["r_hi"] = std::pow(10.0, z.agg.front().log10_r);
        oc.params["points"] = static_cast<double>(z.agg.size());
      }
      Table c("curve", {"r", "mu", "R"});
      for (const auto& p : run_solenoid_measure(oc)) c.row({p.r, p.mu, p.R});
      tables.push_back(std::move(c));
    }
    notes = z.notes;
  } else if (cfg.experiment == "ei-sweep") {
    Table t("ei", {"dt", "t_len", "q_mode", "q", "theta_mean", "theta_std",
                   "tc_mean", "tc_std", "n_refs"});
    for (const auto& row : run_ei_sweep(cfg, progress))
      t.row({row.dt, row.t_len, row.q_mode, row.q, row.theta_mean, row.theta_std,
             row.tc_mean, row.tc_std, static_cast<std::int64_t>(row.n_refs)});
    tables.push_back(std::move(t));
  } else if (cfg.experiment == "iid-demo") {
    const IidReport rep = run_iid_demo(cfg);
    notes["iid_report"] = {
        {"n", rep.n},
        {"lambda", rep.lambda},
        {"delta_v", rep.delta_v},
        {"delta_v_se", rep.delta_v_se},
        {"delta_u", rep.delta_u},
        {"delta_u_se", rep.delta_u_se},
        {"pot_agree", rep.pot_agree},
        {"theta_v", rep.theta_v},
        {"theta_u", rep.theta_u},
        {"ks_u", rep.ks_u},
        {"ks_critical", rep.ks_critical},
    };
    Table t("iid", {"series", "delta", "delta_se", "theta"});
    t.row({std::string("V"), rep.delta_v, rep.delta_v_se, rep.theta_v});
    t.row({std::string("U"), rep.delta_u, rep.delta_u_se, rep.theta_u});
    tables.push_back(std::move(t));
  } else if (cfg.experiment == "solenoid-measure") {
    Table t("curve", {"r", "mu", "R"});
    for (const auto& p : run_solenoid_measure(cfg)) t.row({p.r, p.mu, p.R});
    tables.push_back(std::move(t));
  } else if (cfg.experiment == "cantor-oracle") {
    Table t("curve", {"r", "mu", "R"});
    for (const auto& p : run_cantor_oracle(cfg)) t.row({p.r, p.mu, p.R});
    tables.push_back(std::move(t));
  }

  RunResult res;
  for (const auto& t : tables) res.files.push_back(t.write(out_dir, cfg.format));

  nlohmann::json outputs;
  for (const auto& f : res.files) {
    outputs[fs::path(f).filename().string()] = {
        {"bytes", fs::file_size(f)},
        {"fnv1a64", file_fnv1a64_hex(f)},
    };
  }
  const auto t1 = std::chrono::steady_clock::now();
  res.manifest = {
      {"config", cfg.to_json()},
      {"config_hash", cfg.hash()},
      {"artifact_version", kArtifactVersion},
      {"rng", kRngAlgorithm},
      {"started_utc", started},
      {"finished_utc", utc_now()},
      {"wall_seconds", std::chrono::duration<double>(t1 - t0).count()},
      {"outputs", outputs},
      {"notes", notes},
  };
  const std::string mpath = (fs::path(out_dir) / "manifest.json").string();
  std::ofstream mf(mpath);
  mf << res.manifest.dump(2) << '\n';
  res.files.push_back(mpath);
  return res;
}

}  // namespace ebdim
