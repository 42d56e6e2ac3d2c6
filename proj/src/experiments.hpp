#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "recurrence.hpp"

namespace ebdim {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Fully serialized description of one run; rerunning a serialized config
// reproduces the output files byte-identically (thread count included --
// parallel members use disjoint counter-RNG streams and results are gathered
// in reference order).
struct ExperimentConfig {
  std::string experiment = "zoom";  // zoom | ensemble | ei-sweep | iid-demo |
                                    // solenoid-measure | cantor-oracle
  std::string system = "henon";
  std::uint64_t seed = 1;
  int refs = 200;
  std::int64_t iters = 1'000'000;
  double total_time = 0.0;  // flows; 0 resolves to a per-system default
  double dt = 0.0;          // flows; 0 resolves to a per-system default
  int k = 5000;
  double q = 0.99;
  std::string q_mode = "fixed";  // fixed | varying
  double b = 0.5;
  double t_len = 1000.0;
  std::vector<double> dt_grid;     // ei-sweep; empty resolves to the default grid
  std::vector<double> t_len_grid;  // ei-sweep; empty resolves to the default grid
  std::string mode = "independent";  // independent | orbit
  int checkpoints = 0;
  int threads = 0;  // 0 = hardware concurrency
  std::string format = "csv";  // csv | json
  std::map<std::string, double> params;  // per-system / per-experiment extras

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;          // throws std::invalid_argument
  ExperimentConfig resolved() const;
  std::string hash() const;       // fnv1a-64 of the canonical resolved dump
};

using ProgressFn = std::function<void(const std::string& stage, double fraction)>;

struct RunResult {
  std::vector<std::string> files;
  nlohmann::json manifest;
};

// Runs the configured experiment and writes its outputs plus manifest.json
// under out_dir. Validates before touching the filesystem.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                         const ProgressFn& progress = {});

// ---------------------------------------------------------------------------
// in-memory entry points (the file writers above are thin wrappers)

struct HistBin {
  double left, right;
  std::int64_t count;
  double fit_density;
};

struct ZoomRunOutput {
  std::vector<ZoomTrace> traces;  // one per reference point
  std::vector<AggregateRow> agg;  // ensembles only
  std::vector<HistBin> hist;      // cantor zoom: excess histogram + fit
  int excluded_partial = 0;
  nlohmann::json notes;
};

ZoomRunOutput run_zoom_like(const ExperimentConfig& cfg,
                            const ProgressFn& progress = {});

struct EiRow {
  double dt;
  double t_len;
  std::string q_mode;
  double q;
  double theta_mean, theta_std;
  double tc_mean, tc_std;
  int n_refs;
};

std::vector<EiRow> run_ei_sweep(const ExperimentConfig& cfg,
                                const ProgressFn& progress = {});

struct IidReport {
  std::int64_t n = 0;
  double lambda = 1.0;
  double delta_v = 0.0, delta_v_se = 0.0;
  double delta_u = 0.0, delta_u_se = 0.0;
  double theta_v = 0.0, theta_u = 0.0;
  double ks_u = 0.0, ks_critical = 0.0;
  bool pot_agree = false;  // |delta_v - delta_u| < 3 combined stderr
};

IidReport run_iid_demo(const ExperimentConfig& cfg);

struct CurvePoint {
  double r, mu, R;
};

std::vector<CurvePoint> run_solenoid_measure(const ExperimentConfig& cfg);
std::vector<CurvePoint> run_cantor_oracle(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------

std::string fnv1a64_hex(const std::string& bytes);
std::string file_fnv1a64_hex(const std::string& path);

// Deterministic work pool: fn(i) for i in [0, n); exceptions rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace ebdim
