// Command-line front end. Talks to the shared library exclusively through
// the public C API; experiment selection, config loading and flag overrides
// happen here, all numerics happen behind ebdim.h.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ebdim.h"

namespace {

struct Flags {
  std::string system;
  std::uint64_t seed = 1;
  int refs = 200;
  std::int64_t iters = 1000000;
  double time_total = 0.0;
  double dt = 0.0;
  double t_len = 1000.0;
  int k = 5000;
  double q = 0.99;
  std::string q_mode = "fixed";
  double b = 0.5;
  std::string config_path;
  std::string out_dir;
  std::string format = "csv";
  int threads = 0;
  std::string mode = "independent";
  int checkpoints = 0;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--system", f.system, "system name (see list-systems)");
  cmd->add_option("--seed", f.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--refs", f.refs, "number of reference points")
      ->capture_default_str();
  cmd->add_option("--iters", f.iters, "orbit length / sample count per reference")
      ->capture_default_str();
  cmd->add_option("--time", f.time_total,
                  "trajectory length per reference in time units (flows)")
      ->capture_default_str();
  cmd->add_option("--dt", f.dt, "integration step (flows; 0 = per-system default)")
      ->capture_default_str();
  cmd->add_option("--t-len", f.t_len, "series temporal length (ei-sweep)")
      ->capture_default_str();
  cmd->add_option("--k", f.k, "tracked closest recurrences per reference")
      ->capture_default_str();
  cmd->add_option("--q", f.q, "threshold quantile")->capture_default_str();
  cmd->add_option("--q-mode", f.q_mode, "quantile policy: fixed or varying")
      ->capture_default_str();
  cmd->add_option("--b", f.b, "inner/outer radius ratio for R(r)")
      ->capture_default_str();
  cmd->add_option("--config", f.config_path, "JSON config file (flags override it)");
  cmd->add_option("--out", f.out_dir, "output directory")->required();
  cmd->add_option("--format", f.format, "output table format: csv or json")
      ->capture_default_str();
  cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)")
      ->capture_default_str();
  cmd->add_option("--mode", f.mode,
                  "reference choice: independent (fresh orbit per reference) "
                  "or orbit (references on the orbit itself)")
      ->capture_default_str();
  cmd->add_option("--checkpoints", f.checkpoints,
                  "cap on zoom checkpoints (0 = unlimited)")
      ->capture_default_str();
}

// flag > config-file > built-in default
nlohmann::json build_config(const CLI::App* cmd, const Flags& f,
                            const std::string& experiment, bool needs_system) {
  nlohmann::json j;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw std::runtime_error("cannot read config file: " + f.config_path);
    in >> j;
  }
  j["experiment"] = experiment;
  const auto passed = [&](const char* flag) { return cmd->count(flag) > 0; };
  if (needs_system && f.system.empty() && !j.contains("system"))
    throw std::runtime_error("missing --system (or provide one via --config)");
  if (passed("--system") || (!j.contains("system") && !f.system.empty()))
    j["system"] = f.system;
  if (passed("--seed") || !j.contains("seed")) j["seed"] = f.seed;
  if (passed("--refs") || !j.contains("refs")) j["refs"] = f.refs;
  if (passed("--iters") || !j.contains("iters")) j["iters"] = f.iters;
  if (passed("--time") || !j.contains("total_time")) j["total_time"] = f.time_total;
  if (passed("--dt") || !j.contains("dt")) j["dt"] = f.dt;
  if (passed("--t-len") || !j.contains("t_len")) j["t_len"] = f.t_len;
  if (passed("--k") || !j.contains("k")) j["k"] = f.k;
  if (passed("--q") || !j.contains("q")) j["q"] = f.q;
  if (passed("--q-mode") || !j.contains("q_mode")) j["q_mode"] = f.q_mode;
  if (passed("--b") || !j.contains("b")) j["b"] = f.b;
  if (passed("--format") || !j.contains("format")) j["format"] = f.format;
  if (passed("--threads") || !j.contains("threads")) j["threads"] = f.threads;
  if (passed("--mode") || !j.contains("mode")) j["mode"] = f.mode;
  if (passed("--checkpoints") || !j.contains("checkpoints"))
    j["checkpoints"] = f.checkpoints;
  return j;
}

void progress_line(const char* stage, double fraction, void* /*user*/) {
  std::fprintf(stderr, "\r%-12s %5.1f%%", stage, 100.0 * fraction);
  if (fraction >= 1.0) std::fprintf(stderr, "\n");
  std::fflush(stderr);
}

int run(const CLI::App* cmd, const Flags& f, const std::string& experiment,
        bool needs_system) {
  nlohmann::json cfg;
  try {
    cfg = build_config(cmd, f, experiment, needs_system);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "config: " << cfg.dump() << "\n";
  const std::string body = cfg.dump();
  const ebdim_status st =
      ebdim_run_experiment_cb(body.c_str(), f.out_dir.c_str(), progress_line,
                              nullptr);
  if (st == EBDIM_OK) {
    std::cerr << "outputs written to " << f.out_dir << "\n";
    return 0;
  }
  std::cerr << "error: " << ebdim_status_message(st) << ": " << ebdim_last_error()
            << "\n";
  return st == EBDIM_ERROR_INVALID_ARGUMENT ? 1 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ebdim — exceedance-based local-dimension estimation and "
      "regular-variation diagnostics"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* desc;
    const char* experiment;
    bool needs_system;
  };
  const std::vector<Sub> subs = {
      {"zoom", "single-reference shrinking-ball zoom trace", "zoom", true},
      {"ensemble", "ensemble of zoom traces with aggregate statistics",
       "ensemble", true},
      {"ei-sweep", "extremal-index sweep over sampling step and series length",
       "ei-sweep", true},
      {"iid-demo", "i.i.d. vs max-pair peaks-over-threshold comparison",
       "iid-demo", false},
      {"solenoid-measure", "analytic solenoid ball-measure curve",
       "solenoid-measure", false},
      {"cantor-oracle", "exact Cantor ball-measure curve", "cantor-oracle",
       false},
  };

  std::map<std::string, Flags> flags;
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.desc);
    add_run_flags(cmd, flags[s.name]);
  }
  CLI::App* list_cmd =
      app.add_subcommand("list-systems", "print the registered system names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::ostringstream ss;
    const int code = app.exit(e, ss, ss);
    std::cerr << ss.str();
    return code == 0 ? 0 : 1;
  }

  if (list_cmd->parsed()) {
    const int n = ebdim_system_count();
    char name[64];
    for (int i = 0; i < n; ++i) {
      if (ebdim_system_name(i, name, sizeof(name)) == EBDIM_OK)
        std::cout << name << "\n";
    }
    return 0;
  }
  for (const auto& s : subs) {
    CLI::App* cmd = app.get_subcommand(s.name);
    if (cmd->parsed())
      return run(cmd, flags[s.name], s.experiment, s.needs_system);
  }
  return 1;
}
