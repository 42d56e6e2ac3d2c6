#include "ebdim.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "cantor_measure.hpp"
#include "estimators.hpp"
#include "experiments.hpp"
#include "solenoid_measure.hpp"
#include "systems.hpp"

namespace {

thread_local std::string g_last_error;

ebdim_status fail(ebdim_status s, const char* what) {
  g_last_error = what ? what : "";
  return s;
}

template <class Fn>
ebdim_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(EBDIM_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(EBDIM_ERROR_IO, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(EBDIM_ERROR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(EBDIM_ERROR_RUNTIME, e.what());
  } catch (...) {
    return fail(EBDIM_ERROR_RUNTIME, "unknown error");
  }
}

std::vector<std::uint8_t> digits_from(const uint8_t* digits, size_t depth) {
  if (!digits || depth == 0)
    throw std::invalid_argument("digits must be non-null and depth >= 1");
  return std::vector<std::uint8_t>(digits, digits + depth);
}

}  // namespace

struct ebdim_system {
  ebdim::SystemSpec spec;
};

extern "C" {

const char* ebdim_version(void) { return ebdim::kArtifactVersion; }

const char* ebdim_status_message(ebdim_status status) {
  switch (status) {
    case EBDIM_OK:
      return "ok";
    case EBDIM_ERROR_INVALID_ARGUMENT:
      return "invalid argument";
    case EBDIM_ERROR_RUNTIME:
      return "runtime failure";
    case EBDIM_ERROR_IO:
      return "i/o failure";
    case EBDIM_ERROR_BUFFER_TOO_SMALL:
      return "buffer too small";
  }
  return "unknown status";
}

const char* ebdim_last_error(void) { return g_last_error.c_str(); }

int ebdim_system_count(void) {
  return static_cast<int>(ebdim::system_names().size());
}

ebdim_status ebdim_system_name(int index, char* buf, size_t buflen) {
  return guarded([&]() {
    const auto& names = ebdim::system_names();
    if (index < 0 || index >= static_cast<int>(names.size()))
      throw std::invalid_argument("system index out of range");
    if (!buf) throw std::invalid_argument("buf must be non-null");
    const std::string& name = names[static_cast<std::size_t>(index)];
    if (buflen < name.size() + 1)
      return fail(EBDIM_ERROR_BUFFER_TOO_SMALL, "name does not fit");
    std::memcpy(buf, name.c_str(), name.size() + 1);
    return EBDIM_OK;
  });
}

ebdim_status ebdim_system_open(const char* name, ebdim_system** out) {
  return guarded([&]() {
    if (!name || !out) throw std::invalid_argument("null argument");
    auto* sys = new ebdim_system{ebdim::system_spec(name)};
    *out = sys;
    return EBDIM_OK;
  });
}

void ebdim_system_close(ebdim_system* sys) { delete sys; }

int ebdim_system_dim(const ebdim_system* sys) { return sys ? sys->spec.dim : 0; }

int ebdim_system_is_flow(const ebdim_system* sys) {
  return sys && sys->spec.kind == ebdim::SystemKind::flow ? 1 : 0;
}

ebdim_status ebdim_system_set_param(ebdim_system* sys, const char* key,
                                    double value) {
  return guarded([&]() {
    if (!sys || !key) throw std::invalid_argument("null argument");
    if (!sys->spec.params.count(key))
      throw std::invalid_argument(std::string("unknown parameter: ") + key);
    ebdim::SystemSpec trial = sys->spec;
    trial.params[key] = value;
    ebdim::validate_params(trial);
    sys->spec = trial;
    return EBDIM_OK;
  });
}

ebdim_status ebdim_system_step_n(const ebdim_system* sys, const double* in,
                                 int64_t step_index, double* out) {
  return guarded([&]() {
    if (!sys || !in || !out) throw std::invalid_argument("null argument");
    const auto& spec = sys->spec;
    if (spec.kind == ebdim::SystemKind::flow)
      throw std::invalid_argument("step applies to discrete maps only");
    if (spec.name == "henon") {
      ebdim::Vec s{in[0], in[1]};
      ebdim::Vec r = ebdim::henon_step(s, spec.params.at("a"), spec.params.at("b"));
      out[0] = r[0];
      out[1] = r[1];
    } else if (spec.name == "cantor-shift") {
      double x = in[0];
      if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("cantor-shift state must be in [0, 1]");
      x *= 3.0;
      out[0] = x - std::floor(x);
    } else if (spec.name == "fat-cantor") {
      if (step_index < 1)
        throw std::invalid_argument("fat-cantor needs step_index >= 1");
      out[0] = ebdim::fat_cantor_step(in[0], static_cast<int>(step_index));
    } else if (spec.name == "solenoid") {
      ebdim::SolenoidState s{in[0], in[1], in[2]};
      ebdim::SolenoidState r = ebdim::solenoid_step(s, spec.params.at("a"));
      out[0] = r.phi;
      out[1] = r.v1;
      out[2] = r.v2;
    } else {
      throw std::invalid_argument("step not available for " + spec.name);
    }
    return EBDIM_OK;
  });
}

ebdim_status ebdim_system_step(const ebdim_system* sys, const double* in,
                               double* out) {
  return ebdim_system_step_n(sys, in, 1, out);
}

ebdim_status ebdim_system_rhs(const ebdim_system* sys, const double* state,
                              double t, double* deriv) {
  return guarded([&]() {
    if (!sys || !state || !deriv) throw std::invalid_argument("null argument");
    if (sys->spec.kind != ebdim::SystemKind::flow)
      throw std::invalid_argument("rhs applies to flows only");
    ebdim::Vec y;
    y.dim = sys->spec.dim;
    for (int i = 0; i < y.dim; ++i) y[i] = state[i];
    ebdim::Vec dy;
    ebdim::flow_rhs(sys->spec.name, sys->spec.params, y, t, dy);
    for (int i = 0; i < dy.dim; ++i) deriv[i] = dy[i];
    return EBDIM_OK;
  });
}

ebdim_status ebdim_cantor_ternary(double x, double* out) {
  return guarded([&]() {
    if (!out) throw std::invalid_argument("null argument");
    if (!(x >= 0.0 && x <= 1.0))
      throw std::invalid_argument("cantor_ternary domain is [0, 1]");
    *out = ebdim::cantor_ternary(x);
    return EBDIM_OK;
  });
}

ebdim_status ebdim_cantor_ball_measure(const uint8_t* digits, size_t depth,
                                       double radius, double* mu) {
  return guarded([&]() {
    if (!mu) throw std::invalid_argument("null argument");
    const auto z = ebdim::CantorPoint::from_digits(digits_from(digits, depth));
    *mu = ebdim::cantor_ball_measure(z, radius);
    return EBDIM_OK;
  });
}

ebdim_status ebdim_cantor_ratio(const uint8_t* digits, size_t depth,
                                double radius, double b, double* out) {
  return guarded([&]() {
    if (!out) throw std::invalid_argument("null argument");
    const auto z = ebdim::CantorPoint::from_digits(digits_from(digits, depth));
    *out = ebdim::cantor_ratio(z, radius, b);
    return EBDIM_OK;
  });
}

ebdim_status ebdim_solenoid_dimension(double contraction, double* out) {
  return guarded([&]() {
    if (!out) throw std::invalid_argument("null argument");
    *out = ebdim::solenoid_dimension(contraction);
    return EBDIM_OK;
  });
}

ebdim_status ebdim_solenoid_branch_points(int depth, double contraction,
                                          double section_angle, const double v0[2],
                                          double* xy, size_t cap_points,
                                          size_t* n_points) {
  return guarded([&]() {
    if (!xy || !n_points || !v0) throw std::invalid_argument("null argument");
    if (depth < 1 || depth > 30)
      throw std::invalid_argument("depth must be in [1, 30]");
    const size_t need = static_cast<size_t>(1) << depth;
    *n_points = need;
    if (cap_points < need)
      return fail(EBDIM_ERROR_BUFFER_TOO_SMALL, "need 2^depth points");
    const auto pts = ebdim::solenoid_branch_points(depth, contraction,
                                                   section_angle, {v0[0], v0[1]});
    for (size_t i = 0; i < pts.size(); ++i) {
      xy[2 * i] = pts[i][0];
      xy[2 * i + 1] = pts[i][1];
    }
    return EBDIM_OK;
  });
}

ebdim_status ebdim_solenoid_ball_measure(int depth, double contraction,
                                         double section_angle,
                                         uint32_t center_branch, const double v0[2],
                                         double radius, int raw_form, double* mu) {
  return guarded([&]() {
    if (!mu || !v0) throw std::invalid_argument("null argument");
    ebdim::SolenoidQuery q;
    q.depth = depth;
    q.contraction = contraction;
    q.section_angle = section_angle;
    q.center_branch = center_branch;
    q.v0 = {v0[0], v0[1]};
    q.radius = radius;
    q.raw_distance_form = raw_form != 0;
    *mu = ebdim::solenoid_ball_measure(q);
    return EBDIM_OK;
  });
}

ebdim_status ebdim_pot_fit(const double* series, size_t n, double q,
                           double* value, double* stderr_out) {
  return guarded([&]() {
    if (!series || !value) throw std::invalid_argument("null argument");
    std::vector<double> v(series, series + n);
    ebdim::ExcessSample ex;
    ex.quantile = q;
    ex.threshold = ebdim::order_statistic_quantile(v, q);
    for (double x : v)
      if (x > ex.threshold) ex.excesses.push_back(x - ex.threshold);
    const ebdim::EstimateRecord rec = ebdim::ebd_fit(ex);
    *value = rec.value;
    if (stderr_out) *stderr_out = rec.stderr_value;
    return EBDIM_OK;
  });
}

ebdim_status ebdim_ebd_at_radius(const double* distances, size_t n, double radius,
                                 double* value) {
  return guarded([&]() {
    if (!distances || !value) throw std::invalid_argument("null argument");
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be > 0");
    *value = ebdim::ebd_at_radius(std::vector<double>(distances, distances + n),
                                  radius);
    return EBDIM_OK;
  });
}

ebdim_status ebdim_correlation_dimension(const double* distances, size_t n,
                                         double* value, int* flagged) {
  return guarded([&]() {
    if (!distances || !value) throw std::invalid_argument("null argument");
    const ebdim::EstimateRecord rec = ebdim::correlation_dimension(
        std::vector<double>(distances, distances + n));
    *value = rec.value;
    if (flagged) *flagged = rec.flagged ? 1 : 0;
    return EBDIM_OK;
  });
}

ebdim_status ebdim_suveges_theta(const int64_t* indices, size_t n_indices,
                                 int64_t series_len, double q, double* theta,
                                 int* flagged) {
  return guarded([&]() {
    if (!indices || !theta) throw std::invalid_argument("null argument");
    ebdim::ExceedanceIndexSeries e;
    e.indices.assign(indices, indices + n_indices);
    e.series_len = series_len;
    const ebdim::EstimateRecord rec = ebdim::suveges_theta(e, q);
    *theta = rec.value;
    if (flagged) *flagged = rec.flagged ? 1 : 0;
    return EBDIM_OK;
  });
}

ebdim_status ebdim_mean_cluster_time(double theta, double dt, double* out) {
  return guarded([&]() {
    if (!out) throw std::invalid_argument("null argument");
    *out = ebdim::mean_cluster_time(theta, dt);
    return EBDIM_OK;
  });
}

ebdim_status ebdim_run_experiment_cb(const char* config_json, const char* out_dir,
                                     ebdim_progress_fn cb, void* user) {
  return guarded([&]() {
    if (!config_json || !out_dir) throw std::invalid_argument("null argument");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    ebdim::ExperimentConfig cfg;
    try {
      cfg = ebdim::ExperimentConfig::from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("config field error: ") + e.what());
    }
    ebdim::ProgressFn progress;
    if (cb)
      progress = [cb, user](const std::string& stage, double frac) {
        cb(stage.c_str(), frac, user);
      };
    ebdim::run_experiment(cfg, out_dir, progress);
    return EBDIM_OK;
  });
}

ebdim_status ebdim_run_experiment(const char* config_json, const char* out_dir) {
  return ebdim_run_experiment_cb(config_json, out_dir, nullptr, nullptr);
}

}  // extern "C"
