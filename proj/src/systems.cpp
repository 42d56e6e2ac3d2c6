#include "systems.hpp"

#include <algorithm>
#include <cmath>

namespace ebdim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

const std::vector<std::string> kNames = {
    "henon",    "cantor-shift", "fat-cantor",   "solenoid",
    "lorenz63", "lorenz96",     "henon-heiles",
};

}  // namespace

const std::vector<std::string>& system_names() { return kNames; }

bool is_system(const std::string& name) {
  return std::find(kNames.begin(), kNames.end(), name) != kNames.end();
}

SystemSpec system_spec(const std::string& name) {
  SystemSpec s;
  s.name = name;
  if (name == "henon") {
    s.kind = SystemKind::discrete;
    s.dim = 2;
    s.params = {{"a", 1.4}, {"b", 0.3}};
  } else if (name == "cantor-shift") {
    s.kind = SystemKind::discrete;
    s.dim = 1;
    s.params = {};
  } else if (name == "fat-cantor") {
    s.kind = SystemKind::nonautonomous_discrete;
    s.dim = 1;
    s.params = {{"depth", 20}};
  } else if (name == "solenoid") {
    s.kind = SystemKind::discrete;
    s.dim = 3;  // distances taken in the R^3 embedding
    s.params = {{"a", 0.076}};
  } else if (name == "lorenz63") {
    s.kind = SystemKind::flow;
    s.dim = 3;
    s.params = {{"sigma", 10.0}, {"rho", 28.0}, {"beta", 8.0 / 3.0}};
  } else if (name == "lorenz96") {
    s.kind = SystemKind::flow;
    s.dim = 4;
    s.params = {{"F", 32.0}};
  } else if (name == "henon-heiles") {
    s.kind = SystemKind::flow;
    s.dim = 4;
    s.params = {};
  } else {
    throw std::invalid_argument("unknown system: " + name);
  }
  return s;
}

void validate_params(const SystemSpec& spec) {
  auto get = [&](const char* key, double dflt) {
    auto it = spec.params.find(key);
    return it == spec.params.end() ? dflt : it->second;
  };
  if (spec.name == "solenoid") {
    const double a = get("a", 0.076);
    if (!(a > 0.0 && a < 0.25))
      throw std::invalid_argument("solenoid: contraction a must be in (0, 1/4)");
  } else if (spec.name == "henon") {
    if (!(get("a", 1.4) > 0.0)) throw std::invalid_argument("henon: a must be > 0");
  } else if (spec.name == "lorenz63") {
    if (!(get("beta", 8.0 / 3.0) > 0.0))
      throw std::invalid_argument("lorenz63: beta must be > 0");
  } else if (spec.name == "fat-cantor") {
    if (!(get("depth", 20) >= 1))
      throw std::invalid_argument("fat-cantor: depth must be >= 1");
  } else if (!is_system(spec.name)) {
    throw std::invalid_argument("unknown system: " + spec.name);
  }
}

// ---------------------------------------------------------------------------

Vec henon_step(const Vec& s, double a, double b) {
  if (s.dim != 2) throw std::invalid_argument("henon_step: state must have dim 2");
  Vec out;
  out.dim = 2;
  out[0] = 1.0 - a * s[0] * s[0] + s[1];
  out[1] = b * s[0];
  return out;
}

Vec henon_fixed_point(double a, double b) {
  const double x = ((b - 1.0) + std::sqrt((b - 1.0) * (b - 1.0) + 4.0 * a)) / (2.0 * a);
  return Vec{x, b * x};
}

double fat_cantor_step(double x, int n) {
  const double slope = 2.0 * (1.0 + std::pow(2.0, -n - 1));
  return x <= 0.5 ? slope * x : slope * (1.0 - x);
}

Interval fat_cantor_escape_interval(int n) {
  const double edge = 1.0 / (2.0 * (1.0 + std::pow(2.0, -n - 1)));
  return {edge, 1.0 - edge};
}

std::vector<double> fat_cantor_sample(std::int64_t count, int depth, CounterRng rng,
                                      FatCantorMode mode) {
  if (count < 1) throw std::invalid_argument("fat_cantor_sample: count must be >= 1");
  if (depth < 1) throw std::invalid_argument("fat_cantor_sample: depth must be >= 1");
  std::vector<double> out;
  if (mode == FatCantorMode::faithful) {
    // the literal procedure: uniform draws filtered by forward survival
    for (std::int64_t i = 0; i < count; ++i) {
      double x = rng.uniform();
      const double x0 = x;
      bool alive = true;
      for (int n = 1; n <= depth; ++n) {
        x = fat_cantor_step(x, n);
        if (x > 1.0 || x < 0.0) {
          alive = false;
          break;
        }
      }
      if (alive) out.push_back(x0);
    }
    if (out.empty())
      throw std::runtime_error(
          "fat_cantor_sample: no survivors; increase count (faithful mode)");
    return out;
  }
  // backward mode: pull a uniform endpoint back through `depth` random
  // inverse branches; inverse of step n has slope 1/(2(1+2^-n-1)) per branch
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    double y = rng.uniform();
    for (int n = depth; n >= 1; --n) {
      const double slope = 2.0 * (1.0 + std::pow(2.0, -n - 1));
      const double pre = y / slope;
      y = rng.bernoulli() ? pre : 1.0 - pre;
    }
    out.push_back(y);
  }
  return out;
}

SolenoidState solenoid_step(const SolenoidState& s, double a) {
  SolenoidState out;
  out.phi = std::fmod(2.0 * s.phi, kTwoPi);
  if (out.phi < 0.0) out.phi += kTwoPi;
  out.v1 = a * s.v1 + 0.5 * std::cos(s.phi);
  out.v2 = a * s.v2 + 0.5 * std::sin(s.phi);
  return out;
}

Vec solenoid_embed(const SolenoidState& s) {
  const double ring = 1.0 + s.v1;
  return Vec{ring * std::cos(s.phi), ring * std::sin(s.phi), s.v2};
}

// ---------------------------------------------------------------------------

double cantor_embed(const std::vector<std::uint8_t>& digits, std::size_t offset,
                    int depth) {
  // Horner from the deep end; digits beyond the window contribute < 3^-depth
  double x = 0.0;
  const int n = static_cast<int>(std::min<std::size_t>(depth, digits.size() - offset));
  for (int i = n - 1; i >= 0; --i) x = (x + digits[offset + i]) / 3.0;
  return x;
}

SymbolicState SymbolicState::from_digits(std::vector<std::uint8_t> d) {
  for (std::uint8_t v : d)
    if (v != 0 && v != 2)
      throw std::invalid_argument("symbolic digits must be 0 or 2");
  SymbolicState s;
  s.digits = std::move(d);
  s.embedded = cantor_embed(s.digits, 0, static_cast<int>(s.digits.size()));
  return s;
}

SymbolicState cantor_shift_step(const SymbolicState& s) {
  if (s.digits.empty())
    throw std::invalid_argument("cantor_shift_step: empty digit sequence");
  if (s.digits.size() == 1)
    throw std::runtime_error("cantor_shift_step: digit budget exhausted");
  SymbolicState out;
  out.digits.assign(s.digits.begin() + 1, s.digits.end());
  out.embedded = cantor_embed(out.digits, 0, static_cast<int>(out.digits.size()));
  return out;
}

CantorTape::CantorTape(std::int64_t steps, CounterRng rng) {
  if (steps < 0) throw std::invalid_argument("CantorTape: negative step count");
  digits_.resize(static_cast<std::size_t>(steps) + kSymbolicDepth);
  for (auto& d : digits_) d = rng.bernoulli() ? 2 : 0;
}

double CantorTape::next() {
  if (remaining() < 0) throw std::runtime_error("CantorTape: digit budget exhausted");
  // distances bottom out near 3^-40 ~ 1e-20, well below double resolution,
  // so evaluating 40 of the 64 window digits loses nothing
  const double x = cantor_embed(digits_, pos_, 40);
  ++pos_;
  return x;
}

// ---------------------------------------------------------------------------

void flow_rhs(const std::string& name, const std::map<std::string, double>& params,
              const Vec& y, double /*t*/, Vec& out) {
  auto get = [&](const char* key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  };
  if (name == "lorenz63") {
    const double sigma = get("sigma", 10.0), rho = get("rho", 28.0),
                 beta = get("beta", 8.0 / 3.0);
    out.dim = 3;
    out[0] = sigma * (y[1] - y[0]);
    out[1] = y[0] * (rho - y[2]) - y[1];
    out[2] = y[0] * y[1] - beta * y[2];
  } else if (name == "lorenz96") {
    const double F = get("F", 32.0);
    const int n = 4;
    out.dim = n;
    for (int j = 0; j < n; ++j) {
      const double xm1 = y[(j - 1 + n) % n];
      const double xm2 = y[(j - 2 + n) % n];
      const double xp1 = y[(j + 1) % n];
      out[j] = xm1 * (xp1 - xm2) - y[j] + F;
    }
  } else if (name == "henon-heiles") {
    // state ordering (x, px, y, py)
    const double x = y[0], px = y[1], yy = y[2], py = y[3];
    out.dim = 4;
    out[0] = px;
    out[1] = -x - 2.0 * x * yy;
    out[2] = py;
    out[3] = -yy - (x * x - yy * yy);
  } else {
    throw std::invalid_argument("flow_rhs: unknown system: " + name);
  }
}

Vec flow_rhs(const std::string& name, const Vec& y, double t) {
  Vec out;
  flow_rhs(name, system_spec(name).params, y, t, out);
  return out;
}

double henon_heiles_energy(const Vec& s) {
  const double x = s[0], px = s[1], y = s[2], py = s[3];
  return 0.5 * (px * px + py * py) + 0.5 * (x * x + y * y) + x * x * y -
         y * y * y / 3.0;
}

}  // namespace ebdim
