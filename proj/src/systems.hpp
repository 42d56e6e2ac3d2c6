#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"
#include "vecn.hpp"

namespace ebdim {

enum class SystemKind { discrete, flow, nonautonomous_discrete };

struct SystemSpec {
  std::string name;
  SystemKind kind = SystemKind::discrete;
  int dim = 0;                           // dimension used for distances
  std::map<std::string, double> params;  // validated, deterministic order
};

// Registry of every system used here: henon, cantor-shift, fat-cantor,
// solenoid, lorenz63, lorenz96, henon-heiles.
const std::vector<std::string>& system_names();
SystemSpec system_spec(const std::string& name);
bool is_system(const std::string& name);
// Throws std::invalid_argument when a parameter is outside its range
// (e.g. solenoid contraction outside (0, 1/4)).
void validate_params(const SystemSpec& spec);

// ---------------------------------------------------------------------------
// discrete maps

Vec henon_step(const Vec& s, double a, double b);

// Closed-form Henon fixed point (the one on the attractor side).
Vec henon_fixed_point(double a, double b);

// Non-autonomous tent map, step index n >= 1. Values > 1 escape.
double fat_cantor_step(double x, int n);

// Interval I_n whose points leave [0,1] at step n.
struct Interval {
  double lo, hi;
};
Interval fat_cantor_escape_interval(int n);

enum class FatCantorMode {
  backward,  // uniform inverse-branch choice down `depth` levels
  faithful,  // forward-filter survivors of `depth` iterations
};

// Points approximating the invariant set A_C. In faithful mode an empty
// survivor set throws std::runtime_error (asking for a larger count).
std::vector<double> fat_cantor_sample(std::int64_t count, int depth,
                                      CounterRng rng,
                                      FatCantorMode mode = FatCantorMode::backward);

struct SolenoidState {
  double phi;     // angle in [0, 2pi)
  double v1, v2;  // disk coordinates, |v| < 1
};

SolenoidState solenoid_step(const SolenoidState& s, double a);

// R^3 torus embedding used for all solenoid distances:
// (x, y, z) = ((1 + v1) cos phi, (1 + v1) sin phi, v2)
Vec solenoid_embed(const SolenoidState& s);

// ---------------------------------------------------------------------------
// symbolic cantor shift

inline constexpr int kSymbolicDepth = 64;  // window depth D

// Embedded coordinate sum digits[i] * 3^-(i+1) over the first `depth` digits
// starting at `offset`.
double cantor_embed(const std::vector<std::uint8_t>& digits, std::size_t offset,
                    int depth);

// Symbolic state: digit window over {0,2} plus its embedded coordinate.
struct SymbolicState {
  std::vector<std::uint8_t> digits;
  double embedded = 0.0;

  static SymbolicState from_digits(std::vector<std::uint8_t> d);
};

// Deletes the first digit. Throws std::runtime_error once the digit budget
// is exhausted (empty tail), std::invalid_argument on an empty sequence.
SymbolicState cantor_shift_step(const SymbolicState& s);

// Pre-generated Bernoulli digit tape serving a long shift orbit through a
// sliding window of kSymbolicDepth digits.
class CantorTape {
 public:
  CantorTape(std::int64_t steps, CounterRng rng);

  // embedded coordinate of the current window, then advance
  double next();
  std::int64_t remaining() const {
    return static_cast<std::int64_t>(digits_.size()) - kSymbolicDepth -
           static_cast<std::int64_t>(pos_);
  }

 private:
  std::vector<std::uint8_t> digits_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// flows

// Right-hand side of the named flow with the given parameters.
// Lorenz 96 uses cyclic indexing x_{n+1} = x_1, x_0 = x_n, x_{-1} = x_{n-1}.
void flow_rhs(const std::string& name, const std::map<std::string, double>& params,
              const Vec& y, double t, Vec& out);

// Convenience overload with the registry's default parameters.
Vec flow_rhs(const std::string& name, const Vec& y, double t);

// H = (px^2 + py^2)/2 + (x^2 + y^2)/2 + x^2 y - y^3/3, state (x, px, y, py).
double henon_heiles_energy(const Vec& s);

}  // namespace ebdim
