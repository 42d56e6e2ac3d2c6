#pragma once

#include <cstdint>
#include <vector>

#include "rng.hpp"

namespace ebdim {

// Point of the middle-third Cantor set, base-3 digits over {0,2}.
struct CantorPoint {
  std::vector<std::uint8_t> digits;

  int depth() const { return static_cast<int>(digits.size()); }
  double value() const;  // sum digits[i] 3^-(i+1)

  static CantorPoint from_digits(std::vector<std::uint8_t> d);
  static CantorPoint random(int depth, CounterRng& rng);
};

// Devil's staircase C(x): cumulative distribution of the (1/2,1/2) Bernoulli
// measure on the middle-third Cantor set.
double cantor_ternary(double x);

// Radius written as rho * 3^-level with rho in [1, 3): `level` is the
// smallest m >= 1 with 3^-m <= r.
struct ScaledRadius {
  int level;
  double rho;
};
ScaledRadius cantor_scale_radius(double r);

// mu(B_r(zeta)) for the Bernoulli measure, closed form:
//   2^-(N+1) (1 + C(3^(N+1) (r - 3^-(N+1) - |zeta - x_e|)))
// with the staircase argument clamped to [0,1] and the term dropped when
// negative; x_e is the gap-side endpoint of zeta's level-(N+1) cylinder.
// The scaled entry point keeps endpoint cases exact: every comparison is
// done on digit tails, never on cylinder boundaries in floating point.
double cantor_ball_measure_scaled(const CantorPoint& zeta, int level, double rho);

// Wrapper over a raw radius. r >= 1 saturates at 1; r < 3^-depth or r <= 0
// throws std::invalid_argument.
double cantor_ball_measure(const CantorPoint& zeta, double r);

// mu(B_{b r}) / mu(B_r) from the exact oracle, 0 < b <= 1.
double cantor_ratio(const CantorPoint& zeta, double r, double b);

}  // namespace ebdim
