#include "cantor_measure.hpp"

#include <cmath>
#include <stdexcept>

namespace ebdim {

double CantorPoint::value() const {
  double x = 0.0;
  for (int i = depth() - 1; i >= 0; --i) x = (x + digits[i]) / 3.0;
  return x;
}

CantorPoint CantorPoint::from_digits(std::vector<std::uint8_t> d) {
  for (std::uint8_t v : d)
    if (v != 0 && v != 2)
      throw std::invalid_argument("CantorPoint: digits must be 0 or 2");
  CantorPoint p;
  p.digits = std::move(d);
  return p;
}

CantorPoint CantorPoint::random(int depth, CounterRng& rng) {
  CantorPoint p;
  p.digits.resize(static_cast<std::size_t>(depth));
  for (auto& d : p.digits) d = rng.bernoulli() ? 2 : 0;
  return p;
}

double cantor_ternary(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double out = 0.0, w = 0.5;
  // scan base-3 digits until the first 1; earlier 2s map to binary 1s
  for (int i = 0; i < 64; ++i) {
    x *= 3.0;
    int d = static_cast<int>(x);
    if (d > 2) d = 2;
    x -= d;
    if (d == 1) {
      out += w;
      break;
    }
    if (d == 2) out += w;
    w *= 0.5;
  }
  return out;
}

ScaledRadius cantor_scale_radius(double r) {
  if (!(r > 0.0) || r >= 1.0)
    throw std::invalid_argument("cantor_scale_radius: need 0 < r < 1");
  int m = static_cast<int>(std::floor(-std::log(r) / std::log(3.0))) + 1;
  if (m < 1) m = 1;
  // settle boundaries by direct comparison against the powers used everywhere
  while (std::pow(3.0, -m) > r) ++m;
  while (m > 1 && std::pow(3.0, -(m - 1)) <= r) --m;
  // dividing by the same power keeps radii of the form c * 3^-m exact
  double rho = r / std::pow(3.0, -m);
  if (rho < 1.0) rho = 1.0;  // rounding guard; mathematically rho in [1, 3)
  if (rho >= 3.0) rho = std::nextafter(3.0, 0.0);
  return {m, rho};
}

double cantor_ball_measure_scaled(const CantorPoint& zeta, int level, double rho) {
  if (level < 1) throw std::invalid_argument("cantor_ball_measure: level < 1");
  if (level > zeta.depth())
    throw std::invalid_argument(
        "cantor_ball_measure: radius below digit resolution 3^-depth");
  if (!(rho >= 1.0 && rho < 3.0))
    throw std::invalid_argument("cantor_ball_measure: rho outside [1,3)");

  // tail = 3^level * sum_{i > level} d_i 3^-i, in [0, 1]
  double tail = 0.0;
  for (int i = zeta.depth() - 1; i >= level; --i)
    tail = (tail + zeta.digits[static_cast<std::size_t>(i)]) / 3.0;

  // distance to the gap-side endpoint of the level cylinder, in cylinder units:
  // left child (digit 0) has its gap to the right, right child to the left
  const double e = zeta.digits[static_cast<std::size_t>(level - 1)] == 0
                       ? 1.0 - tail
                       : tail;
  const double arg = rho - 1.0 - e;
  double c = 0.0;
  if (arg > 0.0) c = arg >= 1.0 ? 1.0 : cantor_ternary(arg);
  return std::pow(2.0, -level) * (1.0 + c);
}

double cantor_ball_measure(const CantorPoint& zeta, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("cantor_ball_measure: r must be > 0");
  if (r >= 1.0) return 1.0;
  const ScaledRadius s = cantor_scale_radius(r);
  return cantor_ball_measure_scaled(zeta, s.level, s.rho);
}

double cantor_ratio(const CantorPoint& zeta, double r, double b) {
  if (!(b > 0.0 && b <= 1.0))
    throw std::invalid_argument("cantor_ratio: b must be in (0, 1]");
  if (b == 1.0) return 1.0;
  if (!(r > 0.0)) throw std::invalid_argument("cantor_ratio: r must be > 0");

  if (r >= 1.0) {
    return cantor_ball_measure(zeta, b * r) / 1.0;
  }
  const ScaledRadius s = cantor_scale_radius(r);
  const double den = cantor_ball_measure_scaled(zeta, s.level, s.rho);

  // b = 1/3 shifts the level and keeps rho; doing it in scaled space keeps
  // the self-similar case exact
  if (std::fabs(3.0 * b - 1.0) < 1e-14) {
    return cantor_ball_measure_scaled(zeta, s.level + 1, s.rho) / den;
  }
  double rho_b = s.rho * b;
  int level_b = s.level;
  while (rho_b < 1.0) {
    rho_b *= 3.0;
    ++level_b;
  }
  while (rho_b >= 3.0) {
    rho_b /= 3.0;
    --level_b;
  }
  return cantor_ball_measure_scaled(zeta, level_b, rho_b) / den;
}

}  // namespace ebdim
