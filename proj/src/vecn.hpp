#pragma once

#include <array>
#include <cmath>
#include <initializer_list>

namespace ebdim {

inline constexpr int kMaxDim = 4;

// Phase-space point. Fixed capacity, runtime dimension (all systems here
// live in d <= 4).
struct Vec {
  std::array<double, kMaxDim> c{};
  int dim = 0;

  Vec() = default;
  Vec(std::initializer_list<double> xs) {
    for (double x : xs) c[dim++] = x;
  }

  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }
};

inline double dist2(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim; ++i) {
    const double d = a.c[i] - b.c[i];
    s += d * d;
  }
  return s;
}

inline double dist(const Vec& a, const Vec& b) { return std::sqrt(dist2(a, b)); }

inline bool all_finite(const Vec& v) {
  for (int i = 0; i < v.dim; ++i)
    if (!std::isfinite(v.c[i])) return false;
  return true;
}

}  // namespace ebdim
