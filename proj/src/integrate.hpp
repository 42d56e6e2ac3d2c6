#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "vecn.hpp"

namespace ebdim {

// One fixed step of the trajectory with endpoint derivatives, enough for
// cubic-Hermite dense output.
struct FlowSegment {
  double t0 = 0.0, t1 = 0.0;
  Vec y0, y1;
  Vec f0, f1;
};

using Rhs = std::function<void(const Vec&, double, Vec&)>;

struct IntegrationError : std::runtime_error {
  std::int64_t step;
  explicit IntegrationError(std::int64_t s)
      : std::runtime_error("non-finite state at step " + std::to_string(s)),
        step(s) {}
};

// Classical RK4 over [t0, t0+dt]. `f0` must hold rhs(y0, t0); the segment
// returns with f1 filled so the next step can reuse it.
FlowSegment rk4_segment(const Rhs& rhs, const Vec& y0, const Vec& f0, double t0,
                        double dt);

// Dense output: cubic Hermite on each coordinate; exact at both endpoints.
Vec hermite_eval(const FlowSegment& seg, double t);
double hermite_dist(const FlowSegment& seg, const Vec& zeta, double t);

// Fixed-step trajectory; throws IntegrationError (with the failing step
// index) if the state stops being finite.
std::vector<FlowSegment> integrate(const Rhs& rhs, const Vec& y0, double t0,
                                   double dt, std::int64_t steps);

// Streaming variant: fn(segment) is called per step; return false to stop.
void integrate_stream(const Rhs& rhs, const Vec& y0, double t0, double dt,
                      std::int64_t steps,
                      const std::function<bool(const FlowSegment&)>& fn);

// Endpoint state after `steps` fixed steps.
Vec integrate_to(const Rhs& rhs, const Vec& y0, double t0, double dt,
                 std::int64_t steps);

// Golden-section minimum of a unimodal-ish scalar function on [lo, hi].
double golden_minimize(const std::function<double(double)>& f, double lo,
                       double hi, double tol);

// Bisection root of f on [lo, hi] assuming a sign change.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol);

}  // namespace ebdim
