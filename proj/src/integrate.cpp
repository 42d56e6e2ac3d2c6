#include "integrate.hpp"

#include <cmath>

namespace ebdim {

FlowSegment rk4_segment(const Rhs& rhs, const Vec& y0, const Vec& f0, double t0,
                        double dt) {
  const int d = y0.dim;
  Vec k2, k3, k4, tmp;
  tmp.dim = d;

  for (int i = 0; i < d; ++i) tmp[i] = y0[i] + 0.5 * dt * f0[i];
  rhs(tmp, t0 + 0.5 * dt, k2);
  for (int i = 0; i < d; ++i) tmp[i] = y0[i] + 0.5 * dt * k2[i];
  rhs(tmp, t0 + 0.5 * dt, k3);
  for (int i = 0; i < d; ++i) tmp[i] = y0[i] + dt * k3[i];
  rhs(tmp, t0 + dt, k4);

  FlowSegment seg;
  seg.t0 = t0;
  seg.t1 = t0 + dt;
  seg.y0 = y0;
  seg.f0 = f0;
  seg.y1.dim = d;
  for (int i = 0; i < d; ++i)
    seg.y1[i] = y0[i] + dt / 6.0 * (f0[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
  rhs(seg.y1, seg.t1, seg.f1);
  return seg;
}

Vec hermite_eval(const FlowSegment& seg, double t) {
  const double h = seg.t1 - seg.t0;
  const double th = (t - seg.t0) / h;
  const double th2 = th * th, th3 = th2 * th;
  const double h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
  const double h10 = th3 - 2.0 * th2 + th;
  const double h01 = -2.0 * th3 + 3.0 * th2;
  const double h11 = th3 - th2;
  Vec out;
  out.dim = seg.y0.dim;
  for (int i = 0; i < out.dim; ++i)
    out[i] = h00 * seg.y0[i] + h10 * h * seg.f0[i] + h01 * seg.y1[i] +
             h11 * h * seg.f1[i];
  return out;
}

double hermite_dist(const FlowSegment& seg, const Vec& zeta, double t) {
  return dist(hermite_eval(seg, t), zeta);
}

void integrate_stream(const Rhs& rhs, const Vec& y0, double t0, double dt,
                      std::int64_t steps,
                      const std::function<bool(const FlowSegment&)>& fn) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
  Vec y = y0, f;
  rhs(y, t0, f);
  for (std::int64_t s = 0; s < steps; ++s) {
    // accumulate time additively to keep segments exactly contiguous
    FlowSegment seg = rk4_segment(rhs, y, f, t0, dt);
    if (!all_finite(seg.y1)) throw IntegrationError(s);
    if (!fn(seg)) return;
    y = seg.y1;
    f = seg.f1;
    t0 = seg.t1;
  }
}

std::vector<FlowSegment> integrate(const Rhs& rhs, const Vec& y0, double t0,
                                   double dt, std::int64_t steps) {
  std::vector<FlowSegment> out;
  out.reserve(static_cast<std::size_t>(steps));
  integrate_stream(rhs, y0, t0, dt, steps, [&](const FlowSegment& seg) {
    out.push_back(seg);
    return true;
  });
  return out;
}

Vec integrate_to(const Rhs& rhs, const Vec& y0, double t0, double dt,
                 std::int64_t steps) {
  Vec y = y0;
  integrate_stream(rhs, y0, t0, dt, steps, [&](const FlowSegment& seg) {
    y = seg.y1;
    return true;
  });
  return y;
}

double golden_minimize(const std::function<double(double)>& f, double lo,
                       double hi, double tol) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace ebdim
