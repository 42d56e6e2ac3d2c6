#include "estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "recurrence.hpp"

namespace ebdim {

EstimateRecord ebd_fit(const ExcessSample& s) {
  if (s.excesses.size() < 10)
    throw std::invalid_argument("ebd_fit: need at least 10 excesses");
  double mean = 0.0;
  for (double u : s.excesses) mean += u;
  mean /= static_cast<double>(s.excesses.size());
  if (!(mean > 0.0))
    throw std::invalid_argument("ebd_fit: degenerate excess sample");
  EstimateRecord rec;
  rec.kind = EstimateKind::ebd;
  rec.n = static_cast<std::int64_t>(s.excesses.size());
  rec.value = 1.0 / mean;
  rec.stderr_value = rec.value / std::sqrt(static_cast<double>(rec.n));
  return rec;
}

double order_statistic_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("quantile must be in (0, 1)");
  // threshold leaving fraction q below: the ceil(qN)-th smallest
  const std::size_t n = values.size();
  std::size_t idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  if (idx < 1) idx = 1;
  if (idx > n) idx = n;
  std::nth_element(values.begin(), values.begin() + (idx - 1), values.end());
  return values[idx - 1];
}

ExcessSample excesses_from_buffer(const RecurrenceBuffer& buf, double q) {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("excesses_from_buffer: q must be in (0, 1)");
  if (buf.size() == 0) throw std::invalid_argument("excesses_from_buffer: empty buffer");
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(buf.size()));
  for (const auto& e : buf.entries()) x.push_back(-std::log(e.dist));
  ExcessSample s;
  s.quantile = q;
  s.threshold = order_statistic_quantile(x, q);
  for (double xi : x)
    if (xi > s.threshold) s.excesses.push_back(xi - s.threshold);
  if (s.excesses.empty())
    throw std::invalid_argument("excesses_from_buffer: zero-width excesses");
  return s;
}

double ebd_at_radius(const std::vector<double>& distances, double radius) {
  double mean = 0.0;
  std::int64_t n = 0;
  for (double d : distances) {
    if (!(d > 0.0)) continue;  // exact hits carry no excess information
    mean += std::log(radius / d);
    ++n;
  }
  if (n == 0 || !(mean > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(n) / mean;
}

double regular_variation_ratio(const RecurrenceBuffer& buf, double b) {
  if (!(b > 0.0 && b <= 1.0))
    throw std::invalid_argument("regular_variation_ratio: b must be in (0, 1]");
  if (buf.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  const double r = buf.radius();
  return static_cast<double>(buf.count_within(b * r)) /
         static_cast<double>(buf.size());
}

namespace {

struct RunningFit {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = 0;
  void add(double x, double y) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++n;
  }
  double slope() const { return (n * sxy - sx * sy) / (n * sxx - sx * sx); }
  double intercept() const { return (sy - slope() * sx) / n; }
  double r2() const {
    const double num = (n * sxy - sx * sy);
    const double den = (n * sxx - sx * sx) * (n * syy - sy * sy);
    if (den <= 0.0) return 0.0;
    return num * num / den;
  }
};

}  // namespace

LinearFit longest_linear_window(const std::vector<double>& x,
                                const std::vector<double>& y, int min_points,
                                double r2_min) {
  const int n = static_cast<int>(x.size());
  LinearFit best;
  // greedy extension from every start; windows are short so O(n^2) is fine
  for (int lo = 0; lo + min_points - 1 < n; ++lo) {
    RunningFit f;
    for (int hi = lo; hi < n; ++hi) {
      f.add(x[hi], y[hi]);
      if (f.n < min_points) continue;
      if (f.r2() < r2_min) continue;
      const int len = hi - lo + 1;
      const int best_len = best.hi - best.lo + 1;
      if (!best.ok || len > best_len) {
        best.ok = true;
        best.lo = lo;
        best.hi = hi;
        best.slope = f.slope();
        best.intercept = f.intercept();
        best.r2 = f.r2();
      }
    }
  }
  if (!best.ok && n >= 2) {
    // best-available fallback: whole range
    RunningFit f;
    for (int i = 0; i < n; ++i) f.add(x[i], y[i]);
    best.lo = 0;
    best.hi = n - 1;
    best.slope = f.slope();
    best.intercept = f.intercept();
    best.r2 = f.r2();
  }
  return best;
}

EstimateRecord correlation_dimension(const std::vector<double>& distances,
                                     int grid_points) {
  if (distances.size() < 2)
    throw std::invalid_argument("correlation_dimension: need at least 2 points");
  std::vector<double> d = distances;
  std::sort(d.begin(), d.end());
  const double hi = d.back();
  double lo = d[d.size() / 100];  // skip the extreme close tail
  if (!(lo > 0.0)) lo = hi * 1e-12;
  std::vector<double> eps(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i)
    eps[static_cast<std::size_t>(i)] =
        lo * std::pow(hi / lo, static_cast<double>(i) / (grid_points - 1));

  EstimateRecord rec;
  rec.kind = EstimateKind::correlation;
  rec.n = static_cast<std::int64_t>(d.size());
  if (!(hi > lo)) {  // all points at one distance: no scaling information
    rec.flagged = true;
    rec.value = 0.0;
    return rec;
  }
  std::vector<double> lx, ly;
  for (double e : eps) {
    const auto cnt = std::upper_bound(d.begin(), d.end(), e) - d.begin();
    if (cnt == 0) continue;
    lx.push_back(std::log(e));
    ly.push_back(std::log(static_cast<double>(cnt) / static_cast<double>(d.size())));
  }
  LinearFit fit = longest_linear_window(lx, ly);
  rec.value = fit.slope;
  rec.flagged = !fit.ok;
  if (!lx.empty()) {
    rec.window_lo = std::exp(lx[static_cast<std::size_t>(fit.lo)]);
    rec.window_hi = std::exp(lx[static_cast<std::size_t>(fit.hi)]);
  }
  const int m = fit.hi - fit.lo + 1;
  rec.stderr_value = m > 2 ? std::fabs(fit.slope) * std::sqrt((1.0 - fit.r2) /
                                                              (fit.r2 * (m - 2)))
                           : std::numeric_limits<double>::quiet_NaN();
  return rec;
}

EstimateRecord correlation_dimension(const std::vector<Vec>& points,
                                     const Vec& zeta,
                                     const std::vector<double>& eps_grid) {
  if (points.size() < 100)
    throw std::invalid_argument("correlation_dimension: need at least 100 points");
  std::vector<double> d;
  d.reserve(points.size());
  for (const auto& p : points) d.push_back(dist(p, zeta));
  std::sort(d.begin(), d.end());

  EstimateRecord rec;
  rec.kind = EstimateKind::correlation;
  rec.n = static_cast<std::int64_t>(points.size());
  std::vector<double> lx, ly;
  for (double e : eps_grid) {
    const auto cnt = std::lower_bound(d.begin(), d.end(), e) - d.begin();
    if (cnt == 0) continue;
    lx.push_back(std::log(e));
    ly.push_back(std::log(static_cast<double>(cnt) / static_cast<double>(d.size())));
  }
  if (lx.size() < 2) {
    rec.flagged = true;
    return rec;
  }
  LinearFit fit = longest_linear_window(lx, ly);
  rec.value = fit.slope;
  rec.flagged = !fit.ok;
  rec.window_lo = std::exp(lx[static_cast<std::size_t>(fit.lo)]);
  rec.window_hi = std::exp(lx[static_cast<std::size_t>(fit.hi)]);
  return rec;
}

ExceedanceIndexSeries exceedance_indices(const std::vector<double>& series,
                                         double q, double dt) {
  ExceedanceIndexSeries out;
  out.series_len = static_cast<std::int64_t>(series.size());
  out.dt = dt;
  const double g = order_statistic_quantile(series, q);
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series[i] > g) out.indices.push_back(static_cast<std::int64_t>(i));
  return out;
}

EstimateRecord suveges_theta(const ExceedanceIndexSeries& e, double q) {
  if (e.indices.size() < 2)
    throw std::invalid_argument("suveges_theta: need at least 2 exceedances");
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("suveges_theta: q must be in (0, 1)");
  for (std::size_t i = 1; i < e.indices.size(); ++i)
    if (e.indices[i] <= e.indices[i - 1])
      throw std::invalid_argument("suveges_theta: indices must be increasing");

  const double p = 1.0 - q;
  const std::int64_t n_exc = static_cast<std::int64_t>(e.indices.size());
  double sum_ps = 0.0;
  std::int64_t n_pos = 0;  // gaps larger than one index
  for (std::size_t i = 1; i < e.indices.size(); ++i) {
    const double s = static_cast<double>(e.indices[i] - e.indices[i - 1] - 1);
    sum_ps += p * s;
    if (s > 0.0) ++n_pos;
  }

  EstimateRecord rec;
  rec.kind = EstimateKind::extremal_index;
  rec.n = n_exc;
  const double lower_clamp = 1.0 / static_cast<double>(n_exc);
  if (sum_ps <= 0.0) {
    // one solid cluster; no gap information at all
    rec.value = lower_clamp;
    rec.flagged = true;
    return rec;
  }
  const double nc = static_cast<double>(n_pos);
  const double m = static_cast<double>(n_exc - 1);
  const double t = sum_ps + m + nc;
  const double disc = t * t - 8.0 * nc * sum_ps;
  double theta = (t - std::sqrt(std::max(disc, 0.0))) / (2.0 * sum_ps);
  if (theta > 1.0) theta = 1.0;
  if (theta < lower_clamp) {
    theta = lower_clamp;
    rec.flagged = true;
  }
  rec.value = theta;
  rec.stderr_value = theta * std::sqrt((1.0 - theta) / m + 1.0 / m);
  return rec;
}

double mean_cluster_time(double theta, double dt) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw std::invalid_argument("mean_cluster_time: theta must be in (0, 1]");
  if (!(dt > 0.0)) throw std::invalid_argument("mean_cluster_time: dt must be > 0");
  return dt / theta;
}

MaxPairSeries synthetic_max_pair(std::int64_t n, double lambda, CounterRng rng) {
  if (n < 2) throw std::invalid_argument("synthetic_max_pair: n must be >= 2");
  MaxPairSeries out;
  out.v.resize(static_cast<std::size_t>(n));
  out.u.resize(static_cast<std::size_t>(n));
  double prev = rng.exponential(lambda);  // V_0, not part of the series
  for (std::int64_t i = 0; i < n; ++i) {
    const double vi = rng.exponential(lambda);
    out.v[static_cast<std::size_t>(i)] = vi;
    out.u[static_cast<std::size_t>(i)] = std::max(prev, vi);
    prev = vi;
  }
  return out;
}

double ks_distance(std::vector<double> sample,
                   const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    worst = std::max(worst, std::max(std::fabs(f - lo), std::fabs(f - hi)));
  }
  return worst;
}

}  // namespace ebdim
