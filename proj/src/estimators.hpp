#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "rng.hpp"
#include "vecn.hpp"

namespace ebdim {

class RecurrenceBuffer;

// Excesses u_i = X_i - g_q of X = -log(distance) over the empirical
// q-quantile threshold within a sample.
struct ExcessSample {
  double threshold = 0.0;
  double quantile = 0.0;
  std::vector<double> excesses;
};

enum class EstimateKind { ebd, correlation, extremal_index, cluster_time };

struct EstimateRecord {
  double value = 0.0;
  EstimateKind kind = EstimateKind::ebd;
  std::int64_t n = 0;
  double stderr_value = std::numeric_limits<double>::quiet_NaN();
  bool flagged = false;     // degenerate input / no qualifying fit window
  double window_lo = 0.0;   // correlation: fitted eps range
  double window_hi = 0.0;
};

// Exponential-tail fit: value = 1 / mean(excesses), stderr = value / sqrt(n).
EstimateRecord ebd_fit(const ExcessSample& s);

// Thresholds are empirical order statistics, no interpolation; q = 0.99
// leaves 99% of the sample below the threshold.
double order_statistic_quantile(std::vector<double> values, double q);

ExcessSample excesses_from_buffer(const RecurrenceBuffer& buf, double q);

// Exceedance-based dimension over every tracked point: the threshold sits at
// the current ball radius, so all k distances are excesses of -log d.
double ebd_at_radius(const std::vector<double>& distances, double radius);

// count(d <= b r) / k with r the buffer radius.
double regular_variation_ratio(const RecurrenceBuffer& buf, double b);

// Least-squares fit over the longest contiguous log-log window with
// R^2 >= 0.99 and at least `min_points` grid points; ties toward smaller x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int lo = 0, hi = 0;  // inclusive window indices
  bool ok = false;
};
LinearFit longest_linear_window(const std::vector<double>& x,
                                const std::vector<double>& y,
                                int min_points = 5, double r2_min = 0.99);

// Correlation-sum local dimension around zeta: S(eps) = count(d < eps)/N on a
// log-spaced grid, slope of the largest linear region of log S vs log eps.
EstimateRecord correlation_dimension(const std::vector<double>& distances,
                                     int grid_points = 24);
EstimateRecord correlation_dimension(const std::vector<Vec>& points,
                                     const Vec& zeta,
                                     const std::vector<double>& eps_grid);

// Exceedance positions of a discrete series, for the extremal index.
struct ExceedanceIndexSeries {
  std::vector<std::int64_t> indices;  // strictly increasing, in [0, n)
  std::int64_t series_len = 0;
  double dt = 1.0;
};

ExceedanceIndexSeries exceedance_indices(const std::vector<double>& series,
                                         double q, double dt = 1.0);

// Inter-exceedance likelihood estimator of the extremal index; value clamped
// to (0, 1]. A single cluster (all gaps 1) flags the record and reports the
// 1/N lower clamp.
EstimateRecord suveges_theta(const ExceedanceIndexSeries& e, double q);

// <t_c> = dt / theta
double mean_cluster_time(double theta, double dt);

// i.i.d. V ~ Exp(scale lambda) and U_i = max(V_{i-1}, V_i); both length n.
struct MaxPairSeries {
  std::vector<double> v, u;
};
MaxPairSeries synthetic_max_pair(std::int64_t n, double lambda, CounterRng rng);

// One-sample Kolmogorov-Smirnov distance against a cdf evaluated per point.
double ks_distance(std::vector<double> sample,
                   const std::function<double(double)>& cdf);

}  // namespace ebdim
