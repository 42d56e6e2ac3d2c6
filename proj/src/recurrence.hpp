#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "integrate.hpp"
#include "vecn.hpp"

namespace ebdim {

// ---------------------------------------------------------------------------
// bounded store of the k closest recurrences

struct BufferEntry {
  double dist;
  std::int64_t index;
  Vec state;
};

// Max-heap of the k smallest distances seen; the heap top is the current
// ball radius. Once full the radius never increases.
class RecurrenceBuffer {
 public:
  explicit RecurrenceBuffer(int capacity);

  void insert(double d, std::int64_t index, const Vec& state);

  int capacity() const { return cap_; }
  int size() const { return static_cast<int>(heap_.size()); }
  bool full() const { return size() == cap_; }
  double radius() const {
    return heap_.empty() ? std::numeric_limits<double>::infinity()
                         : heap_.front().dist;
  }

  const std::vector<BufferEntry>& entries() const { return heap_; }
  std::vector<double> sorted_distances() const;
  std::int64_t count_within(double r) const;

 private:
  int cap_;
  std::vector<BufferEntry> heap_;
};

// ---------------------------------------------------------------------------
// zoom traces

struct ZoomCheckpoint {
  std::int64_t iters = 0;  // orbit points (or transit candidates) processed
  double r = 0.0;
  double R_half = 0.0;  // count(d <= b r) / k, b = 1/2 by default
  double ebd_dim = 0.0;
  double corr_dim = 0.0;
  std::int64_t n_inside_half = 0;
  bool corr_flagged = false;
};

struct ZoomTrace {
  std::vector<ZoomCheckpoint> checkpoints;
  bool partial = false;  // buffer never filled
};

enum class ReferenceMode {
  independent,  // reference chosen independently of the orbit
  along_orbit,  // reference is a point of the orbit itself
};

struct ZoomParams {
  int k = 5000;
  double b = 0.5;
  int max_checkpoints = 0;    // 0 = unlimited; otherwise keep the last ones
  int exclusion_window = 10;  // along_orbit: skip |i - ref_index| <= w
};

// Streaming driver over a discrete orbit: call offer() per point, then
// finish(). Checkpoints double in iteration count once the buffer is full.
class DiscreteZoom {
 public:
  DiscreteZoom(const Vec& zeta, const ZoomParams& p,
               ReferenceMode mode = ReferenceMode::independent,
               std::int64_t ref_index = -1);

  void offer(const Vec& point);
  ZoomTrace finish();

  const RecurrenceBuffer& buffer() const { return buf_; }
  std::int64_t processed() const { return idx_; }

 private:
  void checkpoint();

  Vec zeta_;
  ZoomParams params_;
  ReferenceMode mode_;
  std::int64_t ref_index_;
  RecurrenceBuffer buf_;
  ZoomTrace trace_;
  std::int64_t idx_ = 0;
  std::int64_t next_cp_ = 0;
  double last_r_ = std::numeric_limits<double>::infinity();
};

// One-call wrappers over a point generator.
RecurrenceBuffer track_recurrences(const std::function<Vec()>& next,
                                   const Vec& zeta, std::int64_t iters,
                                   const ZoomParams& p,
                                   ReferenceMode mode = ReferenceMode::independent,
                                   std::int64_t ref_index = -1);
ZoomTrace zoom_trace(const std::function<Vec()>& next, const Vec& zeta,
                     std::int64_t iters, const ZoomParams& p,
                     ReferenceMode mode = ReferenceMode::independent,
                     std::int64_t ref_index = -1);

// ---------------------------------------------------------------------------
// flows: one minimizing point per ball transit

struct BallTransit {
  double t_entry = 0.0, t_exit = 0.0, t_min = 0.0;
  double d_min = 0.0;
  Vec closest;
};

struct TransitScan {
  std::vector<BallTransit> transits;
  int grazes_dropped = 0;
};

// Incremental transit detector against a fixed radius; feed() segments in
// order. Entry/exit are bracketed by bisection on the dense output and the
// minimum is located by golden section to 1e-3 dt.
class TransitScanner {
 public:
  TransitScanner(const Vec& zeta, double radius);
  void feed(const FlowSegment& seg);
  TransitScan finish();

 private:
  void close_transit(double t_exit);
  Vec zeta_;
  double r_;
  TransitScan out_;
  bool inside_ = false;
  bool have_prev_ = false;
  double d_prev_ = 0.0;
  double t_entry_ = 0.0;
  double best_d_ = 0.0, best_t_ = 0.0;
  Vec best_state_;
};

TransitScan scan_transits(const std::vector<FlowSegment>& segs, const Vec& zeta,
                          double radius);
std::vector<BallTransit> ball_transits(const std::vector<FlowSegment>& segs,
                                       const Vec& zeta, double radius);

// ---------------------------------------------------------------------------
// continuous zoom: recurrence buffer over transit minima

struct FlowZoomParams {
  double dt = 0.01;
  double total_time = 10000.0;
  int k = 500;
  double b = 0.5;
  int max_checkpoints = 0;
  // when the reference sits on the trajectory itself, its own passage is
  // masked out: candidates with |t - exclude_center| <= exclude_halfwidth
  // are ignored
  double exclude_center = 0.0;
  double exclude_halfwidth = 0.0;
};

struct TransitCandidate {
  double t = 0.0;
  double d = 0.0;
  double hump_before = 0.0;  // max distance observed since previous candidate
  Vec state;
};

struct ContinuousZoomResult {
  ZoomTrace trace;
  double final_radius = 0.0;
  std::vector<TransitCandidate> kept;  // one per transit at final_radius
  bool partial = false;
  Vec end_state;  // trajectory endpoint, e.g. for conservation reporting
};

// Streams the trajectory, collects local minima of d(t) below the current
// adaptive radius (k-th smallest transit minimum), merges minima belonging
// to one transit, and reconciles the final kept set exactly against the
// candidate log. Flow estimates add the flow direction back (+1).
ContinuousZoomResult continuous_zoom(const Rhs& rhs, const Vec& y0, double t0,
                                     const Vec& zeta, const FlowZoomParams& p);

// ---------------------------------------------------------------------------
// ensembles

struct AggregateRow {
  double log10_r = 0.0;
  double mean_R = 0.0, std_R = 0.0;
  double mean_ebd = 0.0, std_ebd = 0.0;
  double mean_corr = 0.0, std_corr = 0.0;
  int n = 0;
};

// Aligns complete traces on a common log10-r grid (piecewise-linear
// interpolation over the shared radius range) and reduces mean/std per row.
std::vector<AggregateRow> aggregate_traces(const std::vector<ZoomTrace>& traces,
                                           int grid_size = 0);

// Checkpoint statistics shared by the discrete and continuous engines.
// sorted ascending distances; +1 when the flow direction was projected out.
ZoomCheckpoint make_checkpoint(std::vector<double> sorted_dists, double b,
                               std::int64_t iters, bool add_flow_direction);

}  // namespace ebdim
