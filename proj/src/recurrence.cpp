#include "recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

#include "estimators.hpp"

namespace ebdim {

namespace {
constexpr double kGrazeTol = 1e-12;   // transits with r - d_min < tol*r are noise
constexpr double kZeroDist = 1e-300;  // exact self-hits carry no information
}  // namespace

// ---------------------------------------------------------------------------
// RecurrenceBuffer

RecurrenceBuffer::RecurrenceBuffer(int capacity) : cap_(capacity) {
  if (capacity < 1) throw std::invalid_argument("RecurrenceBuffer: capacity < 1");
  heap_.reserve(static_cast<std::size_t>(capacity));
}

static bool heap_less(const BufferEntry& a, const BufferEntry& b) {
  return a.dist < b.dist;
}

void RecurrenceBuffer::insert(double d, std::int64_t index, const Vec& state) {
  if (!full()) {
    heap_.push_back({d, index, state});
    std::push_heap(heap_.begin(), heap_.end(), heap_less);
    return;
  }
  if (d >= heap_.front().dist) return;
  std::pop_heap(heap_.begin(), heap_.end(), heap_less);
  heap_.back() = {d, index, state};
  std::push_heap(heap_.begin(), heap_.end(), heap_less);
}

std::vector<double> RecurrenceBuffer::sorted_distances() const {
  std::vector<double> d;
  d.reserve(heap_.size());
  for (const auto& e : heap_) d.push_back(e.dist);
  std::sort(d.begin(), d.end());
  return d;
}

std::int64_t RecurrenceBuffer::count_within(double r) const {
  std::int64_t n = 0;
  for (const auto& e : heap_)
    if (e.dist <= r) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// checkpoint statistics

ZoomCheckpoint make_checkpoint(std::vector<double> sorted_dists, double b,
                               std::int64_t iters, bool add_flow_direction) {
  ZoomCheckpoint cp;
  cp.iters = iters;
  cp.r = sorted_dists.back();
  cp.n_inside_half =
      std::upper_bound(sorted_dists.begin(), sorted_dists.end(), b * cp.r) -
      sorted_dists.begin();
  cp.R_half = static_cast<double>(cp.n_inside_half) /
              static_cast<double>(sorted_dists.size());
  const double shift = add_flow_direction ? 1.0 : 0.0;
  cp.ebd_dim = shift + ebd_at_radius(sorted_dists, cp.r);
  EstimateRecord corr = correlation_dimension(sorted_dists);
  cp.corr_dim = shift + corr.value;
  cp.corr_flagged = corr.flagged;
  return cp;
}

// ---------------------------------------------------------------------------
// DiscreteZoom

DiscreteZoom::DiscreteZoom(const Vec& zeta, const ZoomParams& p,
                           ReferenceMode mode, std::int64_t ref_index)
    : zeta_(zeta), params_(p), mode_(mode), ref_index_(ref_index), buf_(p.k) {
  if (mode_ == ReferenceMode::along_orbit && ref_index_ < 0)
    throw std::invalid_argument("DiscreteZoom: along_orbit needs ref_index");
}

void DiscreteZoom::offer(const Vec& point) {
  const std::int64_t i = idx_++;
  if (mode_ == ReferenceMode::along_orbit &&
      std::llabs(i - ref_index_) <= params_.exclusion_window)
    return;
  const double d = dist(point, zeta_);
  if (d < kZeroDist) return;
  buf_.insert(d, i, point);
  if (buf_.full()) {
    if (next_cp_ == 0) {
      next_cp_ = idx_ * 2;
    } else if (idx_ >= next_cp_) {
      checkpoint();
      next_cp_ *= 2;
    }
  }
}

void DiscreteZoom::checkpoint() {
  const double r = buf_.radius();
  if (!(r < last_r_)) return;  // keep the trace strictly decreasing in r
  trace_.checkpoints.push_back(
      make_checkpoint(buf_.sorted_distances(), params_.b, idx_, false));
  last_r_ = r;
}

ZoomTrace DiscreteZoom::finish() {
  if (buf_.full()) {
    checkpoint();
  } else {
    trace_.partial = true;
    if (buf_.size() > 1)
      trace_.checkpoints.push_back(
          make_checkpoint(buf_.sorted_distances(), params_.b, idx_, false));
  }
  if (params_.max_checkpoints > 0 &&
      static_cast<int>(trace_.checkpoints.size()) > params_.max_checkpoints) {
    trace_.checkpoints.erase(
        trace_.checkpoints.begin(),
        trace_.checkpoints.end() - params_.max_checkpoints);
  }
  return trace_;
}

RecurrenceBuffer track_recurrences(const std::function<Vec()>& next,
                                   const Vec& zeta, std::int64_t iters,
                                   const ZoomParams& p, ReferenceMode mode,
                                   std::int64_t ref_index) {
  DiscreteZoom z(zeta, p, mode, ref_index);
  for (std::int64_t i = 0; i < iters; ++i) z.offer(next());
  z.finish();
  return z.buffer();
}

ZoomTrace zoom_trace(const std::function<Vec()>& next, const Vec& zeta,
                     std::int64_t iters, const ZoomParams& p, ReferenceMode mode,
                     std::int64_t ref_index) {
  DiscreteZoom z(zeta, p, mode, ref_index);
  for (std::int64_t i = 0; i < iters; ++i) z.offer(next());
  return z.finish();
}

// ---------------------------------------------------------------------------
// transit scanning at a fixed radius

namespace {

// Hermite dense output can leave the chord by about h^2 |y''| / 8, with
// y'' ~ (f1 - f0) / h on the segment.
double chord_deviation_bound(const FlowSegment& seg) {
  double df = 0.0;
  for (int i = 0; i < seg.y0.dim; ++i) {
    const double d = seg.f1[i] - seg.f0[i];
    df += d * d;
  }
  return 0.125 * (seg.t1 - seg.t0) * std::sqrt(df);
}

double point_segment_distance(const Vec& a, const Vec& b, const Vec& p) {
  double ab2 = 0.0, ap_ab = 0.0;
  for (int i = 0; i < a.dim; ++i) {
    const double e = b[i] - a[i];
    ab2 += e * e;
    ap_ab += (p[i] - a[i]) * e;
  }
  double t = ab2 > 0.0 ? ap_ab / ab2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  double s = 0.0;
  for (int i = 0; i < a.dim; ++i) {
    const double e = a[i] + t * (b[i] - a[i]) - p[i];
    s += e * e;
  }
  return std::sqrt(s);
}

}  // namespace

TransitScanner::TransitScanner(const Vec& zeta, double radius)
    : zeta_(zeta), r_(radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("TransitScanner: radius <= 0");
}

void TransitScanner::close_transit(double t_exit) {
  inside_ = false;
  if (r_ - best_d_ < kGrazeTol * r_) {
    ++out_.grazes_dropped;
    return;
  }
  BallTransit tr;
  tr.t_entry = t_entry_;
  tr.t_exit = t_exit;
  tr.t_min = best_t_;
  tr.d_min = best_d_;
  tr.closest = best_state_;
  out_.transits.push_back(tr);
}

void TransitScanner::feed(const FlowSegment& seg) {
  const double dt = seg.t1 - seg.t0;
  const double tol = 1e-3 * dt;
  auto dfun = [&](double t) { return hermite_dist(seg, zeta_, t); };

  if (!have_prev_) {
    have_prev_ = true;
    d_prev_ = dist(seg.y0, zeta_);
    if (d_prev_ < r_) {  // trajectory begins inside the ball
      inside_ = true;
      t_entry_ = seg.t0;
      best_d_ = d_prev_;
      best_t_ = seg.t0;
      best_state_ = seg.y0;
    }
  }
  const double d0 = d_prev_;
  const double d1 = dist(seg.y1, zeta_);
  d_prev_ = d1;

  if (inside_) {
    // refine the running minimum over this segment
    const double tm = golden_minimize(dfun, seg.t0, seg.t1, tol);
    const double dtm = dfun(tm);
    const double dm = std::min({dtm, d0, d1});
    if (dm < best_d_) {
      best_d_ = dm;
      if (dtm <= std::min(d0, d1)) {
        best_t_ = tm;
        best_state_ = hermite_eval(seg, tm);
      } else if (d0 <= d1) {
        best_t_ = seg.t0;
        best_state_ = seg.y0;
      } else {
        best_t_ = seg.t1;
        best_state_ = seg.y1;
      }
    }
    if (d1 >= r_) {
      const double lo = std::clamp(best_t_, seg.t0, seg.t1);
      const double t_exit =
          bisect_root([&](double t) { return dfun(t) - r_; },
                      dfun(lo) < r_ ? lo : seg.t0, seg.t1, tol);
      close_transit(t_exit);
    }
    return;
  }

  // outside the ball
  if (d1 < r_) {
    // entered within this segment
    const double t_in =
        bisect_root([&](double t) { return dfun(t) - r_; }, seg.t0, seg.t1, tol);
    inside_ = true;
    t_entry_ = t_in;
    const double tm = golden_minimize(dfun, t_in, seg.t1, tol);
    best_t_ = dfun(tm) <= d1 ? tm : seg.t1;
    best_d_ = dfun(best_t_);
    best_state_ = hermite_eval(seg, best_t_);
    return;
  }

  // both endpoints outside: test for a dip entirely inside the segment
  const double chord = point_segment_distance(seg.y0, seg.y1, zeta_);
  if (chord - chord_deviation_bound(seg) > r_) return;
  const double tm = golden_minimize(dfun, seg.t0, seg.t1, tol);
  const double dm = dfun(tm);
  if (dm >= r_) return;
  const double t_in =
      bisect_root([&](double t) { return dfun(t) - r_; }, seg.t0, tm, tol);
  const double t_out =
      bisect_root([&](double t) { return dfun(t) - r_; }, tm, seg.t1, tol);
  t_entry_ = t_in;
  best_t_ = tm;
  best_d_ = dm;
  best_state_ = hermite_eval(seg, tm);
  inside_ = true;
  close_transit(t_out);
}

TransitScan TransitScanner::finish() {
  // an unterminated transit has no exit root; drop it
  inside_ = false;
  return std::move(out_);
}

TransitScan scan_transits(const std::vector<FlowSegment>& segs, const Vec& zeta,
                          double radius) {
  if (segs.empty()) return {};
  TransitScanner sc(zeta, radius);
  for (const auto& s : segs) sc.feed(s);
  return sc.finish();
}

std::vector<BallTransit> ball_transits(const std::vector<FlowSegment>& segs,
                                       const Vec& zeta, double radius) {
  return scan_transits(segs, zeta, radius).transits;
}

// ---------------------------------------------------------------------------
// continuous zoom

namespace {

// Piecewise-Hermite distance over a two-segment window.
double window_dist(const FlowSegment& a, const FlowSegment& b, const Vec& zeta,
                   double t) {
  return t <= a.t1 ? hermite_dist(a, zeta, t) : hermite_dist(b, zeta, t);
}

struct FinalizeOut {
  std::vector<TransitCandidate> kept;
  double radius = 0.0;
};

// One-per-transit minima at radius r from the chronological candidate log.
// Candidates at or above r fold into the separation ("hump") of the next one.
std::vector<TransitCandidate> runs_at_radius(
    const std::vector<TransitCandidate>& log, double r, double trailing_hump) {
  std::vector<TransitCandidate> mins;
  double carried = std::numeric_limits<double>::infinity();
  bool open = false;
  TransitCandidate cur;
  for (const auto& c : log) {
    const double sep = std::max(carried, c.hump_before);
    if (!(c.d < r) || r - c.d < kGrazeTol * r) {
      carried = std::max(sep, c.d);
      continue;
    }
    if (!open) {
      open = true;
      cur = c;
    } else if (sep >= r) {
      mins.push_back(cur);
      cur = c;
    } else if (c.d < cur.d) {
      cur = c;
    }
    carried = 0.0;
  }
  if (open) {
    // drop a transit still open at the end of the data (no exit)
    if (std::max(carried, trailing_hump) >= r) mins.push_back(cur);
  }
  return mins;
}

FinalizeOut finalize_kept(const std::vector<TransitCandidate>& log, int k,
                          double r_start, double trailing_hump) {
  FinalizeOut out;
  double r = r_start;
  for (int it = 0; it < 16; ++it) {
    auto mins = runs_at_radius(log, r, trailing_hump);
    if (static_cast<int>(mins.size()) <= k) {
      out.kept = std::move(mins);
      break;
    }
    std::nth_element(mins.begin(), mins.begin() + (k - 1), mins.end(),
                     [](const TransitCandidate& a, const TransitCandidate& b) {
                       return a.d < b.d;
                     });
    const double r_new = mins[static_cast<std::size_t>(k - 1)].d;
    mins.resize(static_cast<std::size_t>(k));
    if (!(r_new < r)) {
      out.kept = std::move(mins);
      break;
    }
    r = r_new;
    out.kept = std::move(mins);
  }
  double rmax = 0.0;
  for (const auto& c : out.kept) rmax = std::max(rmax, c.d);
  out.radius = rmax;
  std::sort(out.kept.begin(), out.kept.end(),
            [](const TransitCandidate& a, const TransitCandidate& b) {
              return a.t < b.t;
            });
  return out;
}

}  // namespace

ContinuousZoomResult continuous_zoom(const Rhs& rhs, const Vec& y0, double t0,
                                     const Vec& zeta, const FlowZoomParams& p) {
  if (p.k < 2) throw std::invalid_argument("continuous_zoom: k < 2");
  const std::int64_t steps = static_cast<std::int64_t>(p.total_time / p.dt);

  std::vector<TransitCandidate> log;
  std::multiset<double> buf;
  const auto r_cur = [&]() {
    return static_cast<int>(buf.size()) >= p.k
               ? *buf.rbegin()
               : std::numeric_limits<double>::infinity();
  };

  ZoomTrace trace;
  double last_cp_r = std::numeric_limits<double>::infinity();
  std::int64_t n_candidates = 0;
  std::int64_t next_cp = 0;

  // streaming transit state
  double hump = std::numeric_limits<double>::infinity();  // max d since last candidate
  bool transit_open = false;      // last logged candidate's transit still open
  double open_min = 0.0;          // its distance (present in buf)

  const auto checkpoint = [&]() {
    if (static_cast<int>(buf.size()) < p.k) return;
    std::vector<double> d(buf.begin(), buf.end());
    if (!(d.back() < last_cp_r)) return;
    trace.checkpoints.push_back(make_checkpoint(std::move(d), p.b, n_candidates, true));
    last_cp_r = trace.checkpoints.back().r;
  };

  const auto on_candidate = [&](double t, double d, const Vec& state) {
    if (p.exclude_halfwidth > 0.0 &&
        std::fabs(t - p.exclude_center) <= p.exclude_halfwidth)
      return;
    ++n_candidates;
    if (d < kZeroDist) return;
    const double radius = r_cur();
    const bool full = static_cast<int>(buf.size()) >= p.k;
    const double sep = hump;
    hump = 0.0;

    if (!(d < radius)) {
      // not below the current ball radius: the dip itself separates transits
      // and folds into the next candidate's separation
      hump = std::max(sep, d);
      transit_open = false;
      return;
    }
    log.push_back({t, d, sep, state});
    if (full && transit_open && sep < radius) {
      // same transit as the previous kept candidate: keep the smaller minimum
      if (d < open_min) {
        auto it = buf.find(open_min);
        if (it != buf.end()) buf.erase(it);
        buf.insert(d);
        open_min = d;
      }
    } else {
      buf.insert(d);
      transit_open = true;
      open_min = d;
    }
    while (static_cast<int>(buf.size()) > p.k) buf.erase(std::prev(buf.end()));
    if (static_cast<int>(buf.size()) >= p.k) {
      if (next_cp == 0) next_cp = n_candidates * 2;
      else if (n_candidates >= next_cp) {
        checkpoint();
        next_cp *= 2;
      }
    }
  };

  // stream segments, extracting local minima of d(t)
  std::deque<FlowSegment> win;
  std::deque<double> wd;  // endpoint distances, wd[i] = d at win[i].t0
  double last_cand_t = -std::numeric_limits<double>::infinity();
  double prev_end_d = 0.0;
  bool first_seg = true;

  Vec end_state = y0;
  integrate_stream(rhs, y0, t0, p.dt, steps, [&](const FlowSegment& seg) {
    end_state = seg.y1;
    const double d0 = first_seg ? dist(seg.y0, zeta) : prev_end_d;
    const double d1 = dist(seg.y1, zeta);
    first_seg = false;
    prev_end_d = d1;
    const double tol = 1e-3 * p.dt;

    // interior dip below the current radius, endpoints both above
    const double radius = r_cur();
    if (std::isfinite(radius) && d0 > radius && d1 > radius) {
      const double chord = point_segment_distance(seg.y0, seg.y1, zeta);
      if (chord - chord_deviation_bound(seg) < radius) {
        auto dfun = [&](double t) { return hermite_dist(seg, zeta, t); };
        const double tm = golden_minimize(dfun, seg.t0, seg.t1, tol);
        const double dm = dfun(tm);
        if (dm < radius && dm < std::min(d0, d1) && tm - last_cand_t > 0.5 * p.dt) {
          hump = std::max(hump, std::max(d0, d1));
          on_candidate(tm, dm, hermite_eval(seg, tm));
          last_cand_t = tm;
        }
      }
    }

    win.push_back(seg);
    wd.push_back(d0);
    if (win.size() > 2) {
      win.pop_front();
      wd.pop_front();
    }
    if (win.size() == 2) {
      const double da = wd[0], db = wd[1];  // d1 closes the 3-point stencil
      if (db <= da && db <= d1) {
        // local minimum near the shared endpoint; refine across both segments
        const FlowSegment &A = win[0], &B = win[1];
        auto dfun = [&](double t) { return window_dist(A, B, zeta, t); };
        const double tm = golden_minimize(dfun, A.t0, B.t1, tol);
        double dm = dfun(tm);
        double tbest = tm;
        if (db < dm) {
          dm = db;
          tbest = A.t1;
        }
        if (tbest - last_cand_t > 0.5 * p.dt) {
          on_candidate(tbest, dm,
                       tbest <= A.t1 ? hermite_eval(A, std::min(tbest, A.t1))
                                     : hermite_eval(B, tbest));
          last_cand_t = tbest;
        }
      }
    }
    hump = std::max(hump, d1);
    return true;
  });

  ContinuousZoomResult out;
  out.end_state = end_state;
  out.partial = static_cast<int>(buf.size()) < p.k;
  const double r_stream = out.partial && !buf.empty() ? *buf.rbegin() : r_cur();

  // the exact reconciliation may merge a few streamed entries into one
  // transit, so |kept| can fall slightly short of k without being partial
  FinalizeOut fin = finalize_kept(log, p.k, r_stream, hump);
  out.kept = std::move(fin.kept);
  out.final_radius = fin.radius;

  if (out.kept.size() >= 2) {
    std::vector<double> d;
    d.reserve(out.kept.size());
    for (const auto& c : out.kept) d.push_back(c.d);
    std::sort(d.begin(), d.end());
    ZoomCheckpoint cp = make_checkpoint(std::move(d), p.b, n_candidates, true);
    if (!trace.checkpoints.empty() && !(cp.r < trace.checkpoints.back().r))
      trace.checkpoints.back() = cp;
    else
      trace.checkpoints.push_back(cp);
  }
  trace.partial = out.partial;
  if (p.max_checkpoints > 0 &&
      static_cast<int>(trace.checkpoints.size()) > p.max_checkpoints)
    trace.checkpoints.erase(
        trace.checkpoints.begin(),
        trace.checkpoints.end() - p.max_checkpoints);
  out.trace = std::move(trace);
  return out;
}

// ---------------------------------------------------------------------------
// ensemble aggregation

std::vector<AggregateRow> aggregate_traces(const std::vector<ZoomTrace>& traces,
                                           int grid_size) {
  struct Curve {
    std::vector<double> x;  // log10 r, ascending
    std::vector<double> R, ebd, corr;
  };
  std::vector<Curve> curves;
  int max_cp = 0;
  for (const auto& t : traces) {
    if (t.partial || t.checkpoints.size() < 2) continue;
    Curve c;
    for (auto it = t.checkpoints.rbegin(); it != t.checkpoints.rend(); ++it) {
      c.x.push_back(std::log10(it->r));
      c.R.push_back(it->R_half);
      c.ebd.push_back(it->ebd_dim);
      c.corr.push_back(it->corr_dim);
    }
    max_cp = std::max(max_cp, static_cast<int>(c.x.size()));
    curves.push_back(std::move(c));
  }
  if (curves.empty()) return {};
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& c : curves) {
    lo = std::max(lo, c.x.front());
    hi = std::min(hi, c.x.back());
  }
  if (!(hi > lo)) return {};
  const int G = grid_size > 1 ? grid_size : std::max(max_cp, 16);

  const auto interp = [](const Curve& c, const std::vector<double>& ys, double x) {
    auto it = std::lower_bound(c.x.begin(), c.x.end(), x);
    if (it == c.x.begin()) return ys.front();
    if (it == c.x.end()) return ys.back();
    const std::size_t j = static_cast<std::size_t>(it - c.x.begin());
    const double w = (x - c.x[j - 1]) / (c.x[j] - c.x[j - 1]);
    return ys[j - 1] + w * (ys[j] - ys[j - 1]);
  };

  std::vector<AggregateRow> rows;
  rows.reserve(static_cast<std::size_t>(G));
  for (int g = 0; g < G; ++g) {
    // emit with r decreasing, matching the zoom direction
    const double x = hi - (hi - lo) * static_cast<double>(g) / (G - 1);
    AggregateRow row;
    row.log10_r = x;
    row.n = static_cast<int>(curves.size());
    const auto stats = [&](auto sel, double& mean, double& sd) {
      double s = 0.0;
      for (const auto& c : curves) s += interp(c, sel(c), x);
      mean = s / static_cast<double>(curves.size());
      double v = 0.0;
      for (const auto& c : curves) {
        const double e = interp(c, sel(c), x) - mean;
        v += e * e;
      }
      sd = curves.size() > 1
               ? std::sqrt(v / static_cast<double>(curves.size() - 1))
               : 0.0;
    };
    stats([](const Curve& c) -> const std::vector<double>& { return c.R; },
          row.mean_R, row.std_R);
    stats([](const Curve& c) -> const std::vector<double>& { return c.ebd; },
          row.mean_ebd, row.std_ebd);
    stats([](const Curve& c) -> const std::vector<double>& { return c.corr; },
          row.mean_corr, row.std_corr);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ebdim
