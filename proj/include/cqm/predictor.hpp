#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cqm/trace.hpp"
#include "cqm/window_quality.hpp"
#include "cqm/window_stats.hpp"

namespace cqm {

// The two window sizes the cumulative model reads its statistics from:
// last/min/max use 50 s windows, the running average uses 60 s windows.
inline constexpr int kLastWindowSeconds = 50;
inline constexpr int kMinWindowSeconds = 50;
inline constexpr int kMaxWindowSeconds = 50;
inline constexpr int kAvgWindowSeconds = 60;

// Weights of the four model components. The defaults are the fitted values
// of the published model; they sum to 1.000. Fitting without the
// nonnegativity option may produce negative components, so only finiteness
// is enforced here.
struct CqmWeights {
  double w_last50 = 0.280;
  double w_avg60 = 0.426;
  double w_min50 = 0.280;
  double w_max50 = 0.014;

  static CqmWeights defaults() { return CqmWeights{}; }
};

// The four model inputs at one segment boundary.
struct FeatureVector {
  double wq_last_50 = 0.0;
  double wq_avg_60 = 0.0;
  double wq_min_50 = 0.0;
  double wq_max_50 = 0.0;

  double operator[](int i) const {
    switch (i) {
      case 0: return wq_last_50;
      case 1: return wq_avg_60;
      case 2: return wq_min_50;
      default: return wq_max_50;
    }
  }
};

// Weighted sum of the four statistics, clamped to the scale.
double cqm_value(const FeatureVector& features, const CqmWeights& weights,
                 const QualityScale& scale);

struct CurvePoint {
  double t_s = 0.0;
  double cqm = 0.0;
};

// Cumulative quality at every segment boundary of a session, in order.
struct CumulativeCurve {
  std::vector<CurvePoint> points;
};

// Incremental cumulative-quality estimator for one session. Push one
// segment quality per boundary; each push returns the cumulative quality at
// that boundary in O(window size) time, independent of session length.
//
// Bootstrap rule: while fewer segments than a statistic's window size have
// been seen, that statistic falls back to the window model's score over the
// whole prefix, as its single window. Every statistic therefore has a value
// from the first segment on, and the curve is continuous where the real
// windows take over. With the default weights (which sum to 1.000) this
// reduces to scoring the prefix directly while the session is shorter than
// 50 s.
class CqmStreamPredictor {
 public:
  CqmStreamPredictor(const QualityScale& scale, double segment_duration_s,
                     const CqmWeights& weights,
                     std::shared_ptr<const WindowQualityModel> wqm);

  // Appends one segment and returns the cumulative quality at the new
  // boundary. Throws QualityOutOfRange.
  double push(double quality);

  // Features at the current boundary (bootstrap rule applied). At least one
  // segment must have been pushed.
  FeatureVector features() const;

  double value() const;
  std::int64_t segments_seen() const noexcept { return tracker_.segments_seen(); }
  const CqmWeights& weights() const noexcept { return weights_; }

 private:
  CqmWeights weights_;
  std::shared_ptr<const WindowQualityModel> wqm_;
  MultiKTracker tracker_;
  int k50_segments_ = 0;
  int k60_segments_ = 0;
  std::vector<double> prefix_;  // first qualities, kept only while needed
};

// Cumulative quality at every segment boundary N = 1..length. Pure function
// of its inputs. Throws WindowNotAligned when the segment duration does not
// divide 50 s or 60 s.
CumulativeCurve predict_curve(const SessionTrace& trace, const CqmWeights& weights,
                              std::shared_ptr<const WindowQualityModel> wqm);

// Features at the final segment boundary of a trace (bootstrap rule
// applied); this is what calibration fits against.
FeatureVector features_at_end(const SessionTrace& trace,
                              std::shared_ptr<const WindowQualityModel> wqm);

// Five window statistics of a whole trace for an arbitrary window size,
// with the bootstrap fallback when the trace is shorter than the window
// (n_windows == 0 marks a fallback-filled result). Used by the reporting
// and effect-analysis paths, which sweep window sizes.
WindowStats stats_with_bootstrap(const SessionTrace& trace, int k_seconds,
                                 const WindowQualityModel& wqm);

}  // namespace cqm
