#include "cqm/predictor.hpp"

#include <array>
#include <cmath>
#include <string>

namespace cqm {

namespace {

void check_weights(const CqmWeights& w) {
  for (double v : {w.w_last50, w.w_avg60, w.w_min50, w.w_max50}) {
    if (!std::isfinite(v)) {
      fail(ErrorCode::ConfigError, "model weights must be finite");
    }
  }
}

}  // namespace

double cqm_value(const FeatureVector& features, const CqmWeights& weights,
                 const QualityScale& scale) {
  double value = weights.w_last50 * features.wq_last_50 +
                 weights.w_avg60 * features.wq_avg_60 +
                 weights.w_min50 * features.wq_min_50 +
                 weights.w_max50 * features.wq_max_50;
  return scale.clamp(value);
}

CqmStreamPredictor::CqmStreamPredictor(
    const QualityScale& scale, double segment_duration_s,
    const CqmWeights& weights, std::shared_ptr<const WindowQualityModel> wqm)
    : weights_(weights),
      wqm_(wqm),
      tracker_(scale, segment_duration_s,
               std::array<int, 2>{kLastWindowSeconds, kAvgWindowSeconds},
               std::move(wqm)) {
  check_weights(weights);
  k50_segments_ = window_segments(kLastWindowSeconds, segment_duration_s);
  k60_segments_ = window_segments(kAvgWindowSeconds, segment_duration_s);
  prefix_.reserve(static_cast<std::size_t>(std::max(k50_segments_, k60_segments_)));
}

double CqmStreamPredictor::push(double quality) {
  tracker_.push_segment(quality);
  // The prefix is only consulted while some statistic still lacks a full
  // window, so it stops growing once both window sizes are live.
  if (prefix_.size() <
      static_cast<std::size_t>(std::max(k50_segments_, k60_segments_))) {
    prefix_.push_back(quality);
  }
  return value();
}

FeatureVector CqmStreamPredictor::features() const {
  const std::int64_t n = tracker_.segments_seen();
  if (n == 0) {
    fail(ErrorCode::EmptyWindow, "no segments pushed yet");
  }
  FeatureVector f;
  double prefix_score = 0.0;
  bool have_prefix_score = false;
  auto fallback = [&]() {
    if (!have_prefix_score) {
      prefix_score = wqm_->score(
          std::span<const double>(prefix_.data(), static_cast<std::size_t>(n)));
      have_prefix_score = true;
    }
    return prefix_score;
  };

  if (auto s50 = tracker_.stats_snapshot(kLastWindowSeconds)) {
    f.wq_last_50 = s50->last;
    f.wq_min_50 = s50->minimum;
    f.wq_max_50 = s50->maximum;
  } else {
    f.wq_last_50 = f.wq_min_50 = f.wq_max_50 = fallback();
  }
  if (auto s60 = tracker_.stats_snapshot(kAvgWindowSeconds)) {
    f.wq_avg_60 = s60->average;
  } else {
    f.wq_avg_60 = fallback();
  }
  return f;
}

double CqmStreamPredictor::value() const {
  return cqm_value(features(), weights_, tracker_.scale());
}

CumulativeCurve predict_curve(const SessionTrace& trace, const CqmWeights& weights,
                              std::shared_ptr<const WindowQualityModel> wqm) {
  CqmStreamPredictor predictor(trace.scale(), trace.uniform_duration_s(), weights,
                               std::move(wqm));
  CumulativeCurve curve;
  curve.points.reserve(trace.size());
  const double dt = trace.uniform_duration_s();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    double value = predictor.push(trace.qualities()[i]);
    curve.points.push_back(CurvePoint{static_cast<double>(i + 1) * dt, value});
  }
  return curve;
}

FeatureVector features_at_end(const SessionTrace& trace,
                              std::shared_ptr<const WindowQualityModel> wqm) {
  CqmStreamPredictor predictor(trace.scale(), trace.uniform_duration_s(),
                               CqmWeights::defaults(), std::move(wqm));
  for (double q : trace.qualities()) predictor.push(q);
  return predictor.features();
}

WindowStats stats_with_bootstrap(const SessionTrace& trace, int k_seconds,
                                 const WindowQualityModel& wqm) {
  const int k = window_segments(k_seconds, trace.uniform_duration_s());
  if (trace.size() >= static_cast<std::size_t>(k)) {
    return batch_stats(trace, k_seconds, wqm);
  }
  WindowStats stats;
  stats.k_seconds = k_seconds;
  stats.k_segments = k;
  stats.n_windows = 0;
  double s = wqm.score(trace.qualities());
  stats.first = stats.last = stats.average = stats.minimum = stats.maximum = s;
  return stats;
}

}  // namespace cqm
