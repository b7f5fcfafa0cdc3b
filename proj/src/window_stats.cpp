#include "cqm/window_stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cqm {

int window_segments(int k_seconds, double segment_duration_s) {
  if (k_seconds <= 0) {
    fail(ErrorCode::WindowNotAligned,
         "window size must be positive, got " + std::to_string(k_seconds) + " s");
  }
  double ratio = static_cast<double>(k_seconds) / segment_duration_s;
  double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    fail(ErrorCode::WindowNotAligned,
         "window of " + std::to_string(k_seconds) +
             " s is not a whole number of segments at duration " +
             std::to_string(segment_duration_s) + " s");
  }
  return static_cast<int>(rounded);
}

MultiKTracker::MultiKTracker(const QualityScale& scale, double segment_duration_s,
                             std::span<const int> window_sizes_s,
                             std::shared_ptr<const WindowQualityModel> wqm)
    : scale_(scale), segment_duration_s_(segment_duration_s), wqm_(std::move(wqm)) {
  check_scale(scale);
  if (!(segment_duration_s > 0.0)) {
    fail(ErrorCode::WindowNotAligned, "segment duration must be positive");
  }
  if (!wqm_) {
    fail(ErrorCode::InvalidModelConfig, "tracker needs a window quality model");
  }
  states_.reserve(window_sizes_s.size());
  for (int k_seconds : window_sizes_s) {
    KState state;
    state.k_seconds = k_seconds;
    state.k_segments = window_segments(k_seconds, segment_duration_s);
    state.ring.assign(static_cast<std::size_t>(state.k_segments), 0.0);
    state.ordered.assign(static_cast<std::size_t>(state.k_segments), 0.0);
    state.stats.k_seconds = k_seconds;
    state.stats.k_segments = state.k_segments;
    states_.push_back(std::move(state));
  }
}

void MultiKTracker::push_segment(double quality) {
  if (!std::isfinite(quality) || !scale_.contains(quality)) {
    fail(ErrorCode::QualityOutOfRange,
         "segment quality " + std::to_string(quality) + " outside scale [" +
             std::to_string(scale_.lo) + ", " + std::to_string(scale_.hi) + "]");
  }
  ++segments_seen_;
  for (KState& state : states_) {
    const std::size_t k = state.ring.size();
    state.ring[state.ring_pos] = quality;
    state.ring_pos = (state.ring_pos + 1) % k;
    if (segments_seen_ < state.k_segments) continue;

    // ring_pos now points at the oldest element; lay the window out in
    // arrival order for the model.
    for (std::size_t i = 0; i < k; ++i) {
      state.ordered[i] = state.ring[(state.ring_pos + i) % k];
    }
    const double wq = wqm_->score(state.ordered);

    WindowStats& s = state.stats;
    if (s.n_windows == 0) {
      s.first = s.last = s.average = s.minimum = s.maximum = wq;
    } else {
      s.last = wq;
      s.average = (s.average * static_cast<double>(s.n_windows) + wq) /
                  static_cast<double>(s.n_windows + 1);
      s.minimum = std::min(s.minimum, wq);
      s.maximum = std::max(s.maximum, wq);
    }
    ++s.n_windows;
  }
}

std::optional<WindowStats> MultiKTracker::stats_snapshot(int k_seconds) const {
  for (const KState& state : states_) {
    if (state.k_seconds == k_seconds) {
      if (state.stats.n_windows == 0) return std::nullopt;
      return state.stats;
    }
  }
  fail(ErrorCode::UnknownWindowSize,
       "window size " + std::to_string(k_seconds) + " s is not tracked");
}

WindowStats batch_stats(const SessionTrace& trace, int k_seconds,
                        const WindowQualityModel& wqm) {
  const int k = window_segments(k_seconds, trace.uniform_duration_s());
  const std::span<const double> q = trace.qualities();
  if (q.size() < static_cast<std::size_t>(k)) {
    fail(ErrorCode::TraceTooShort,
         "trace of " + std::to_string(q.size()) +
             " segments is shorter than one window of " + std::to_string(k) +
             " segments");
  }
  const std::size_t n_windows = q.size() - static_cast<std::size_t>(k) + 1;
  std::vector<double> window_qualities;
  window_qualities.reserve(n_windows);
  for (std::size_t start = 0; start < n_windows; ++start) {
    window_qualities.push_back(
        wqm.score(q.subspan(start, static_cast<std::size_t>(k))));
  }

  WindowStats stats;
  stats.k_seconds = k_seconds;
  stats.k_segments = k;
  stats.n_windows = static_cast<std::int64_t>(n_windows);
  stats.first = window_qualities.front();
  stats.last = window_qualities.back();
  double sum = 0.0;
  double mi = window_qualities.front();
  double ma = window_qualities.front();
  for (double wq : window_qualities) {
    sum += wq;
    mi = std::min(mi, wq);
    ma = std::max(ma, wq);
  }
  stats.average = sum / static_cast<double>(n_windows);
  stats.minimum = mi;
  stats.maximum = ma;
  return stats;
}

}  // namespace cqm
