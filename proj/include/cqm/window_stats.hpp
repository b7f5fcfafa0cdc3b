#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cqm/trace.hpp"
#include "cqm/window_quality.hpp"

namespace cqm {

// The five window-quality statistics for one window size, at some point in
// a session: first / last / average / minimum / maximum window quality over
// the n_windows windows completed so far.
struct WindowStats {
  int k_seconds = 0;
  int k_segments = 0;
  std::int64_t n_windows = 0;
  double first = 0.0;
  double last = 0.0;
  double average = 0.0;
  double minimum = 0.0;
  double maximum = 0.0;
};

// Converts a window size in seconds to a whole segment count; throws
// WindowNotAligned when the segment duration does not divide it.
int window_segments(int k_seconds, double segment_duration_s);

// Maintains the five statistics for several window sizes at once,
// incrementally, one segment at a time. The window steps by exactly one
// segment. Update cost per push is independent of the number of segments
// seen (the attached model is re-evaluated over the K in-window qualities,
// which is O(K), not O(N)).
//
// Single-writer: confine one tracker to one thread; snapshots are value
// copies and safe to hand elsewhere.
class MultiKTracker {
 public:
  MultiKTracker(const QualityScale& scale, double segment_duration_s,
                std::span<const int> window_sizes_s,
                std::shared_ptr<const WindowQualityModel> wqm);

  // Appends one segment quality and updates every tracked window size whose
  // window is complete. Throws QualityOutOfRange.
  void push_segment(double quality);

  // Current statistics for a tracked size, or nullopt while fewer than K
  // segments have been seen (not an error; callers bootstrap). Throws
  // UnknownWindowSize for untracked sizes.
  std::optional<WindowStats> stats_snapshot(int k_seconds) const;

  std::int64_t segments_seen() const noexcept { return segments_seen_; }
  const QualityScale& scale() const noexcept { return scale_; }
  double segment_duration_s() const noexcept { return segment_duration_s_; }
  const WindowQualityModel& model() const noexcept { return *wqm_; }

 private:
  struct KState {
    int k_seconds = 0;
    int k_segments = 0;
    std::vector<double> ring;     // last K qualities, circular
    std::size_t ring_pos = 0;     // next write slot == oldest element
    std::vector<double> ordered;  // scratch: window in arrival order
    WindowStats stats;
  };

  QualityScale scale_;
  double segment_duration_s_ = 1.0;
  std::shared_ptr<const WindowQualityModel> wqm_;
  std::vector<KState> states_;
  std::int64_t segments_seen_ = 0;
};

// Reference implementation computing the same five statistics from scratch
// by enumerating every window of the trace; serves as the oracle the
// incremental path is tested against. Throws TraceTooShort when the trace
// has fewer segments than one window.
WindowStats batch_stats(const SessionTrace& trace, int k_seconds,
                        const WindowQualityModel& wqm);

}  // namespace cqm
