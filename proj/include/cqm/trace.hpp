#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cqm/errors.hpp"

namespace cqm {

// Rating scale the per-segment quality scores live on. Defaults to the
// 1..5 ACR range; all downstream math is scale-agnostic.
struct QualityScale {
  double lo = 1.0;
  double hi = 5.0;

  bool contains(double q) const noexcept { return q >= lo && q <= hi; }
  double clamp(double q) const noexcept {
    if (q < lo) return lo;
    if (q > hi) return hi;
    return q;
  }
  double width() const noexcept { return hi - lo; }

  friend bool operator==(const QualityScale&, const QualityScale&) = default;
};

// Throws InvalidScale unless lo < hi and both are finite.
void check_scale(const QualityScale& scale);

// One delivered segment. Quality is an input to this toolkit (already
// MOS-calibrated by whatever objective metric produced it); bitrate and
// version are optional provenance.
struct SegmentRecord {
  std::int64_t index = 0;
  double duration_s = 1.0;
  double quality = 0.0;
  std::optional<double> bitrate_kbps;
  std::optional<int> version;
};

// An ordered, validated session: contiguous indices from 0, one shared
// segment duration, all qualities within the scale. Immutable after
// construction, safe to share across threads.
class SessionTrace {
 public:
  const QualityScale& scale() const noexcept { return scale_; }
  double uniform_duration_s() const noexcept { return duration_s_; }
  const std::vector<SegmentRecord>& segments() const noexcept { return segments_; }
  std::span<const double> qualities() const noexcept { return qualities_; }
  std::size_t size() const noexcept { return segments_.size(); }
  double total_duration_s() const noexcept {
    return duration_s_ * static_cast<double>(segments_.size());
  }

  // First floor(length_s / uniform_duration_s) segments. length_s must be
  // positive, divisible by the segment duration, and at most the total
  // duration.
  SessionTrace prefix(double length_s) const;

  friend SessionTrace validate_trace(std::vector<SegmentRecord> records,
                                     const QualityScale& scale);

 private:
  SessionTrace() = default;

  QualityScale scale_;
  double duration_s_ = 1.0;
  std::vector<SegmentRecord> segments_;
  std::vector<double> qualities_;
};

// Checks every SessionTrace invariant and returns the validated trace.
// Errors: EmptyTrace, NonContiguousIndices, QualityOutOfRange (message
// names the offending index), HeterogeneousDurations.
SessionTrace validate_trace(std::vector<SegmentRecord> records,
                            const QualityScale& scale);

// Convenience for tests and synthetic data: wraps plain quality values as
// unit-duration segments and validates them.
SessionTrace make_trace(std::span<const double> qualities,
                        const QualityScale& scale = QualityScale{},
                        double duration_s = 1.0);

// One rated prefix of a session: the first length_s seconds of `trace`
// carry the subjective score `mos`.
struct LabeledSequence {
  std::shared_ptr<const SessionTrace> trace;
  double length_s = 0.0;
  double mos = 0.0;
};

// The evaluation corpus. All items share one quality scale.
struct LabeledDataset {
  QualityScale scale;
  std::vector<LabeledSequence> items;
};

// Validates dataset invariants: non-empty, traces present and on the shared
// scale, length_s within each trace and aligned to its segment duration,
// MOS within scale.
LabeledDataset validate_dataset(LabeledDataset dataset);

}  // namespace cqm
