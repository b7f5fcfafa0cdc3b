#include "cqm/trace.hpp"

#include <cmath>
#include <string>

namespace cqm {

namespace {

// length / duration as an exact whole number of segments, or nullopt.
std::optional<std::int64_t> whole_segments(double length_s, double duration_s) {
  double ratio = length_s / duration_s;
  double rounded = std::round(ratio);
  if (rounded < 1.0) return std::nullopt;
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio))) {
    return std::nullopt;
  }
  return static_cast<std::int64_t>(rounded);
}

}  // namespace

void check_scale(const QualityScale& scale) {
  if (!std::isfinite(scale.lo) || !std::isfinite(scale.hi) || scale.lo >= scale.hi) {
    fail(ErrorCode::InvalidScale,
         "quality scale requires lo < hi, got [" + std::to_string(scale.lo) +
             ", " + std::to_string(scale.hi) + "]");
  }
}

SessionTrace validate_trace(std::vector<SegmentRecord> records,
                            const QualityScale& scale) {
  check_scale(scale);
  if (records.empty()) {
    fail(ErrorCode::EmptyTrace, "trace has no segments");
  }
  const double duration = records.front().duration_s;
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    fail(ErrorCode::HeterogeneousDurations,
         "segment duration must be positive, got " + std::to_string(duration));
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SegmentRecord& rec = records[i];
    if (rec.index != static_cast<std::int64_t>(i)) {
      fail(ErrorCode::NonContiguousIndices,
           "segment index " + std::to_string(rec.index) + " at position " +
               std::to_string(i) + "; indices must run 0..n-1");
    }
    if (rec.duration_s != duration) {
      fail(ErrorCode::HeterogeneousDurations,
           "segment " + std::to_string(i) + " has duration " +
               std::to_string(rec.duration_s) + ", expected " +
               std::to_string(duration));
    }
    if (!std::isfinite(rec.quality) || !scale.contains(rec.quality)) {
      fail(ErrorCode::QualityOutOfRange,
           "quality " + std::to_string(rec.quality) + " at index " +
               std::to_string(i) + " outside scale [" + std::to_string(scale.lo) +
               ", " + std::to_string(scale.hi) + "]");
    }
  }

  SessionTrace trace;
  trace.scale_ = scale;
  trace.duration_s_ = duration;
  trace.qualities_.reserve(records.size());
  for (const SegmentRecord& rec : records) trace.qualities_.push_back(rec.quality);
  trace.segments_ = std::move(records);
  return trace;
}

SessionTrace SessionTrace::prefix(double length_s) const {
  if (length_s > total_duration_s() + 1e-9) {
    fail(ErrorCode::LengthExceedsTrace,
         "prefix length " + std::to_string(length_s) + " s exceeds trace duration " +
             std::to_string(total_duration_s()) + " s");
  }
  auto n = whole_segments(length_s, duration_s_);
  if (!n) {
    fail(ErrorCode::LengthNotAligned,
         "prefix length " + std::to_string(length_s) +
             " s is not a positive multiple of the segment duration " +
             std::to_string(duration_s_) + " s");
  }
  std::size_t count = static_cast<std::size_t>(*n);
  if (count > segments_.size()) {
    fail(ErrorCode::LengthExceedsTrace,
         "prefix of " + std::to_string(count) + " segments exceeds trace length " +
             std::to_string(segments_.size()));
  }
  SessionTrace out;
  out.scale_ = scale_;
  out.duration_s_ = duration_s_;
  out.segments_.assign(segments_.begin(), segments_.begin() + count);
  out.qualities_.assign(qualities_.begin(), qualities_.begin() + count);
  return out;
}

SessionTrace make_trace(std::span<const double> qualities,
                        const QualityScale& scale, double duration_s) {
  std::vector<SegmentRecord> records;
  records.reserve(qualities.size());
  for (std::size_t i = 0; i < qualities.size(); ++i) {
    records.push_back(SegmentRecord{static_cast<std::int64_t>(i), duration_s,
                                    qualities[i], std::nullopt, std::nullopt});
  }
  return validate_trace(std::move(records), scale);
}

LabeledDataset validate_dataset(LabeledDataset dataset) {
  check_scale(dataset.scale);
  if (dataset.items.empty()) {
    fail(ErrorCode::EmptyDataset, "labeled dataset has no items");
  }
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    const LabeledSequence& item = dataset.items[i];
    if (!item.trace) {
      fail(ErrorCode::EmptyDataset, "item " + std::to_string(i) + " has no trace");
    }
    if (item.trace->scale() != dataset.scale) {
      fail(ErrorCode::ScaleMismatch,
           "item " + std::to_string(i) + " uses a different quality scale");
    }
    if (!dataset.scale.contains(item.mos)) {
      fail(ErrorCode::MosOutOfRange,
           "item " + std::to_string(i) + " MOS " + std::to_string(item.mos) +
               " outside scale");
    }
    // Throws LengthNotAligned / LengthExceedsTrace on bad prefix lengths.
    (void)item.trace->prefix(item.length_s);
  }
  return dataset;
}

}  // namespace cqm
