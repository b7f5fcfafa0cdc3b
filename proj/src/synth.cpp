#include "cqm/synth.hpp"

#include <cmath>
#include <string>

#include "cqm/rng.hpp"

namespace cqm {

namespace {

std::vector<double> resolved_level_qualities(const GeneratorSpec& spec) {
  if (!spec.level_qualities.empty()) return spec.level_qualities;
  std::vector<double> q(static_cast<std::size_t>(spec.levels));
  const double step = spec.scale.width() / static_cast<double>(spec.levels - 1);
  for (int i = 0; i < spec.levels; ++i) {
    q[static_cast<std::size_t>(i)] = spec.scale.lo + step * i;
  }
  q.back() = spec.scale.hi;  // avoid drifting past hi by accumulated rounding
  return q;
}

// Seed streams: traces and MOS noise draw from distinct per-session streams
// so adding noise never perturbs the traces themselves.
constexpr std::uint64_t kTraceStream = 0x7261636554ULL;
constexpr std::uint64_t kNoiseStream = 0x6573696f4eULL;

}  // namespace

void check_generator_spec(const GeneratorSpec& spec) {
  check_scale(spec.scale);
  if (spec.n_sessions < 1) {
    fail(ErrorCode::InvalidSpec, "generator needs n_sessions >= 1");
  }
  if (spec.levels < 2) {
    fail(ErrorCode::InvalidSpec,
         "generator needs at least 2 quality levels, got " +
             std::to_string(spec.levels));
  }
  if (spec.length_s_min < 1 || spec.length_s_max < spec.length_s_min) {
    fail(ErrorCode::InvalidSpec, "generator length range is empty");
  }
  if (!(spec.stickiness >= 0.0 && spec.stickiness <= 1.0)) {
    fail(ErrorCode::InvalidSpec,
         "stickiness must lie in [0, 1], got " + std::to_string(spec.stickiness));
  }
  if (!(spec.segment_duration_s > 0.0)) {
    fail(ErrorCode::InvalidSpec, "segment duration must be positive");
  }
  if (!spec.level_qualities.empty()) {
    if (spec.level_qualities.size() != static_cast<std::size_t>(spec.levels)) {
      fail(ErrorCode::InvalidSpec,
           "level_qualities must have one entry per level");
    }
    for (std::size_t i = 0; i < spec.level_qualities.size(); ++i) {
      if (!spec.scale.contains(spec.level_qualities[i]) ||
          (i > 0 && spec.level_qualities[i] <= spec.level_qualities[i - 1])) {
        fail(ErrorCode::InvalidSpec,
             "level_qualities must be strictly increasing within the scale");
      }
    }
  }
}

SessionTrace generate_trace(const GeneratorSpec& spec, int session_index) {
  check_generator_spec(spec);
  const std::vector<double> level_q = resolved_level_qualities(spec);

  Rng rng(mix_seed(spec.seed ^ kTraceStream,
                   static_cast<std::uint64_t>(session_index)));
  const int length_s =
      spec.length_s_min +
      static_cast<int>(rng.next_below(
          static_cast<std::uint64_t>(spec.length_s_max - spec.length_s_min + 1)));
  const double segments_exact =
      static_cast<double>(length_s) / spec.segment_duration_s;
  const double rounded = std::round(segments_exact);
  if (rounded < 1.0 ||
      std::abs(segments_exact - rounded) > 1e-9 * std::max(1.0, segments_exact)) {
    fail(ErrorCode::InvalidSpec,
         "session length " + std::to_string(length_s) +
             " s is not a whole number of segments");
  }
  const std::size_t n_segments = static_cast<std::size_t>(rounded);

  int level = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(spec.levels)));
  std::vector<double> qualities;
  qualities.reserve(n_segments);
  for (std::size_t i = 0; i < n_segments; ++i) {
    qualities.push_back(level_q[static_cast<std::size_t>(level)]);
    const double u = rng.next_unit();
    if (u >= spec.stickiness) {
      if (level == 0) {
        level = 1;
      } else if (level == spec.levels - 1) {
        level = spec.levels - 2;
      } else {
        // Split the leave probability evenly between the two neighbors.
        const double mid = spec.stickiness + (1.0 - spec.stickiness) / 2.0;
        level += (u < mid) ? -1 : 1;
      }
    }
  }
  return make_trace(qualities, spec.scale, spec.segment_duration_s);
}

LabeledDataset generate_labeled_dataset(const GeneratorSpec& spec,
                                        const CqmWeights& weights,
                                        std::shared_ptr<const WindowQualityModel> wqm,
                                        double noise_sigma) {
  check_generator_spec(spec);
  if (noise_sigma < 0.0 || !std::isfinite(noise_sigma)) {
    fail(ErrorCode::InvalidSpec, "noise sigma must be >= 0");
  }

  LabeledDataset dataset;
  dataset.scale = spec.scale;
  for (int s = 0; s < spec.n_sessions; ++s) {
    auto trace = std::make_shared<const SessionTrace>(generate_trace(spec, s));
    Rng noise(mix_seed(spec.seed ^ kNoiseStream, static_cast<std::uint64_t>(s)));

    std::vector<double> prefix_lengths;
    const double total = trace->total_duration_s();
    for (double len = 60.0; len <= total + 1e-9; len += 60.0) {
      prefix_lengths.push_back(len);
    }
    if (prefix_lengths.empty()) prefix_lengths.push_back(total);

    for (double length_s : prefix_lengths) {
      SessionTrace rated = trace->prefix(length_s);
      const double model_value =
          cqm_value(features_at_end(rated, wqm), weights, spec.scale);
      double mos = model_value;
      if (noise_sigma > 0.0) mos += noise_sigma * noise.next_gaussian();
      dataset.items.push_back(
          LabeledSequence{trace, length_s, spec.scale.clamp(mos)});
    }
  }
  return validate_dataset(std::move(dataset));
}

}  // namespace cqm
