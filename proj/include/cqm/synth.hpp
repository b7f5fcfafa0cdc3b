#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cqm/predictor.hpp"
#include "cqm/trace.hpp"
#include "cqm/window_quality.hpp"

namespace cqm {

// Synthetic session generator: a Markov-chain walk over quality levels,
// one segment per step. Stickiness is the probability of staying at the
// current level; the remainder is split evenly over the +-1 neighbors (an
// edge level hands the whole remainder to its single neighbor). Everything
// is deterministic given the seed; each session uses its own derived seed
// so sessions can be produced in any order or in parallel.
struct GeneratorSpec {
  std::uint64_t seed = 0;
  int n_sessions = 6;
  int length_s_min = 360;  // session length drawn uniformly from this range
  int length_s_max = 360;
  int levels = 9;
  std::vector<double> level_qualities;  // empty -> evenly spaced over the scale
  double stickiness = 0.7;
  QualityScale scale;
  double segment_duration_s = 1.0;
};

// Throws InvalidSpec on out-of-range parameters.
void check_generator_spec(const GeneratorSpec& spec);

// One synthetic session. The session index selects the derived seed, so
// generate_trace(spec, i) is independent of any other index.
SessionTrace generate_trace(const GeneratorSpec& spec, int session_index = 0);

// Labeled corpus for calibration rehearsal: for every session, prefixes at
// 60 s steps (or the full session when it is shorter than 60 s) labeled
// with MOS = clamp(model value at the prefix end + Gaussian(0, noise_sigma)).
// With noise_sigma = 0 the labels are exactly the planted model's values,
// which is what the plant-and-recover calibration checks rely on.
LabeledDataset generate_labeled_dataset(const GeneratorSpec& spec,
                                        const CqmWeights& weights,
                                        std::shared_ptr<const WindowQualityModel> wqm,
                                        double noise_sigma);

}  // namespace cqm
