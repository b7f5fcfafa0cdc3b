#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cqm/predictor.hpp"
#include "cqm/trace.hpp"

namespace cqm {

// Random train/test split protocol: `repeats` independent partitions of the
// dataset, train size = round(fraction * n). Splits are reproducible from
// the seed on any platform: repeat r shuffles the index list with a
// Fisher-Yates pass driven by mt19937_64 seeded with mix_seed(seed, r),
// takes the first round(fraction * n) indices as the training set, and
// reports both sides sorted ascending.
struct SplitPlan {
  std::uint64_t seed = 0;
  int repeats = 50;
  double train_fraction = 0.5;
};

struct SplitPair {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Throws DatasetTooSmall (n < 2) or ConfigError on a bad plan.
std::vector<SplitPair> make_splits(std::size_t n_items, const SplitPlan& plan);
std::vector<SplitPair> make_splits(const LabeledDataset& dataset,
                                   const SplitPlan& plan);

// One calibration observation: model inputs at the rated boundary plus the
// subjective score.
struct FeatureSample {
  FeatureVector features;
  double mos = 0.0;
};

// Features at each item's rated prefix boundary, paired with its MOS.
std::vector<FeatureSample> extract_features(
    const LabeledDataset& dataset, std::shared_ptr<const WindowQualityModel> wqm);

struct FitResult {
  CqmWeights weights;
  bool rank_deficient = false;
};

// Least-squares fit of the four weights (no intercept, matching the model
// form) via the 4x4 normal equations with a 1e-9 ridge on the diagonal.
// With `nonneg`, negative components are clamped to zero and the remaining
// ones refit until all active components are nonnegative. Throws
// InsufficientSamples for fewer than 4 samples.
FitResult fit_weights(std::span<const FeatureSample> samples, bool nonneg = false);

// First-order alignment mapping predicted scores onto the subjective scale
// (slope/intercept of the least-squares line predicted -> mos).
struct AlignmentCoeffs {
  double slope = 1.0;
  double intercept = 0.0;

  double apply(double predicted) const { return slope * predicted + intercept; }
};

// Throws LengthMismatch, InsufficientSamples (< 2 pairs), or
// DegenerateInput when the predicted scores have zero variance.
AlignmentCoeffs fit_alignment(std::span<const double> predicted,
                              std::span<const double> mos);

}  // namespace cqm
