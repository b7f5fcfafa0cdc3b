#include "cqm/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "cqm/rng.hpp"

namespace cqm {

namespace {

constexpr double kRidge = 1e-9;
constexpr int kDim = 4;

using Matrix4 = std::array<std::array<double, kDim>, kDim>;
using Vector4 = std::array<double, kDim>;

// Gaussian elimination with partial pivoting. The systems here are 4x4 and
// ridge-regularized, so a pivot can only vanish if the inputs are broken.
Vector4 solve4(Matrix4 a, Vector4 b, std::span<const int> active) {
  const int m = static_cast<int>(active.size());
  for (int col = 0; col < m; ++col) {
    int pivot = col;
    for (int row = col + 1; row < m; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    if (a[col][col] == 0.0) {
      fail(ErrorCode::DegenerateInput, "singular normal equations");
    }
    for (int row = col + 1; row < m; ++row) {
      double factor = a[row][col] / a[col][col];
      for (int k = col; k < m; ++k) a[row][k] -= factor * a[col][k];
      b[row] -= factor * b[col];
    }
  }
  Vector4 x{};
  for (int row = m - 1; row >= 0; --row) {
    double sum = b[row];
    for (int k = row + 1; k < m; ++k) sum -= a[row][k] * x[k];
    x[row] = sum / a[row][row];
  }
  return x;
}

// Rank of the (symmetric, PSD) normal matrix, estimated from elimination
// pivots against a relative threshold.
int estimate_rank(Matrix4 a) {
  double max_diag = 0.0;
  for (int i = 0; i < kDim; ++i) max_diag = std::max(max_diag, std::abs(a[i][i]));
  if (max_diag == 0.0) return 0;
  const double tol = 1e-10 * max_diag;
  int rank = 0;
  for (int col = 0; col < kDim; ++col) {
    int pivot = col;
    for (int row = col + 1; row < kDim; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    std::swap(a[col], a[pivot]);
    if (std::abs(a[col][col]) <= tol) break;
    ++rank;
    for (int row = col + 1; row < kDim; ++row) {
      double factor = a[row][col] / a[col][col];
      for (int k = col; k < kDim; ++k) a[row][k] -= factor * a[col][k];
    }
  }
  return rank;
}

}  // namespace

std::vector<SplitPair> make_splits(std::size_t n_items, const SplitPlan& plan) {
  if (n_items < 2) {
    fail(ErrorCode::DatasetTooSmall,
         "split protocol needs at least 2 items, got " + std::to_string(n_items));
  }
  if (plan.repeats < 1) {
    fail(ErrorCode::ConfigError, "split repeats must be >= 1");
  }
  if (!(plan.train_fraction > 0.0) || !(plan.train_fraction < 1.0)) {
    fail(ErrorCode::ConfigError, "train fraction must be in (0, 1)");
  }

  std::size_t train_size = static_cast<std::size_t>(
      std::llround(plan.train_fraction * static_cast<double>(n_items)));
  train_size = std::clamp<std::size_t>(train_size, 1, n_items - 1);

  std::vector<SplitPair> splits;
  splits.reserve(static_cast<std::size_t>(plan.repeats));
  for (int r = 0; r < plan.repeats; ++r) {
    std::vector<std::size_t> indices(n_items);
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    Rng rng(mix_seed(plan.seed, static_cast<std::uint64_t>(r)));
    rng.shuffle(indices);

    SplitPair pair;
    pair.train.assign(indices.begin(), indices.begin() + train_size);
    pair.test.assign(indices.begin() + train_size, indices.end());
    std::sort(pair.train.begin(), pair.train.end());
    std::sort(pair.test.begin(), pair.test.end());
    splits.push_back(std::move(pair));
  }
  return splits;
}

std::vector<SplitPair> make_splits(const LabeledDataset& dataset,
                                   const SplitPlan& plan) {
  return make_splits(dataset.items.size(), plan);
}

std::vector<FeatureSample> extract_features(
    const LabeledDataset& dataset, std::shared_ptr<const WindowQualityModel> wqm) {
  std::vector<FeatureSample> samples;
  samples.reserve(dataset.items.size());
  for (const LabeledSequence& item : dataset.items) {
    SessionTrace rated = item.trace->prefix(item.length_s);
    samples.push_back(FeatureSample{features_at_end(rated, wqm), item.mos});
  }
  return samples;
}

FitResult fit_weights(std::span<const FeatureSample> samples, bool nonneg) {
  if (samples.size() < static_cast<std::size_t>(kDim)) {
    fail(ErrorCode::InsufficientSamples,
         "weight fitting needs at least 4 samples, got " +
             std::to_string(samples.size()));
  }

  Matrix4 xtx{};
  Vector4 xty{};
  for (const FeatureSample& s : samples) {
    for (int i = 0; i < kDim; ++i) {
      xty[i] += s.features[i] * s.mos;
      for (int j = 0; j < kDim; ++j) {
        xtx[i][j] += s.features[i] * s.features[j];
      }
    }
  }

  FitResult result;
  result.rank_deficient = estimate_rank(xtx) < kDim;

  // Active-set loop: fit, clamp negative components to zero, refit the rest.
  std::array<bool, kDim> active;
  active.fill(true);
  Vector4 solution{};
  for (int pass = 0; pass <= kDim; ++pass) {
    std::vector<int> idx;
    for (int i = 0; i < kDim; ++i) {
      if (active[i]) idx.push_back(i);
    }
    solution.fill(0.0);
    if (!idx.empty()) {
      Matrix4 a{};
      Vector4 b{};
      for (std::size_t r = 0; r < idx.size(); ++r) {
        b[r] = xty[static_cast<std::size_t>(idx[r])];
        for (std::size_t c = 0; c < idx.size(); ++c) {
          a[r][c] = xtx[static_cast<std::size_t>(idx[r])]
                        [static_cast<std::size_t>(idx[c])];
        }
        a[r][r] += kRidge;
      }
      Vector4 sub = solve4(a, b, std::span<const int>(idx));
      for (std::size_t r = 0; r < idx.size(); ++r) {
        solution[static_cast<std::size_t>(idx[r])] = sub[r];
      }
    }
    if (!nonneg) break;
    bool clipped = false;
    for (int i = 0; i < kDim; ++i) {
      if (active[i] && solution[static_cast<std::size_t>(i)] < 0.0) {
        active[i] = false;
        clipped = true;
      }
    }
    if (!clipped) break;
  }

  result.weights.w_last50 = solution[0];
  result.weights.w_avg60 = solution[1];
  result.weights.w_min50 = solution[2];
  result.weights.w_max50 = solution[3];
  return result;
}

AlignmentCoeffs fit_alignment(std::span<const double> predicted,
                              std::span<const double> mos) {
  if (predicted.size() != mos.size()) {
    fail(ErrorCode::LengthMismatch,
         "alignment needs equally many predictions and scores");
  }
  if (predicted.size() < 2) {
    fail(ErrorCode::InsufficientSamples,
         "alignment needs at least 2 pairs, got " + std::to_string(predicted.size()));
  }
  const double n = static_cast<double>(predicted.size());
  double mean_p = 0.0, mean_m = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    mean_p += predicted[i];
    mean_m += mos[i];
  }
  mean_p /= n;
  mean_m /= n;
  double spp = 0.0, spm = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    double dp = predicted[i] - mean_p;
    spp += dp * dp;
    spm += dp * (mos[i] - mean_m);
  }
  if (spp <= 0.0) {
    fail(ErrorCode::DegenerateInput,
         "predicted scores have zero variance; alignment is undefined");
  }
  AlignmentCoeffs coeffs;
  coeffs.slope = spm / spp;
  coeffs.intercept = mean_m - coeffs.slope * mean_p;
  return coeffs;
}

}  // namespace cqm
