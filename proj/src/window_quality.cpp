#include "cqm/window_quality.hpp"

#include <cmath>
#include <cstddef>

namespace cqm {

namespace {

void require_nonempty(std::span<const double> window) {
  if (window.empty()) {
    fail(ErrorCode::EmptyWindow, "window quality model got an empty window");
  }
}

// Bin index for a value over `bins` equal-width bins spanning [lo, hi].
// Half-open bins, except the last bin which includes hi.
int bin_index(double value, double lo, double hi, int bins) {
  double width = (hi - lo) / bins;
  int idx = static_cast<int>(std::floor((value - lo) / width));
  if (idx < 0) idx = 0;
  if (idx >= bins) idx = bins - 1;
  return idx;
}

}  // namespace

double score_mean(std::span<const double> window) {
  require_nonempty(window);
  // Anchored at the first element so a constant window maps to exactly that
  // constant (the deltas are all zero), as the model contract promises.
  const double anchor = window.front();
  double delta_sum = 0.0;
  for (double q : window) delta_sum += q - anchor;
  return anchor + delta_sum / static_cast<double>(window.size());
}

double score_mean_std(std::span<const double> window, double alpha,
                      const QualityScale& scale) {
  require_nonempty(window);
  const double mean = score_mean(window);
  double ss = 0.0;
  for (double q : window) {
    double d = q - mean;
    ss += d * d;
  }
  double std_pop = std::sqrt(ss / static_cast<double>(window.size()));
  return scale.clamp(mean - alpha * std_pop);
}

double score_switch_penalty(std::span<const double> window, double lambda,
                            const QualityScale& scale) {
  require_nonempty(window);
  const double mean = score_mean(window);
  double penalty = 0.0;
  if (window.size() > 1) {
    double sum_amp = 0.0;
    for (std::size_t i = 0; i + 1 < window.size(); ++i) {
      sum_amp += std::abs(window[i + 1] - window[i]);
    }
    penalty = sum_amp / static_cast<double>(window.size() - 1);
  }
  return scale.clamp(mean - lambda * penalty);
}

double score_histogram(std::span<const double> window,
                       const HistogramParams& params, const QualityScale& scale) {
  require_nonempty(window);
  const int bins = params.bins;
  if (bins < 2) {
    fail(ErrorCode::InvalidModelConfig,
         "histogram model needs at least 2 bins, got " + std::to_string(bins));
  }
  if (!params.value_weights.empty() &&
      params.value_weights.size() != static_cast<std::size_t>(bins)) {
    fail(ErrorCode::WeightDimensionMismatch,
         "value_weights has " + std::to_string(params.value_weights.size()) +
             " entries, expected " + std::to_string(bins));
  }
  if (!params.drop_weights.empty() &&
      params.drop_weights.size() != static_cast<std::size_t>(bins)) {
    fail(ErrorCode::WeightDimensionMismatch,
         "drop_weights has " + std::to_string(params.drop_weights.size()) +
             " entries, expected " + std::to_string(bins));
  }

  std::vector<double> value_hist(static_cast<std::size_t>(bins), 0.0);
  for (double q : window) {
    value_hist[static_cast<std::size_t>(bin_index(q, scale.lo, scale.hi, bins))] +=
        1.0;
  }
  for (double& v : value_hist) v /= static_cast<double>(window.size());

  std::vector<double> drop_hist(static_cast<std::size_t>(bins), 0.0);
  if (window.size() > 1) {
    for (std::size_t i = 0; i + 1 < window.size(); ++i) {
      double amplitude = window[i + 1] - window[i];
      if (amplitude < 0.0) {
        drop_hist[static_cast<std::size_t>(
            bin_index(-amplitude, 0.0, scale.width(), bins))] += 1.0;
      }
    }
    for (double& v : drop_hist) v /= static_cast<double>(window.size() - 1);
  }

  double score = 0.0;
  const double bin_width = scale.width() / bins;
  for (int b = 0; b < bins; ++b) {
    double vw = params.value_weights.empty()
                    ? scale.lo + (b + 0.5) * bin_width  // bin center
                    : params.value_weights[static_cast<std::size_t>(b)];
    score += vw * value_hist[static_cast<std::size_t>(b)];
    if (!params.drop_weights.empty()) {
      score -= params.drop_weights[static_cast<std::size_t>(b)] *
               drop_hist[static_cast<std::size_t>(b)];
    }
  }
  return scale.clamp(score);
}

// ---------------------------------------------------------------------------

MeanModel::MeanModel(const QualityScale& scale) : name_("mean"), scale_(scale) {
  check_scale(scale);
}

double MeanModel::score(std::span<const double> window) const {
  return scale_.clamp(score_mean(window));
}

MeanStdModel::MeanStdModel(const QualityScale& scale, double alpha)
    : name_("mean_std"), scale_(scale), alpha_(alpha) {
  check_scale(scale);
  if (alpha < 0.0 || !std::isfinite(alpha)) {
    fail(ErrorCode::InvalidModelConfig,
         "mean_std alpha must be >= 0, got " + std::to_string(alpha));
  }
}

double MeanStdModel::score(std::span<const double> window) const {
  return score_mean_std(window, alpha_, scale_);
}

SwitchPenaltyModel::SwitchPenaltyModel(const QualityScale& scale, double lambda)
    : name_("switch_penalty"), scale_(scale), lambda_(lambda) {
  check_scale(scale);
  if (lambda < 0.0 || !std::isfinite(lambda)) {
    fail(ErrorCode::InvalidModelConfig,
         "switch_penalty lambda must be >= 0, got " + std::to_string(lambda));
  }
}

double SwitchPenaltyModel::score(std::span<const double> window) const {
  return score_switch_penalty(window, lambda_, scale_);
}

HistogramModel::HistogramModel(const QualityScale& scale, HistogramParams params)
    : name_("histogram"), scale_(scale), params_(std::move(params)) {
  check_scale(scale);
  if (params_.bins < 2) {
    fail(ErrorCode::InvalidModelConfig,
         "histogram model needs at least 2 bins, got " +
             std::to_string(params_.bins));
  }
  auto check_dim = [&](const std::vector<double>& w, const char* which) {
    if (!w.empty() && w.size() != static_cast<std::size_t>(params_.bins)) {
      fail(ErrorCode::WeightDimensionMismatch,
           std::string(which) + " has " + std::to_string(w.size()) +
               " entries, expected " + std::to_string(params_.bins));
    }
  };
  check_dim(params_.value_weights, "value_weights");
  check_dim(params_.drop_weights, "drop_weights");
}

double HistogramModel::score(std::span<const double> window) const {
  return score_histogram(window, params_, scale_);
}

std::shared_ptr<const WindowQualityModel> make_window_quality_model(
    const WqmConfig& config, const QualityScale& scale) {
  if (config.name == "mean") {
    return std::make_shared<MeanModel>(scale);
  }
  if (config.name == "mean_std") {
    return std::make_shared<MeanStdModel>(scale, config.alpha);
  }
  if (config.name == "switch_penalty") {
    return std::make_shared<SwitchPenaltyModel>(scale, config.lambda);
  }
  if (config.name == "histogram") {
    return std::make_shared<HistogramModel>(scale, config.histogram);
  }
  fail(ErrorCode::InvalidModelConfig,
       "unknown window quality model '" + config.name +
           "' (expected mean, mean_std, switch_penalty, or histogram)");
}

}  // namespace cqm
