#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cqm/trace.hpp"

namespace cqm {

// Scores one window of consecutive segment qualities. Implementations are
// deterministic, immutable after configuration, and clamp their output to
// the quality scale, so everything downstream stays in-scale.
class WindowQualityModel {
 public:
  virtual ~WindowQualityModel() = default;

  virtual const std::string& name() const noexcept = 0;

  // Quality of one window, clamped to the scale. Throws EmptyWindow.
  virtual double score(std::span<const double> window) const = 0;
};

// ---------------------------------------------------------------------------
// Scoring primitives. These are the math behind the four baseline models;
// each maps a window of in-scale qualities to one value.
// ---------------------------------------------------------------------------

// Arithmetic mean.
double score_mean(std::span<const double> window);

// mean - alpha * population standard deviation, clamped to scale.
double score_mean_std(std::span<const double> window, double alpha,
                      const QualityScale& scale);

// mean - lambda * mean absolute switching amplitude, clamped to scale.
// A single-element window has no switches; the penalty term is 0.
double score_switch_penalty(std::span<const double> window, double lambda,
                            const QualityScale& scale);

struct HistogramParams {
  int bins = 4;
  std::vector<double> value_weights;  // one per bin; empty -> bin centers
  std::vector<double> drop_weights;   // one per bin; empty -> all zero
};

// Weighted histogram score: sum(value_weights * value_hist) minus
// sum(drop_weights * drop_hist), clamped to scale.
//
// value_hist: qualities over `bins` equal-width bins spanning the scale,
// normalized by the window length. drop_hist: magnitudes of quality drops
// (negative switching amplitudes) over `bins` equal-width bins spanning
// [0, hi-lo], normalized by the number of transitions (window length - 1;
// zero for a single-element window). Bins are half-open except the last,
// which is closed.
double score_histogram(std::span<const double> window,
                       const HistogramParams& params, const QualityScale& scale);

// ---------------------------------------------------------------------------
// Baseline models
// ---------------------------------------------------------------------------

class MeanModel final : public WindowQualityModel {
 public:
  explicit MeanModel(const QualityScale& scale);
  const std::string& name() const noexcept override { return name_; }
  double score(std::span<const double> window) const override;

 private:
  std::string name_;
  QualityScale scale_;
};

class MeanStdModel final : public WindowQualityModel {
 public:
  MeanStdModel(const QualityScale& scale, double alpha = 1.0);
  const std::string& name() const noexcept override { return name_; }
  double score(std::span<const double> window) const override;
  double alpha() const noexcept { return alpha_; }

 private:
  std::string name_;
  QualityScale scale_;
  double alpha_;
};

class SwitchPenaltyModel final : public WindowQualityModel {
 public:
  SwitchPenaltyModel(const QualityScale& scale, double lambda = 0.5);
  const std::string& name() const noexcept override { return name_; }
  double score(std::span<const double> window) const override;
  double lambda() const noexcept { return lambda_; }

 private:
  std::string name_;
  QualityScale scale_;
  double lambda_;
};

class HistogramModel final : public WindowQualityModel {
 public:
  HistogramModel(const QualityScale& scale, HistogramParams params = {});
  const std::string& name() const noexcept override { return name_; }
  double score(std::span<const double> window) const override;
  const HistogramParams& params() const noexcept { return params_; }

 private:
  std::string name_;
  QualityScale scale_;
  HistogramParams params_;
};

// ---------------------------------------------------------------------------
// Configuration-driven factory (CLI and config files select models by name)
// ---------------------------------------------------------------------------

struct WqmConfig {
  std::string name = "mean";  // mean | mean_std | switch_penalty | histogram
  double alpha = 1.0;
  double lambda = 0.5;
  HistogramParams histogram;
};

// Throws InvalidModelConfig for unknown names or bad parameters.
std::shared_ptr<const WindowQualityModel> make_window_quality_model(
    const WqmConfig& config, const QualityScale& scale);

}  // namespace cqm
