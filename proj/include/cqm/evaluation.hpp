#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "cqm/calibration.hpp"
#include "cqm/predictor.hpp"
#include "cqm/trace.hpp"

namespace cqm {

// Sample Pearson correlation. Throws LengthMismatch, TooFewSamples (< 2
// pairs), or DegenerateInput when either side has zero variance.
double pcc(std::span<const double> x, std::span<const double> y);

// Root-mean-squared error. Throws LengthMismatch (also for empty input).
double rmse(std::span<const double> x, std::span<const double> y);

struct LengthBucket {
  double pcc = 0.0;  // NaN when the bucket is degenerate (< 2 pairs or no spread)
  double rmse = 0.0;
  std::size_t n = 0;
};

// Prediction performance over the split protocol. pcc/rmse are means over
// the per-split test sets; n counts the pooled test predictions, and
// by_length groups those pooled predictions by rated sequence length, so
// the bucket counts sum to n.
struct MetricReport {
  double pcc = 0.0;
  double rmse = 0.0;
  std::size_t n = 0;
  std::map<double, LengthBucket> by_length;
};

using SequencePredictor = std::function<double(const LabeledSequence&)>;

// Runs the split protocol for one predictor: per split, optionally fit the
// first-order alignment on the training portion and apply it to the test
// predictions, then score the test set; report the means over splits plus
// the pooled per-length breakdown. The predictor is invoked once per item.
MetricReport evaluate_model(const LabeledDataset& dataset,
                            const SequencePredictor& predictor,
                            std::span<const SplitPair> splits, bool align);

struct AnovaResult {
  double f = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p = 1.0;
  double eta_p2 = 0.0;  // SS_between / (SS_between + SS_within)
};

// One-way fixed-effects analysis of variance. Needs >= 2 groups with >= 2
// samples each (TooFewGroups / TooFewSamples otherwise).
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

// Survival function of the F distribution, P(F(d1, d2) > f), via the
// regularized incomplete beta function (continued fraction, absolute error
// well under 1e-8).
double f_distribution_sf(double f, int df1, int df2);

// Regularized incomplete beta I_x(a, b); exposed for oracle checks.
double regularized_incomplete_beta(double a, double b, double x);

// Groups `response` values by quantile bins of `statistic` (default
// quartiles): one group per bin, suitable for anova_oneway. Bins left with
// fewer than 2 members are dropped. This binning is a convention of this
// toolkit, not a published protocol.
std::vector<std::vector<double>> quantile_groups(std::span<const double> statistic,
                                                 std::span<const double> response,
                                                 int n_bins = 4);

// Mean wall-clock milliseconds to process one segment (statistics update
// plus cumulative value) over the trace, with the first `warmup` segments
// excluded from timing. Throws TraceTooShort (< 100 segments) or
// InvalidWarmup (warmup < 0 or >= trace length).
double bench_per_segment_ms(const SessionTrace& trace, const CqmWeights& weights,
                            std::shared_ptr<const WindowQualityModel> wqm,
                            int warmup = 100);

}  // namespace cqm
