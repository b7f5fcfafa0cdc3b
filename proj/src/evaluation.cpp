#include "cqm/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace cqm {

namespace {

void require_equal_lengths(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    fail(ErrorCode::LengthMismatch,
         "vector lengths differ: " + std::to_string(x.size()) + " vs " +
             std::to_string(y.size()));
  }
}

// Continued fraction for the incomplete beta function (Lentz's method).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  // Use the continued fraction on the side where it converges fast.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_distribution_sf(double f, int df1, int df2) {
  if (df1 < 1 || df2 < 1) {
    fail(ErrorCode::TooFewSamples, "F distribution needs positive degrees of freedom");
  }
  if (!(f > 0.0)) return 1.0;
  const double d1 = static_cast<double>(df1);
  const double d2 = static_cast<double>(df2);
  return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

double pcc(std::span<const double> x, std::span<const double> y) {
  require_equal_lengths(x, y);
  if (x.size() < 2) {
    fail(ErrorCode::TooFewSamples,
         "correlation needs at least 2 pairs, got " + std::to_string(x.size()));
  }
  const double n = static_cast<double>(x.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    fail(ErrorCode::DegenerateInput, "correlation undefined for zero-variance input");
  }
  return sxy / std::sqrt(sxx * syy);
}

double rmse(std::span<const double> x, std::span<const double> y) {
  require_equal_lengths(x, y);
  if (x.empty()) {
    fail(ErrorCode::LengthMismatch, "rmse needs at least one pair");
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(x.size()));
}

MetricReport evaluate_model(const LabeledDataset& dataset,
                            const SequencePredictor& predictor,
                            std::span<const SplitPair> splits, bool align) {
  if (splits.empty()) {
    fail(ErrorCode::ConfigError, "evaluation needs at least one split");
  }
  // One prediction per item, reused by every split.
  std::vector<double> raw;
  raw.reserve(dataset.items.size());
  for (const LabeledSequence& item : dataset.items) raw.push_back(predictor(item));

  struct PooledPoint {
    double length_s;
    double predicted;
    double mos;
  };
  std::vector<PooledPoint> pooled;

  double sum_pcc = 0.0;
  double sum_rmse = 0.0;
  for (const SplitPair& split : splits) {
    AlignmentCoeffs coeffs;  // identity unless fitted
    if (align) {
      std::vector<double> train_pred, train_mos;
      train_pred.reserve(split.train.size());
      train_mos.reserve(split.train.size());
      for (std::size_t idx : split.train) {
        train_pred.push_back(raw[idx]);
        train_mos.push_back(dataset.items[idx].mos);
      }
      coeffs = fit_alignment(train_pred, train_mos);
    }
    std::vector<double> test_pred, test_mos;
    test_pred.reserve(split.test.size());
    test_mos.reserve(split.test.size());
    for (std::size_t idx : split.test) {
      const double value = coeffs.apply(raw[idx]);
      test_pred.push_back(value);
      test_mos.push_back(dataset.items[idx].mos);
      pooled.push_back(PooledPoint{dataset.items[idx].length_s, value,
                                   dataset.items[idx].mos});
    }
    sum_pcc += pcc(test_pred, test_mos);
    sum_rmse += rmse(test_pred, test_mos);
  }

  MetricReport report;
  report.pcc = sum_pcc / static_cast<double>(splits.size());
  report.rmse = sum_rmse / static_cast<double>(splits.size());
  report.n = pooled.size();

  std::map<double, std::vector<PooledPoint>> by_length;
  for (const PooledPoint& point : pooled) by_length[point.length_s].push_back(point);
  for (const auto& [length_s, points] : by_length) {
    LengthBucket bucket;
    bucket.n = points.size();
    std::vector<double> p, m;
    p.reserve(points.size());
    m.reserve(points.size());
    for (const PooledPoint& point : points) {
      p.push_back(point.predicted);
      m.push_back(point.mos);
    }
    bucket.rmse = rmse(p, m);
    try {
      bucket.pcc = pcc(p, m);
    } catch (const CqmError&) {
      bucket.pcc = std::numeric_limits<double>::quiet_NaN();
    }
    report.by_length.emplace(length_s, bucket);
  }
  return report;
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) {
    fail(ErrorCode::TooFewGroups,
         "one-way ANOVA needs at least 2 groups, got " + std::to_string(groups.size()));
  }
  std::size_t total_n = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() < 2) {
      fail(ErrorCode::TooFewSamples,
           "ANOVA group " + std::to_string(g) + " has " +
               std::to_string(groups[g].size()) + " samples, needs >= 2");
    }
    total_n += groups[g].size();
  }

  double grand_sum = 0.0;
  for (const auto& group : groups) {
    for (double v : group) grand_sum += v;
  }
  const double grand_mean = grand_sum / static_cast<double>(total_n);

  double ss_between = 0.0;
  double ss_within = 0.0;
  for (const auto& group : groups) {
    double group_sum = 0.0;
    for (double v : group) group_sum += v;
    const double group_mean = group_sum / static_cast<double>(group.size());
    const double dm = group_mean - grand_mean;
    ss_between += static_cast<double>(group.size()) * dm * dm;
    for (double v : group) {
      const double d = v - group_mean;
      ss_within += d * d;
    }
  }

  AnovaResult result;
  result.df_between = static_cast<int>(groups.size()) - 1;
  result.df_within = static_cast<int>(total_n - groups.size());
  const double ms_between = ss_between / result.df_between;
  const double ms_within = ss_within / result.df_within;
  result.eta_p2 =
      (ss_between + ss_within) > 0.0 ? ss_between / (ss_between + ss_within) : 0.0;
  if (ms_within > 0.0) {
    result.f = ms_between / ms_within;
    result.p = f_distribution_sf(result.f, result.df_between, result.df_within);
  } else {
    // No within-group variance: either a perfect separation or all-equal data.
    result.f = ss_between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    result.p = ss_between > 0.0 ? 0.0 : 1.0;
  }
  return result;
}

std::vector<std::vector<double>> quantile_groups(std::span<const double> statistic,
                                                 std::span<const double> response,
                                                 int n_bins) {
  require_equal_lengths(statistic, response);
  if (n_bins < 2) {
    fail(ErrorCode::ConfigError, "quantile binning needs at least 2 bins");
  }
  const std::size_t n = statistic.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (statistic[a] != statistic[b]) return statistic[a] < statistic[b];
    return a < b;
  });

  std::vector<std::vector<double>> groups;
  std::size_t start = 0;
  for (int b = 0; b < n_bins; ++b) {
    std::size_t stop = n * static_cast<std::size_t>(b + 1) /
                       static_cast<std::size_t>(n_bins);
    std::vector<double> group;
    for (std::size_t i = start; i < stop; ++i) group.push_back(response[order[i]]);
    if (group.size() >= 2) groups.push_back(std::move(group));
    start = stop;
  }
  return groups;
}

double bench_per_segment_ms(const SessionTrace& trace, const CqmWeights& weights,
                            std::shared_ptr<const WindowQualityModel> wqm,
                            int warmup) {
  if (trace.size() < 100) {
    fail(ErrorCode::TraceTooShort,
         "benchmark needs at least 100 segments, got " + std::to_string(trace.size()));
  }
  if (warmup < 0 || static_cast<std::size_t>(warmup) >= trace.size()) {
    fail(ErrorCode::InvalidWarmup,
         "warmup of " + std::to_string(warmup) + " segments must be below the trace length " +
             std::to_string(trace.size()));
  }

  CqmStreamPredictor predictor(trace.scale(), trace.uniform_duration_s(), weights,
                               std::move(wqm));
  const std::span<const double> q = trace.qualities();
  volatile double sink = 0.0;  // keep the loop from being optimized away
  for (int i = 0; i < warmup; ++i) {
    sink = predictor.push(q[static_cast<std::size_t>(i)]);
  }
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = static_cast<std::size_t>(warmup); i < q.size(); ++i) {
    sink = predictor.push(q[i]);
  }
  const auto stop = std::chrono::steady_clock::now();
  (void)sink;
  const double elapsed_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  return elapsed_ms / static_cast<double>(q.size() - static_cast<std::size_t>(warmup));
}

}  // namespace cqm
