// Acceptance suite: runs every criterion end to end and prints one
// PASS/FAIL line each. Exit status is the number of failed criteria.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cqm/calibration.hpp"
#include "cqm/cli.hpp"
#include "cqm/evaluation.hpp"
#include "cqm/io.hpp"
#include "cqm/predictor.hpp"
#include "cqm/rng.hpp"
#include "cqm/synth.hpp"
#include "cqm/trace.hpp"
#include "test_support.hpp"

using namespace cqm;
namespace fs = std::filesystem;

namespace {

const QualityScale kScale{};

std::shared_ptr<const WindowQualityModel> mean_model() {
  return make_window_quality_model(WqmConfig{}, kScale);
}

struct Criterion {
  std::string name;
  double time_limit_s;
  std::function<bool(std::string&)> run;
};

bool check(bool ok, const std::string& detail, std::string& message) {
  if (!ok && message.empty()) message = detail;
  return ok;
}

// Straight-line per-prefix recomputation: batch statistics where a full
// window exists, whole-prefix score where not, then the weighted sum.
double prefix_oracle(const SessionTrace& prefix, const CqmWeights& w,
                     const WindowQualityModel& wqm) {
  const std::size_t n = prefix.size();
  double l50, mi50, ma50, av60;
  if (n >= 50) {
    const WindowStats stats = batch_stats(prefix, 50, wqm);
    l50 = stats.last;
    mi50 = stats.minimum;
    ma50 = stats.maximum;
  } else {
    l50 = mi50 = ma50 = wqm.score(prefix.qualities());
  }
  av60 = n >= 60 ? batch_stats(prefix, 60, wqm).average : wqm.score(prefix.qualities());
  return prefix.scale().clamp(w.w_last50 * l50 + w.w_avg60 * av60 +
                              w.w_min50 * mi50 + w.w_max50 * ma50);
}

double max_weight_error(const CqmWeights& a, const CqmWeights& b) {
  return std::max({std::abs(a.w_last50 - b.w_last50), std::abs(a.w_avg60 - b.w_avg60),
                   std::abs(a.w_min50 - b.w_min50), std::abs(a.w_max50 - b.w_max50)});
}

// --------------------------------------------------------------------------

bool c1_constant_session(std::string& message) {
  std::vector<double> q(120, 3.5);
  const CumulativeCurve curve =
      predict_curve(make_trace(q, kScale, 1.0), CqmWeights::defaults(), mean_model());
  bool ok = check(curve.points.size() == 120, "expected 120 curve points", message);
  for (const CurvePoint& point : curve.points) {
    ok &= check(std::abs(point.cqm - 3.5) <= 1e-6,
                "curve leaves 3.5 at t=" + std::to_string(point.t_s), message);
  }
  return ok;
}

bool c2_incremental_vs_batch(std::string& message) {
  Rng rng(0xACCE01);
  const std::array<int, 6> sizes{10, 20, 30, 40, 50, 60};
  const auto wqm = mean_model();
  for (int round = 0; round < 1000; ++round) {
    const std::size_t n = 10 + rng.next_below(391);
    std::vector<double> q = cqm::test::random_qualities(rng, n);
    const SessionTrace trace = make_trace(q, kScale, 1.0);

    MultiKTracker tracker(kScale, 1.0, sizes, wqm);
    for (double v : q) tracker.push_segment(v);

    for (int k : sizes) {
      const auto incremental = tracker.stats_snapshot(k);
      if (n < static_cast<std::size_t>(k)) {
        if (!check(!incremental.has_value(), "snapshot before one window", message))
          return false;
        continue;
      }
      if (!check(incremental.has_value(), "missing snapshot", message)) return false;
      const WindowStats batch = batch_stats(trace, k, *wqm);
      const double diff = std::max(
          {std::abs(incremental->first - batch.first),
           std::abs(incremental->last - batch.last),
           std::abs(incremental->average - batch.average),
           std::abs(incremental->minimum - batch.minimum),
           std::abs(incremental->maximum - batch.maximum)});
      if (!check(diff <= 1e-9,
                 "trace " + std::to_string(round) + " K=" + std::to_string(k) +
                     " diff=" + std::to_string(diff),
                 message)) {
        return false;
      }
    }
  }
  return true;
}

bool c3_curve_oracle(std::string& message) {
  Rng rng(0xACCE02);
  const auto wqm = mean_model();
  for (int round = 0; round < 50; ++round) {
    const std::size_t n = 10 + rng.next_below(351);
    std::vector<double> q = cqm::test::random_qualities(rng, n);
    const SessionTrace trace = make_trace(q, kScale, 1.0);
    const CumulativeCurve curve =
        predict_curve(trace, CqmWeights::defaults(), wqm);
    for (std::size_t boundary = 1; boundary <= n; ++boundary) {
      const double expected = prefix_oracle(
          trace.prefix(static_cast<double>(boundary)), CqmWeights::defaults(), *wqm);
      if (!check(std::abs(curve.points[boundary - 1].cqm - expected) <= 1e-9,
                 "trace " + std::to_string(round) + " N=" + std::to_string(boundary),
                 message)) {
        return false;
      }
    }
  }
  return true;
}

bool c4_plant_and_recover(std::string& message) {
  const CqmWeights planted{0.280, 0.426, 0.280, 0.014};
  const auto wqm = mean_model();

  // Noiseless: both the random-walk corpus and the design corpus recover
  // the plant to 1e-6.
  GeneratorSpec spec;
  spec.seed = 0xACCE03;
  spec.n_sessions = 6;
  const auto walk_samples =
      extract_features(generate_labeled_dataset(spec, planted, wqm, 0.0), wqm);
  bool ok = check(walk_samples.size() == 36, "expected 36 samples", message);
  ok &= check(
      max_weight_error(fit_weights(walk_samples, false).weights, planted) <= 1e-6,
      "noiseless recovery (random-walk corpus) above 1e-6", message);

  const auto design_samples = extract_features(
      cqm::test::calibration_design_corpus(0xACCE04, planted, wqm, 0.0), wqm);
  ok &= check(design_samples.size() == 36, "design corpus must have 36 items", message);
  ok &= check(
      max_weight_error(fit_weights(design_samples, false).weights, planted) <= 1e-6,
      "noiseless recovery (design corpus) above 1e-6", message);

  // Noisy: sigma 0.1 on MOS, 36 training samples, 50 seeds, >= 90% within
  // 0.05 on every component.
  int passes = 0;
  for (int seed = 0; seed < 50; ++seed) {
    const LabeledDataset dataset = cqm::test::calibration_design_corpus(
        9000 + static_cast<std::uint64_t>(seed), planted, wqm, 0.1);
    const auto samples = extract_features(dataset, wqm);
    if (max_weight_error(fit_weights(samples, false).weights, planted) <= 0.05) {
      ++passes;
    }
  }
  ok &= check(passes >= 45,
              "only " + std::to_string(passes) + "/50 noisy seeds within 0.05",
              message);
  return ok;
}

bool c5_metric_oracles(std::string& message) {
  Rng rng(0xACCE05);
  bool ok = true;
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = 3 + rng.next_below(80);
    std::vector<double> x = cqm::test::random_qualities(rng, n);
    std::vector<double> y = cqm::test::random_qualities(rng, n);

    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0, ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
      ss += (x[i] - y[i]) * (x[i] - y[i]);
    }
    ok &= check(std::abs(pcc(x, y) - sxy / std::sqrt(sxx * syy)) <= 1e-12,
                "pcc brute-force mismatch", message);
    ok &= check(std::abs(rmse(x, y) - std::sqrt(ss / static_cast<double>(n))) <= 1e-12,
                "rmse brute-force mismatch", message);

    const double a = 0.1 + 2.9 * rng.next_unit();
    const double b = rng.next_range(-2.0, 2.0);
    std::vector<double> scaled = y;
    for (double& v : scaled) v = a * v + b;
    ok &= check(std::abs(pcc(x, scaled) - pcc(x, y)) <= 1e-12,
                "pcc affine invariance violated", message);
    if (!ok) return false;
  }
  return ok;
}

bool c6_anova(std::string& message) {
  const AnovaResult split = anova_oneway({{1, 2, 3}, {4, 5, 6}});
  bool ok = check(std::abs(split.f - 13.5) <= 1e-9, "F(1,2,3 vs 4,5,6) != 13.5", message);
  ok &= check(std::abs(split.eta_p2 - 0.7714) <= 1e-4, "eta_p2 != 0.7714", message);

  Rng rng(0xACCE06);
  for (int round = 0; round < 100 && ok; ++round) {
    const std::size_t n_groups = 2 + rng.next_below(5);
    std::vector<std::vector<double>> groups;
    for (std::size_t g = 0; g < n_groups; ++g) {
      std::vector<double> group;
      const double center = rng.next_range(1.0, 5.0);
      const std::size_t size = 2 + rng.next_below(25);
      for (std::size_t i = 0; i < size; ++i) {
        group.push_back(center + 0.4 * rng.next_gaussian());
      }
      groups.push_back(std::move(group));
    }
    // two-pass sums-of-squares oracle
    double grand = 0;
    std::size_t total = 0;
    for (const auto& g : groups) {
      for (double v : g) grand += v;
      total += g.size();
    }
    grand /= static_cast<double>(total);
    double ssb = 0, ssw = 0;
    for (const auto& g : groups) {
      double gm = 0;
      for (double v : g) gm += v;
      gm /= static_cast<double>(g.size());
      ssb += static_cast<double>(g.size()) * (gm - grand) * (gm - grand);
      for (double v : g) ssw += (v - gm) * (v - gm);
    }
    const double dfb = static_cast<double>(groups.size()) - 1.0;
    const double dfw = static_cast<double>(total - groups.size());
    const double f_oracle = (ssb / dfb) / (ssw / dfw);
    const double eta_oracle = ssb / (ssb + ssw);
    const AnovaResult result = anova_oneway(groups);
    ok &= check(std::abs(result.f - f_oracle) <=
                    1e-10 * std::max(1.0, std::abs(f_oracle)),
                "ANOVA F mismatch vs oracle", message);
    ok &= check(std::abs(result.eta_p2 - eta_oracle) <= 1e-10,
                "ANOVA eta_p2 mismatch vs oracle", message);
  }

  // frozen high-precision reference values for the survival function
  struct Case {
    double f;
    int d1;
    int d2;
    double expected;
  };
  const Case cases[] = {
      {13.5, 1, 4, 0.0213116411287567},
      {0.5, 2, 10, 0.620921323059155},
      {1.0, 3, 20, 0.41325191406246},
      {2.75, 4, 36, 0.0429291013561133},
      {5.2, 1, 70, 0.0256355514624026},
      {44.283, 1, 1654, 3.85245521653979e-11},
      {0.149, 1, 1654, 0.699542475389262},
      {3.3, 5, 12, 0.0418464196906477},
      {10.0, 2, 30, 0.000470184984576},
      {0.01, 6, 100, 0.999995338788288},
  };
  for (const Case& c : cases) {
    ok &= check(std::abs(f_distribution_sf(c.f, c.d1, c.d2) - c.expected) <= 1e-6,
                "p-value spot case F=" + std::to_string(c.f), message);
  }
  return ok;
}

bool c7_complexity(std::string& message) {
  Rng rng(0xACCE07);
  const auto wqm = mean_model();

  std::vector<double> q = cqm::test::random_qualities(rng, 3600);
  const SessionTrace trace = make_trace(q, kScale, 1.0);
  double best_ms = 1e9;
  for (int rep = 0; rep < 3; ++rep) {
    best_ms = std::min(
        best_ms, bench_per_segment_ms(trace, CqmWeights::defaults(), wqm, 100));
  }
  bool ok = check(best_ms > 0.0, "per-segment time must be positive", message);
  ok &= check(best_ms <= 1.0,
              "per-segment time " + std::to_string(best_ms) + " ms above 1 ms",
              message);

  // O(1) amortized: per-segment mean over 10000 segments at most twice the
  // mean over 1000, using the median of repeated runs
  auto median_ms = [&](std::size_t n) {
    std::vector<double> qs = cqm::test::random_qualities(rng, n);
    const SessionTrace t = make_trace(qs, kScale, 1.0);
    std::vector<double> runs;
    for (int rep = 0; rep < 5; ++rep) {
      runs.push_back(bench_per_segment_ms(t, CqmWeights::defaults(), wqm, 100));
    }
    std::sort(runs.begin(), runs.end());
    return runs[runs.size() / 2];
  };
  (void)median_ms(1000);  // warm-up
  const double short_ms = median_ms(1000);
  const double long_ms = median_ms(10000);
  ok &= check(long_ms <= 2.0 * short_ms,
              "scaling ratio " + std::to_string(long_ms / short_ms) + " above 2",
              message);
  return ok;
}

bool c8_split_protocol(std::string& message) {
  GeneratorSpec spec;
  spec.seed = 0xACCE08;
  spec.n_sessions = 12;
  const LabeledDataset dataset = generate_labeled_dataset(
      spec, CqmWeights::defaults(), mean_model(), 0.1);
  bool ok = check(dataset.items.size() == 72, "expected a 72-item dataset", message);

  const SplitPlan plan{424242, 50, 0.5};
  const auto splits = make_splits(dataset, plan);
  ok &= check(splits.size() == 50, "expected 50 splits", message);
  for (const SplitPair& split : splits) {
    ok &= check(split.train.size() == 36 && split.test.size() == 36,
                "split sizes are not (36, 36)", message);
    std::set<std::size_t> seen(split.train.begin(), split.train.end());
    seen.insert(split.test.begin(), split.test.end());
    ok &= check(seen.size() == 72 && *seen.rbegin() == 71,
                "split is not a disjoint exhaustive partition", message);
  }

  const auto again = make_splits(dataset, plan);
  for (std::size_t i = 0; i < splits.size(); ++i) {
    ok &= check(splits[i].train == again[i].train && splits[i].test == again[i].test,
                "splits not reproducible from the seed", message);
  }
  return ok;
}

bool c9_alignment(std::string& message) {
  GeneratorSpec spec;
  spec.seed = 0xACCE09;
  spec.n_sessions = 6;
  const LabeledDataset dataset = generate_labeled_dataset(
      spec, CqmWeights::defaults(), mean_model(), 0.2);
  const auto splits = make_splits(dataset, SplitPlan{7, 50, 0.5});

  const MetricReport report = evaluate_model(
      dataset, [](const LabeledSequence& item) { return item.mos + 0.5; }, splits,
      true);
  bool ok = check(report.rmse <= 1e-9,
                  "post-alignment RMSE " + std::to_string(report.rmse), message);

  std::vector<double> predicted, mos;
  for (const LabeledSequence& item : dataset.items) {
    predicted.push_back(item.mos + 0.5);
    mos.push_back(item.mos);
  }
  const AlignmentCoeffs coeffs = fit_alignment(predicted, mos);
  ok &= check(std::abs(coeffs.slope - 1.0) <= 1e-9, "slope not 1.0", message);
  ok &= check(std::abs(coeffs.intercept + 0.5) <= 1e-9, "intercept not -0.5", message);
  return ok;
}

bool c10_ingestion(std::string& message) {
  const fs::path dir = fs::temp_directory_path() / "cqm_acceptance_corpus";
  fs::remove_all(dir);
  std::ostringstream out, err;
  int status = cli::run({"gen", "--out-dir", dir.string(), "--seed", "4242",
                         "--sessions", "12", "--length", "360", "--noise-sigma", "0.2"},
                        out, err);
  bool ok = check(status == 0, "gen failed: " + err.str(), message);

  const fs::path eval_dir = dir / "eval";
  status = cli::run({"eval", "--input", (dir / "manifest.json").string(), "--out-dir",
                     eval_dir.string(), "--seed", "1", "--align", "--by-length"},
                    out, err);
  ok &= check(status == 0, "eval failed: " + err.str(), message);

  std::ifstream summary(eval_dir / "summary.csv");
  ok &= check(summary.good(), "summary.csv missing", message);
  std::string header;
  std::getline(summary, header);
  ok &= check(header == "model,slope,intercept,pcc,rmse,ms_per_value",
              "unexpected summary header: " + header, message);
  int rows = 0;
  for (std::string line; std::getline(summary, line);) {
    if (!line.empty()) ++rows;
  }
  ok &= check(rows == 5, "expected 5 model rows, got " + std::to_string(rows), message);
  ok &= check(fs::exists(eval_dir / "by_length.csv"), "by_length.csv missing", message);
  return ok;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"C1 constant-session identity (3.5 +- 1e-6)", 1.0, c1_constant_session},
      {"C2 incremental equals batch oracle (1000 traces, K=10..60, 1e-9)", 30.0,
       c2_incremental_vs_batch},
      {"C3 per-prefix curve oracle (50 traces, 1e-9)", 30.0, c3_curve_oracle},
      {"C4 plant-and-recover calibration (1e-6 noiseless; 0.05 @ sigma 0.1)", 60.0,
       c4_plant_and_recover},
      {"C5 pcc/rmse brute-force and affine invariance (1e-12)", 30.0,
       c5_metric_oracles},
      {"C6 ANOVA F/eta/p oracles (1e-10 / 1e-6)", 30.0, c6_anova},
      {"C7 per-segment cost <= 1 ms and O(1) scaling", 60.0, c7_complexity},
      {"C8 split protocol: 50 reproducible (36, 36) partitions", 30.0,
       c8_split_protocol},
      {"C9 alignment recovers (1.0, -0.5) and zeroes RMSE", 30.0, c9_alignment},
      {"C10 manifest ingestion through eval", 60.0, c10_ingestion},
  };

  int failures = 0;
  for (Criterion& criterion : criteria) {
    std::string message;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = criterion.run(message);
    } catch (const std::exception& e) {
      message = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (elapsed > criterion.time_limit_s) {
      ok = false;
      if (message.empty()) {
        message = "exceeded time limit of " + std::to_string(criterion.time_limit_s) +
                  " s";
      }
    }
    if (ok) {
      std::printf("[PASS] %s (%.2f s)\n", criterion.name.c_str(), elapsed);
    } else {
      ++failures;
      std::printf("[FAIL] %s (%.2f s): %s\n", criterion.name.c_str(), elapsed,
                  message.c_str());
    }
  }
  if (failures == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures;
}
