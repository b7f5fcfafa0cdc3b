#include "cqm/cli.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "cqm/calibration.hpp"
#include "cqm/evaluation.hpp"
#include "cqm/io.hpp"
#include "cqm/predictor.hpp"
#include "cqm/synth.hpp"
#include "cqm/trace.hpp"
#include "cqm/window_quality.hpp"
#include "cqm/window_stats.hpp"

namespace cqm::cli {

namespace {

namespace fs = std::filesystem;

int log_level() {
  const char* env = std::getenv("CQM_LOG");
  if (!env) return 0;
  std::string value(env);
  if (value == "debug") return 2;
  if (value == "info") return 1;
  return 0;
}

void log_info(std::ostream& err, const std::string& message) {
  if (log_level() >= 1) err << "[cqm] " << message << "\n";
}

struct Options {
  std::vector<std::string> inputs;
  std::string out_dir = ".";
  std::string weights_path;
  std::string wqm_name = "mean";
  std::vector<std::string> wqm_params;
  std::uint64_t seed = 0;
  int repeats = 50;
  double train_fraction = 0.5;
  bool align = false;
  bool nonneg = false;
  bool by_length = false;
  bool minutes_only = false;
  bool anova = false;
  bool bench = false;
  double scale_lo = 1.0;
  double scale_hi = 5.0;
  int warmup = 100;
  std::string baselines = "mean,mean_std,switch_penalty,histogram";
  // gen
  int sessions = 6;
  std::string length = "360";
  int levels = 9;
  double stickiness = 0.7;
  double noise_sigma = 0.0;
};

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::stringstream stream(text);
  while (std::getline(stream, part, sep)) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

// --wqm-param entries are key=value; list values use ':' separators,
// e.g. value_weights=1:2:3:4.
WqmConfig wqm_config_from(const Options& opts) {
  WqmConfig config;
  config.name = opts.wqm_name;
  for (const std::string& entry : opts.wqm_params) {
    auto eq = entry.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::ConfigError, "--wqm-param expects key=value, got '" + entry + "'");
    }
    const std::string key = entry.substr(0, eq);
    const std::string value = entry.substr(eq + 1);
    if (key == "alpha") {
      config.alpha = parse_double(value, "--wqm-param alpha");
    } else if (key == "lambda") {
      config.lambda = parse_double(value, "--wqm-param lambda");
    } else if (key == "bins") {
      config.histogram.bins =
          static_cast<int>(parse_double(value, "--wqm-param bins"));
    } else if (key == "value_weights" || key == "drop_weights") {
      std::vector<double> weights;
      for (const std::string& item : split_list(value, ':')) {
        weights.push_back(parse_double(item, "--wqm-param " + key));
      }
      (key == "value_weights" ? config.histogram.value_weights
                              : config.histogram.drop_weights) = std::move(weights);
    } else {
      fail(ErrorCode::ConfigError, "unknown --wqm-param key '" + key + "'");
    }
  }
  return config;
}

QualityScale scale_from(const Options& opts) {
  QualityScale scale{opts.scale_lo, opts.scale_hi};
  check_scale(scale);
  return scale;
}

CqmWeights weights_from(const Options& opts) {
  if (opts.weights_path.empty()) return CqmWeights::defaults();
  return read_weights_json(opts.weights_path);
}

SplitPlan plan_from(const Options& opts) {
  return SplitPlan{opts.seed, opts.repeats, opts.train_fraction};
}

std::string stem_of(const std::string& path_text) {
  return fs::path(path_text).stem().string();
}

CumulativeCurve subsample_minutes(const CumulativeCurve& curve) {
  CumulativeCurve out;
  for (const CurvePoint& point : curve.points) {
    double minutes = point.t_s / 60.0;
    if (std::abs(minutes - std::round(minutes)) < 1e-9) out.points.push_back(point);
  }
  return out;
}

// Cumulative-value cost of a plain overall-quality model: it rescoring the
// whole prefix at every boundary, timed per boundary.
double baseline_ms_per_value(const SessionTrace& trace,
                             const WindowQualityModel& model) {
  const std::span<const double> q = trace.qualities();
  volatile double sink = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t n = 1; n <= q.size(); ++n) {
    sink = model.score(q.subspan(0, n));
  }
  const auto stop = std::chrono::steady_clock::now();
  (void)sink;
  return std::chrono::duration<double, std::milli>(stop - start).count() /
         static_cast<double>(q.size());
}

// Distinct traces of a dataset in first-appearance order, with the manifest
// path strings they came from (used for naming outputs).
struct DistinctTrace {
  std::shared_ptr<const SessionTrace> trace;
  std::string label;
};

std::vector<DistinctTrace> distinct_traces(const LabeledDataset& dataset) {
  std::vector<DistinctTrace> out;
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    const auto& trace = dataset.items[i].trace;
    bool seen = false;
    for (const DistinctTrace& d : out) {
      if (d.trace == trace) {
        seen = true;
        break;
      }
    }
    if (!seen) {
      out.push_back(DistinctTrace{trace, "trace_" + std::to_string(out.size())});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_predict(const Options& opts, std::ostream& out, std::ostream& err) {
  const QualityScale scale = scale_from(opts);
  const CqmWeights weights = weights_from(opts);
  const auto wqm = make_window_quality_model(wqm_config_from(opts), scale);
  if (opts.inputs.empty()) {
    fail(ErrorCode::ConfigError, "predict needs at least one --input trace");
  }
  std::vector<std::string> inputs = opts.inputs;
  std::sort(inputs.begin(), inputs.end());
  for (const std::string& input : inputs) {
    const SessionTrace trace = read_trace_csv(input, scale);
    CumulativeCurve curve = predict_curve(trace, weights, wqm);
    if (opts.minutes_only) curve = subsample_minutes(curve);
    const fs::path out_path =
        fs::path(opts.out_dir) / ("curve_" + stem_of(input) + ".csv");
    write_curve_csv(out_path, curve);
    log_info(err, "wrote " + out_path.string());
    out << input << " final_cqm=" << format_double(curve.points.back().cqm) << "\n";
  }
  return 0;
}

int cmd_features(const Options& opts, std::ostream& out, std::ostream&) {
  if (opts.inputs.size() != 1) {
    fail(ErrorCode::ConfigError, "features needs exactly one --input manifest");
  }
  const LabeledDataset dataset = read_manifest(opts.inputs.front());
  const auto wqm = make_window_quality_model(wqm_config_from(opts), dataset.scale);
  const std::vector<FeatureSample> samples = extract_features(dataset, wqm);
  const std::vector<DistinctTrace> traces = distinct_traces(dataset);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::string label;
    for (const DistinctTrace& d : traces) {
      if (d.trace == dataset.items[i].trace) {
        label = d.label;
        break;
      }
    }
    rows.push_back({std::to_string(i), label,
                    format_double(dataset.items[i].length_s),
                    format_double(samples[i].features.wq_last_50),
                    format_double(samples[i].features.wq_avg_60),
                    format_double(samples[i].features.wq_min_50),
                    format_double(samples[i].features.wq_max_50),
                    format_double(samples[i].mos)});
  }
  const fs::path out_path = fs::path(opts.out_dir) / "features.csv";
  write_csv(out_path, "item,trace,length_s,wq_last_50,wq_avg_60,wq_min_50,wq_max_50,mos",
            rows);
  out << "wrote " << out_path.string() << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_train(const Options& opts, std::ostream& out, std::ostream& err) {
  if (opts.inputs.size() != 1) {
    fail(ErrorCode::ConfigError, "train needs exactly one --input manifest");
  }
  const LabeledDataset dataset = read_manifest(opts.inputs.front());
  const auto wqm = make_window_quality_model(wqm_config_from(opts), dataset.scale);
  const std::vector<FeatureSample> samples = extract_features(dataset, wqm);
  const std::vector<SplitPair> splits = make_splits(dataset, plan_from(opts));
  log_info(err, "fitting " + std::to_string(splits.size()) + " splits");

  auto rmse_of = [&](const CqmWeights& w, const std::vector<std::size_t>& idx) {
    std::vector<double> pred, mos;
    pred.reserve(idx.size());
    mos.reserve(idx.size());
    for (std::size_t i : idx) {
      pred.push_back(cqm_value(samples[i].features, w, dataset.scale));
      mos.push_back(samples[i].mos);
    }
    return rmse(pred, mos);
  };
  auto pcc_of = [&](const CqmWeights& w, const std::vector<std::size_t>& idx) {
    std::vector<double> pred, mos;
    for (std::size_t i : idx) {
      pred.push_back(cqm_value(samples[i].features, w, dataset.scale));
      mos.push_back(samples[i].mos);
    }
    try {
      return pcc(pred, mos);
    } catch (const CqmError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  std::vector<std::vector<std::string>> rows;
  CqmWeights best_weights;
  double best_test_rmse = std::numeric_limits<double>::infinity();
  std::size_t best_split = 0;
  bool any_rank_deficient = false;
  for (std::size_t s = 0; s < splits.size(); ++s) {
    std::vector<FeatureSample> train_samples;
    train_samples.reserve(splits[s].train.size());
    for (std::size_t i : splits[s].train) train_samples.push_back(samples[i]);
    const FitResult fit = fit_weights(train_samples, opts.nonneg);
    any_rank_deficient = any_rank_deficient || fit.rank_deficient;

    const double train_rmse = rmse_of(fit.weights, splits[s].train);
    const double test_rmse = rmse_of(fit.weights, splits[s].test);
    const double test_pcc = pcc_of(fit.weights, splits[s].test);
    rows.push_back({std::to_string(s), format_double(train_rmse),
                    format_double(test_rmse), format_double(test_pcc),
                    format_double(fit.weights.w_last50),
                    format_double(fit.weights.w_avg60),
                    format_double(fit.weights.w_min50),
                    format_double(fit.weights.w_max50)});
    if (test_rmse < best_test_rmse) {
      best_test_rmse = test_rmse;
      best_weights = fit.weights;
      best_split = s;
    }
  }

  const fs::path weights_path = fs::path(opts.out_dir) / "weights.json";
  const fs::path diag_path = fs::path(opts.out_dir) / "train_splits.csv";
  write_weights_json(weights_path, best_weights);
  write_csv(diag_path, "split,train_rmse,test_rmse,test_pcc,w1,w2,w3,w4", rows);
  if (any_rank_deficient) {
    err << "warning: rank-deficient design matrix on at least one split; "
           "ridge-regularized solution used\n";
  }
  out << "best_split=" << best_split << " test_rmse=" << format_double(best_test_rmse)
      << "\n";
  out << "w1=" << format_double(best_weights.w_last50)
      << " w2=" << format_double(best_weights.w_avg60)
      << " w3=" << format_double(best_weights.w_min50)
      << " w4=" << format_double(best_weights.w_max50) << "\n";
  out << "wrote " << weights_path.string() << " and " << diag_path.string() << "\n";
  return 0;
}

int cmd_eval(const Options& opts, std::ostream& out, std::ostream& err) {
  if (opts.inputs.size() != 1) {
    fail(ErrorCode::ConfigError, "eval needs exactly one --input manifest");
  }
  const LabeledDataset dataset = read_manifest(opts.inputs.front());
  const CqmWeights weights = weights_from(opts);
  const auto wqm = make_window_quality_model(wqm_config_from(opts), dataset.scale);
  const std::vector<SplitPair> splits = make_splits(dataset, plan_from(opts));

  // Longest rated prefix, reused by the optional complexity column.
  std::size_t longest_item = 0;
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    if (dataset.items[i].length_s > dataset.items[longest_item].length_s) {
      longest_item = i;
    }
  }
  const SessionTrace longest_trace =
      dataset.items[longest_item].trace->prefix(dataset.items[longest_item].length_s);

  struct Row {
    std::string model;
    std::string slope;
    std::string intercept;
    MetricReport report;
    std::string ms;
  };
  std::vector<Row> rows;

  // The CQM row: evaluated raw (no alignment), matching how a fitted model
  // is reported.
  {
    Row row;
    row.model = "cqm+" + std::string(wqm->name());
    SequencePredictor predictor = [&](const LabeledSequence& item) {
      return cqm_value(features_at_end(item.trace->prefix(item.length_s), wqm),
                       weights, dataset.scale);
    };
    row.report = evaluate_model(dataset, predictor, splits, false);
    row.slope = "-";
    row.intercept = "-";
    if (opts.bench && longest_trace.size() >= 100) {
      const int warmup = static_cast<int>(
          std::min<std::size_t>(100, longest_trace.size() / 10));
      row.ms = format_double(
          bench_per_segment_ms(longest_trace, weights, wqm, warmup));
    }
    rows.push_back(std::move(row));
  }

  // Baseline rows: plain overall-quality models scoring the whole rated
  // prefix, optionally put through the first-order alignment.
  for (const std::string& name : split_list(opts.baselines, ',')) {
    if (name == "none") continue;
    WqmConfig config = wqm_config_from(opts);
    config.name = name;
    const auto baseline = make_window_quality_model(config, dataset.scale);
    SequencePredictor predictor = [&, baseline](const LabeledSequence& item) {
      return baseline->score(item.trace->prefix(item.length_s).qualities());
    };
    Row row;
    row.model = name;
    row.report = evaluate_model(dataset, predictor, splits, opts.align);
    if (opts.align) {
      // Mean alignment coefficients over the per-split training fits.
      double sum_slope = 0.0, sum_intercept = 0.0;
      std::vector<double> pred, mos;
      for (const SplitPair& split : splits) {
        pred.clear();
        mos.clear();
        for (std::size_t i : split.train) {
          pred.push_back(predictor(dataset.items[i]));
          mos.push_back(dataset.items[i].mos);
        }
        const AlignmentCoeffs coeffs = fit_alignment(pred, mos);
        sum_slope += coeffs.slope;
        sum_intercept += coeffs.intercept;
      }
      row.slope = format_double(sum_slope / static_cast<double>(splits.size()), 4);
      row.intercept =
          format_double(sum_intercept / static_cast<double>(splits.size()), 4);
    } else {
      row.slope = "-";
      row.intercept = "-";
    }
    if (opts.bench) {
      row.ms = format_double(baseline_ms_per_value(longest_trace, *baseline));
    }
    rows.push_back(std::move(row));
  }

  // Text table.
  out << std::left << std::setw(22) << "model" << std::setw(10) << "slope"
      << std::setw(11) << "intercept" << std::setw(9) << "pcc" << std::setw(9)
      << "rmse" << "ms_per_value\n";
  for (const Row& row : rows) {
    std::ostringstream pcc_text, rmse_text;
    pcc_text << std::fixed << std::setprecision(3) << row.report.pcc;
    rmse_text << std::fixed << std::setprecision(3) << row.report.rmse;
    out << std::left << std::setw(22) << row.model << std::setw(10) << row.slope
        << std::setw(11) << row.intercept << std::setw(9) << pcc_text.str()
        << std::setw(9) << rmse_text.str() << (row.ms.empty() ? "-" : row.ms)
        << "\n";
  }

  std::vector<std::vector<std::string>> csv_rows;
  for (const Row& row : rows) {
    csv_rows.push_back({row.model, row.slope == "-" ? "" : row.slope,
                        row.intercept == "-" ? "" : row.intercept,
                        format_double(row.report.pcc), format_double(row.report.rmse),
                        row.ms});
  }
  const fs::path summary_path = fs::path(opts.out_dir) / "summary.csv";
  write_csv(summary_path, "model,slope,intercept,pcc,rmse,ms_per_value", csv_rows);
  log_info(err, "wrote " + summary_path.string());

  if (opts.by_length) {
    std::vector<std::vector<std::string>> length_rows;
    for (const Row& row : rows) {
      for (const auto& [length_s, bucket] : row.report.by_length) {
        length_rows.push_back({row.model, format_double(length_s),
                               format_double(bucket.pcc), format_double(bucket.rmse),
                               std::to_string(bucket.n)});
      }
    }
    write_csv(fs::path(opts.out_dir) / "by_length.csv",
              "model,length_s,pcc,rmse,n", length_rows);
  }

  if (opts.anova) {
    // Effect tables: quartile-bin each window statistic against MOS. This
    // grouping is a convention of this toolkit (the choice of factor levels
    // for the analysis is not standardized).
    std::vector<std::vector<std::string>> anova_rows;
    const std::array<const char*, 5> stat_names{"f", "l", "av", "mi", "ma"};
    for (int k_seconds = 10; k_seconds <= 60; k_seconds += 10) {
      std::array<std::vector<double>, 5> stat_values;
      std::vector<double> mos_values;
      for (const LabeledSequence& item : dataset.items) {
        const WindowStats stats = stats_with_bootstrap(
            item.trace->prefix(item.length_s), k_seconds, *wqm);
        stat_values[0].push_back(stats.first);
        stat_values[1].push_back(stats.last);
        stat_values[2].push_back(stats.average);
        stat_values[3].push_back(stats.minimum);
        stat_values[4].push_back(stats.maximum);
        mos_values.push_back(item.mos);
      }
      for (std::size_t s = 0; s < stat_names.size(); ++s) {
        std::vector<std::string> row{stat_names[s], std::to_string(k_seconds)};
        try {
          const AnovaResult result =
              anova_oneway(quantile_groups(stat_values[s], mos_values, 4));
          row.insert(row.end(),
                     {format_double(result.f), std::to_string(result.df_between),
                      std::to_string(result.df_within), format_double(result.p),
                      format_double(result.eta_p2)});
        } catch (const CqmError&) {
          row.insert(row.end(), {"nan", "0", "0", "nan", "nan"});
        }
        anova_rows.push_back(std::move(row));
      }
    }
    write_csv(fs::path(opts.out_dir) / "anova.csv",
              "statistic,window_s,F,df_between,df_within,p,eta_p2", anova_rows);
  }
  return 0;
}

int cmd_bench(const Options& opts, std::ostream& out, std::ostream& err) {
  const QualityScale scale = scale_from(opts);
  const CqmWeights weights = weights_from(opts);
  const auto wqm = make_window_quality_model(wqm_config_from(opts), scale);
  if (opts.inputs.size() != 1) {
    fail(ErrorCode::ConfigError, "bench needs exactly one --input trace");
  }
  const SessionTrace trace = read_trace_csv(opts.inputs.front(), scale);
  const double ms = bench_per_segment_ms(trace, weights, wqm, opts.warmup);
  char rounded[32];
  std::snprintf(rounded, sizeof(rounded), "%.3f", ms);
  out << "ms_per_segment=" << rounded << "\n";
  out << "ms_per_segment_exact=" << format_double(ms) << "\n";
  log_info(err, "benchmarked " + std::to_string(trace.size()) + " segments");
  return 0;
}

int cmd_gen(const Options& opts, std::ostream& out, std::ostream& err) {
  GeneratorSpec spec;
  spec.seed = opts.seed;
  spec.n_sessions = opts.sessions;
  spec.levels = opts.levels;
  spec.stickiness = opts.stickiness;
  spec.scale = scale_from(opts);
  const std::vector<std::string> length_parts = split_list(opts.length, ':');
  if (length_parts.size() == 1) {
    spec.length_s_min = spec.length_s_max =
        static_cast<int>(parse_double(length_parts[0], "--length"));
  } else if (length_parts.size() == 2) {
    spec.length_s_min = static_cast<int>(parse_double(length_parts[0], "--length"));
    spec.length_s_max = static_cast<int>(parse_double(length_parts[1], "--length"));
  } else {
    fail(ErrorCode::ConfigError, "--length expects N or MIN:MAX");
  }

  const CqmWeights weights = weights_from(opts);
  const auto wqm = make_window_quality_model(wqm_config_from(opts), spec.scale);
  const LabeledDataset dataset =
      generate_labeled_dataset(spec, weights, wqm, opts.noise_sigma);

  // Items arrive grouped by session; write each distinct trace once.
  std::vector<ManifestItem> manifest_items;
  std::shared_ptr<const SessionTrace> current;
  int file_index = -1;
  std::string current_name;
  for (const LabeledSequence& item : dataset.items) {
    if (item.trace != current) {
      current = item.trace;
      ++file_index;
      char name[32];
      std::snprintf(name, sizeof(name), "trace_%03d.csv", file_index);
      current_name = name;
      write_trace_csv(fs::path(opts.out_dir) / current_name, *item.trace);
    }
    manifest_items.push_back(ManifestItem{current_name, item.length_s, item.mos});
  }
  const fs::path manifest_path = fs::path(opts.out_dir) / "manifest.json";
  write_manifest(manifest_path, spec.scale, manifest_items);
  log_info(err, "generated " + std::to_string(file_index + 1) + " traces");
  out << "wrote " << manifest_path.string() << " (" << manifest_items.size()
      << " items, " << (file_index + 1) << " traces)\n";
  return 0;
}

int cmd_report(const Options& opts, std::ostream& out, std::ostream& err) {
  if (opts.inputs.size() != 1) {
    fail(ErrorCode::ConfigError, "report needs exactly one --input (manifest or trace)");
  }
  const CqmWeights weights = weights_from(opts);
  const std::string& input = opts.inputs.front();
  const bool is_manifest = fs::path(input).extension() == ".json";

  auto emit_trace_outputs = [&](const SessionTrace& trace, const std::string& label,
                                const std::shared_ptr<const WindowQualityModel>& wqm) {
    CumulativeCurve curve = predict_curve(trace, weights, wqm);
    if (opts.minutes_only) curve = subsample_minutes(curve);
    write_curve_csv(fs::path(opts.out_dir) / ("curve_" + label + ".csv"), curve);

    std::vector<std::vector<std::string>> stat_rows;
    for (int k_seconds = 10; k_seconds <= 60; k_seconds += 10) {
      const WindowStats stats = stats_with_bootstrap(trace, k_seconds, *wqm);
      stat_rows.push_back(
          {std::to_string(k_seconds), std::to_string(stats.k_segments),
           std::to_string(stats.n_windows), format_double(stats.first),
           format_double(stats.last), format_double(stats.average),
           format_double(stats.minimum), format_double(stats.maximum)});
    }
    write_csv(fs::path(opts.out_dir) / ("stats_" + label + ".csv"),
              "window_s,window_segments,n_windows,wq_f,wq_l,wq_av,wq_mi,wq_ma",
              stat_rows);
  };

  if (!is_manifest) {
    const QualityScale scale = scale_from(opts);
    const auto wqm = make_window_quality_model(wqm_config_from(opts), scale);
    const SessionTrace trace = read_trace_csv(input, scale);
    emit_trace_outputs(trace, stem_of(input), wqm);
    out << "wrote curve and stats for " << input << "\n";
    return 0;
  }

  const LabeledDataset dataset = read_manifest(input);
  const auto wqm = make_window_quality_model(wqm_config_from(opts), dataset.scale);
  for (const DistinctTrace& d : distinct_traces(dataset)) {
    emit_trace_outputs(*d.trace, d.label, wqm);
  }

  // Predicted-vs-MOS points at every rated prefix, plus the per-length
  // metric breakdown of the raw model.
  std::vector<std::vector<std::string>> point_rows;
  std::map<double, std::pair<std::vector<double>, std::vector<double>>> by_length;
  const std::vector<DistinctTrace> traces = distinct_traces(dataset);
  for (const LabeledSequence& item : dataset.items) {
    std::string label;
    for (const DistinctTrace& d : traces) {
      if (d.trace == item.trace) {
        label = d.label;
        break;
      }
    }
    const double predicted = cqm_value(
        features_at_end(item.trace->prefix(item.length_s), wqm), weights,
        dataset.scale);
    point_rows.push_back({label, format_double(item.length_s),
                          format_double(item.mos), format_double(predicted)});
    by_length[item.length_s].first.push_back(predicted);
    by_length[item.length_s].second.push_back(item.mos);
  }
  write_csv(fs::path(opts.out_dir) / "points.csv", "trace,length_s,mos,cqm",
            point_rows);

  std::vector<std::vector<std::string>> length_rows;
  for (const auto& [length_s, vectors] : by_length) {
    const auto& [pred, mos] = vectors;
    std::string pcc_text = "nan";
    if (pred.size() >= 2) {
      try {
        pcc_text = format_double(pcc(pred, mos));
      } catch (const CqmError&) {
      }
    }
    length_rows.push_back({format_double(length_s), pcc_text,
                           format_double(rmse(pred, mos)),
                           std::to_string(pred.size())});
  }
  write_csv(fs::path(opts.out_dir) / "by_length.csv", "length_s,pcc,rmse,n",
            length_rows);
  log_info(err, "report complete");
  out << "wrote report for " << dataset.items.size() << " items\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cumulative quality estimation for HTTP adaptive streaming"};
  app.require_subcommand(1);
  Options opts;

  auto add_common = [&](CLI::App* cmd, bool with_scale) {
    cmd->add_option("--input", opts.inputs, "input file(s)");
    cmd->add_option("--out-dir", opts.out_dir, "output directory");
    cmd->add_option("--weights", opts.weights_path, "weights JSON path");
    cmd->add_option("--wqm", opts.wqm_name,
                    "window quality model: mean|mean_std|switch_penalty|histogram");
    cmd->add_option("--wqm-param", opts.wqm_params,
                    "model parameter key=value (lists use ':' separators)");
    if (with_scale) {
      cmd->add_option("--scale-lo", opts.scale_lo, "quality scale lower bound");
      cmd->add_option("--scale-hi", opts.scale_hi, "quality scale upper bound");
    }
  };
  auto add_plan = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opts.seed, "random seed");
    cmd->add_option("--repeats", opts.repeats, "number of train/test splits");
    cmd->add_option("--train-fraction", opts.train_fraction, "training fraction");
  };

  CLI::App* predict = app.add_subcommand("predict", "cumulative quality curve per trace");
  add_common(predict, true);
  predict->add_flag("--minutes-only", opts.minutes_only, "emit whole minutes only");

  CLI::App* features = app.add_subcommand("features", "model inputs per labeled sequence");
  add_common(features, false);

  CLI::App* train = app.add_subcommand("train", "fit model weights on a labeled dataset");
  add_common(train, false);
  add_plan(train);
  train->add_flag("--nonneg", opts.nonneg, "constrain weights to be nonnegative");

  CLI::App* eval = app.add_subcommand("eval", "evaluate models over the split protocol");
  add_common(eval, false);
  add_plan(eval);
  eval->add_flag("--align", opts.align, "fit first-order alignment for baseline models");
  eval->add_flag("--by-length", opts.by_length, "emit per-length breakdown CSV");
  eval->add_flag("--anova", opts.anova, "emit window-statistic effect tables");
  eval->add_flag("--bench", opts.bench,
                 "measure per-value cost (makes output non-reproducible)");
  eval->add_option("--baselines", opts.baselines,
                   "comma list of baseline models, or 'none'");

  CLI::App* bench = app.add_subcommand("bench", "per-segment update cost");
  add_common(bench, true);
  bench->add_option("--warmup", opts.warmup, "segments excluded from timing");

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic labeled corpus");
  add_common(gen, true);
  gen->add_option("--seed", opts.seed, "random seed");
  gen->add_option("--sessions", opts.sessions, "number of sessions");
  gen->add_option("--length", opts.length, "session length seconds: N or MIN:MAX");
  gen->add_option("--levels", opts.levels, "number of quality levels");
  gen->add_option("--stickiness", opts.stickiness,
                  "probability of staying at the current level");
  gen->add_option("--noise-sigma", opts.noise_sigma, "MOS label noise sigma");

  CLI::App* report = app.add_subcommand("report", "plot-ready curves, stats, and points");
  add_common(report, true);
  report->add_flag("--minutes-only", opts.minutes_only, "emit whole minutes only");

  try {
    // CLI11's vector overload consumes the arguments back to front.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (predict->parsed()) return cmd_predict(opts, out, err);
    if (features->parsed()) return cmd_features(opts, out, err);
    if (train->parsed()) return cmd_train(opts, out, err);
    if (eval->parsed()) return cmd_eval(opts, out, err);
    if (bench->parsed()) return cmd_bench(opts, out, err);
    if (gen->parsed()) return cmd_gen(opts, out, err);
    if (report->parsed()) return cmd_report(opts, out, err);
    fail(ErrorCode::ConfigError, "no subcommand selected");
  } catch (const CqmError& e) {
    err << error_code_name(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "E_INTERNAL: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace cqm::cli
