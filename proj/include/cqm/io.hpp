#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cqm/calibration.hpp"
#include "cqm/predictor.hpp"
#include "cqm/trace.hpp"

namespace cqm {

// All files are UTF-8 with LF line endings and dot decimal separators.
// Floating-point values are written with 9 significant digits via
// std::to_chars, so output is locale-independent and byte-stable across
// runs with the same inputs.

// Locale-independent float formatting (9 significant digits by default).
std::string format_double(double value, int precision = 9);

// Locale-independent parse; throws ParseError on trailing garbage.
double parse_double(const std::string& text, const std::string& context);

// Trace CSV: header `index,duration_s,quality[,bitrate_kbps,version]`.
// The two optional columns may be absent entirely or left empty per row.
SessionTrace read_trace_csv(const std::filesystem::path& path,
                            const QualityScale& scale);
void write_trace_csv(const std::filesystem::path& path, const SessionTrace& trace);

// Dataset manifest JSON:
//   {"scale":{"lo":1.0,"hi":5.0},
//    "items":[{"trace":"<path>","length_s":60,"mos":3.7}, ...]}
// Trace paths are resolved relative to the manifest's directory and loaded
// once even when several items share one session.
LabeledDataset read_manifest(const std::filesystem::path& path);

struct ManifestItem {
  std::string trace_path;  // as written, typically relative
  double length_s = 0.0;
  double mos = 0.0;
};

void write_manifest(const std::filesystem::path& path, const QualityScale& scale,
                    const std::vector<ManifestItem>& items);

// Weights JSON: {"w1":0.280,"w2":0.426,"w3":0.280,"w4":0.014}.
CqmWeights read_weights_json(const std::filesystem::path& path);
void write_weights_json(const std::filesystem::path& path, const CqmWeights& weights);

// Curve CSV: header `t_s,cqm`, one row per segment boundary.
void write_curve_csv(const std::filesystem::path& path, const CumulativeCurve& curve);

// Generic CSV writer: header plus preformatted rows.
void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace cqm
