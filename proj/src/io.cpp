#include "cqm/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

namespace cqm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value, int precision) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                              std::chars_format::general, precision);
  return std::string(buffer, result.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc{} || result.ptr != last) {
    fail(ErrorCode::ParseError, "bad number '" + text + "' in " + context);
  }
  return value;
}

namespace {

long parse_long(const std::string& text, const std::string& context) {
  long value = 0;
  auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
    fail(ErrorCode::ParseError, "bad integer '" + text + "' in " + context);
  }
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::ifstream open_for_read(const fs::path& path) {
  if (!fs::exists(path)) {
    fail(ErrorCode::IoNotFound, "file not found: " + path.string());
  }
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::IoRead, "cannot open " + path.string());
  }
  return in;
}

std::ofstream open_for_write(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    fail(ErrorCode::IoWrite, "cannot write " + path.string());
  }
  return out;
}

json parse_json_file(const fs::path& path) {
  std::ifstream in = open_for_read(path);
  json parsed = json::parse(in, nullptr, false);
  if (parsed.is_discarded()) {
    fail(ErrorCode::ParseError, "invalid JSON in " + path.string());
  }
  return parsed;
}

double json_number(const json& node, const std::string& key, const fs::path& path) {
  if (!node.contains(key) || !node[key].is_number()) {
    fail(ErrorCode::ParseError,
         "missing numeric field '" + key + "' in " + path.string());
  }
  return node[key].get<double>();
}

}  // namespace

SessionTrace read_trace_csv(const fs::path& path, const QualityScale& scale) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorCode::ParseError, "empty trace file " + path.string());
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "index" || header[1] != "duration_s" ||
      header[2] != "quality") {
    fail(ErrorCode::ParseError,
         "trace header must start with index,duration_s,quality in " + path.string());
  }

  std::vector<SegmentRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() < 3) {
      fail(ErrorCode::ParseError, "expected at least 3 fields at " + where);
    }
    SegmentRecord rec;
    rec.index = parse_long(fields[0], where);
    rec.duration_s = parse_double(fields[1], where);
    rec.quality = parse_double(fields[2], where);
    if (fields.size() > 3 && !fields[3].empty()) {
      rec.bitrate_kbps = parse_double(fields[3], where);
    }
    if (fields.size() > 4 && !fields[4].empty()) {
      rec.version = static_cast<int>(parse_long(fields[4], where));
    }
    records.push_back(rec);
  }
  return validate_trace(std::move(records), scale);
}

void write_trace_csv(const fs::path& path, const SessionTrace& trace) {
  std::ofstream out = open_for_write(path);
  bool any_optional = false;
  for (const SegmentRecord& rec : trace.segments()) {
    if (rec.bitrate_kbps || rec.version) {
      any_optional = true;
      break;
    }
  }
  out << (any_optional ? "index,duration_s,quality,bitrate_kbps,version\n"
                       : "index,duration_s,quality\n");
  for (const SegmentRecord& rec : trace.segments()) {
    out << rec.index << ',' << format_double(rec.duration_s) << ','
        << format_double(rec.quality);
    if (any_optional) {
      out << ',';
      if (rec.bitrate_kbps) out << format_double(*rec.bitrate_kbps);
      out << ',';
      if (rec.version) out << *rec.version;
    }
    out << '\n';
  }
  if (!out) {
    fail(ErrorCode::IoWrite, "failed writing " + path.string());
  }
}

LabeledDataset read_manifest(const fs::path& path) {
  const json root = parse_json_file(path);
  if (!root.contains("scale") || !root.contains("items") || !root["items"].is_array()) {
    fail(ErrorCode::ParseError,
         "manifest needs 'scale' and 'items' fields: " + path.string());
  }
  LabeledDataset dataset;
  dataset.scale.lo = json_number(root["scale"], "lo", path);
  dataset.scale.hi = json_number(root["scale"], "hi", path);
  check_scale(dataset.scale);

  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::map<std::string, std::shared_ptr<const SessionTrace>> cache;
  for (const json& item : root["items"]) {
    if (!item.contains("trace") || !item["trace"].is_string()) {
      fail(ErrorCode::ParseError, "manifest item missing 'trace' path in " + path.string());
    }
    const std::string trace_ref = item["trace"].get<std::string>();
    auto it = cache.find(trace_ref);
    if (it == cache.end()) {
      fs::path trace_path(trace_ref);
      if (trace_path.is_relative()) trace_path = base / trace_path;
      auto trace = std::make_shared<const SessionTrace>(
          read_trace_csv(trace_path, dataset.scale));
      it = cache.emplace(trace_ref, std::move(trace)).first;
    }
    LabeledSequence seq;
    seq.trace = it->second;
    seq.length_s = json_number(item, "length_s", path);
    seq.mos = json_number(item, "mos", path);
    dataset.items.push_back(std::move(seq));
  }
  return validate_dataset(std::move(dataset));
}

void write_manifest(const fs::path& path, const QualityScale& scale,
                    const std::vector<ManifestItem>& items) {
  json root;
  root["scale"] = {{"lo", scale.lo}, {"hi", scale.hi}};
  root["items"] = json::array();
  for (const ManifestItem& item : items) {
    root["items"].push_back({{"trace", item.trace_path},
                             {"length_s", item.length_s},
                             {"mos", item.mos}});
  }
  std::ofstream out = open_for_write(path);
  out << root.dump(2) << '\n';
  if (!out) {
    fail(ErrorCode::IoWrite, "failed writing " + path.string());
  }
}

CqmWeights read_weights_json(const fs::path& path) {
  const json root = parse_json_file(path);
  CqmWeights weights;
  weights.w_last50 = json_number(root, "w1", path);
  weights.w_avg60 = json_number(root, "w2", path);
  weights.w_min50 = json_number(root, "w3", path);
  weights.w_max50 = json_number(root, "w4", path);
  return weights;
}

void write_weights_json(const fs::path& path, const CqmWeights& weights) {
  std::ofstream out = open_for_write(path);
  // Hand-rolled so the 9-significant-digit float convention applies.
  out << "{\n"
      << "  \"w1\": " << format_double(weights.w_last50) << ",\n"
      << "  \"w2\": " << format_double(weights.w_avg60) << ",\n"
      << "  \"w3\": " << format_double(weights.w_min50) << ",\n"
      << "  \"w4\": " << format_double(weights.w_max50) << "\n"
      << "}\n";
  if (!out) {
    fail(ErrorCode::IoWrite, "failed writing " + path.string());
  }
}

void write_curve_csv(const fs::path& path, const CumulativeCurve& curve) {
  std::ofstream out = open_for_write(path);
  out << "t_s,cqm\n";
  for (const CurvePoint& point : curve.points) {
    out << format_double(point.t_s) << ',' << format_double(point.cqm) << '\n';
  }
  if (!out) {
    fail(ErrorCode::IoWrite, "failed writing " + path.string());
  }
}

void write_csv(const fs::path& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out = open_for_write(path);
  out << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) {
    fail(ErrorCode::IoWrite, "failed writing " + path.string());
  }
}

}  // namespace cqm
