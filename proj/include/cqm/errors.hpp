#pragma once

#include <stdexcept>
#include <string>

namespace cqm {

// Stable error codes. The CLI prints them verbatim as E_<NAME> so scripts
// can match on the first token of stderr.
enum class ErrorCode {
  // trace-model
  EmptyTrace,
  NonContiguousIndices,
  QualityOutOfRange,
  HeterogeneousDurations,
  InvalidScale,
  LengthNotAligned,
  LengthExceedsTrace,
  ScaleMismatch,
  MosOutOfRange,
  EmptyDataset,
  // window-engine
  UnknownWindowSize,
  TraceTooShort,
  WindowNotAligned,
  // window-quality
  EmptyWindow,
  WeightDimensionMismatch,
  InvalidModelConfig,
  // calibration
  InsufficientSamples,
  DatasetTooSmall,
  DegenerateInput,
  // evaluation
  LengthMismatch,
  TooFewGroups,
  TooFewSamples,
  InvalidWarmup,
  // synth-gen
  InvalidSpec,
  // io-cli
  IoNotFound,
  IoRead,
  IoWrite,
  ParseError,
  ConfigError,
  Internal,
};

const char* error_code_name(ErrorCode code) noexcept;

class CqmError : public std::runtime_error {
 public:
  CqmError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw CqmError(code, message);
}

}  // namespace cqm
