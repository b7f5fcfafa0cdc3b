#include "cqm/errors.hpp"

namespace cqm {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyTrace: return "E_EMPTY_TRACE";
    case ErrorCode::NonContiguousIndices: return "E_NONCONTIGUOUS_INDICES";
    case ErrorCode::QualityOutOfRange: return "E_QUALITY_OUT_OF_RANGE";
    case ErrorCode::HeterogeneousDurations: return "E_HETEROGENEOUS_DURATIONS";
    case ErrorCode::InvalidScale: return "E_INVALID_SCALE";
    case ErrorCode::LengthNotAligned: return "E_LENGTH_NOT_ALIGNED";
    case ErrorCode::LengthExceedsTrace: return "E_LENGTH_EXCEEDS_TRACE";
    case ErrorCode::ScaleMismatch: return "E_SCALE_MISMATCH";
    case ErrorCode::MosOutOfRange: return "E_MOS_OUT_OF_RANGE";
    case ErrorCode::EmptyDataset: return "E_EMPTY_DATASET";
    case ErrorCode::UnknownWindowSize: return "E_UNKNOWN_WINDOW_SIZE";
    case ErrorCode::TraceTooShort: return "E_TRACE_TOO_SHORT";
    case ErrorCode::WindowNotAligned: return "E_WINDOW_NOT_ALIGNED";
    case ErrorCode::EmptyWindow: return "E_EMPTY_WINDOW";
    case ErrorCode::WeightDimensionMismatch: return "E_WEIGHT_DIMENSION_MISMATCH";
    case ErrorCode::InvalidModelConfig: return "E_INVALID_MODEL_CONFIG";
    case ErrorCode::InsufficientSamples: return "E_INSUFFICIENT_SAMPLES";
    case ErrorCode::DatasetTooSmall: return "E_DATASET_TOO_SMALL";
    case ErrorCode::DegenerateInput: return "E_DEGENERATE_INPUT";
    case ErrorCode::LengthMismatch: return "E_LENGTH_MISMATCH";
    case ErrorCode::TooFewGroups: return "E_TOO_FEW_GROUPS";
    case ErrorCode::TooFewSamples: return "E_TOO_FEW_SAMPLES";
    case ErrorCode::InvalidWarmup: return "E_INVALID_WARMUP";
    case ErrorCode::InvalidSpec: return "E_INVALID_SPEC";
    case ErrorCode::IoNotFound: return "E_IO_NOT_FOUND";
    case ErrorCode::IoRead: return "E_IO_READ";
    case ErrorCode::IoWrite: return "E_IO_WRITE";
    case ErrorCode::ParseError: return "E_PARSE";
    case ErrorCode::ConfigError: return "E_CONFIG";
    case ErrorCode::Internal: return "E_INTERNAL";
  }
  return "E_INTERNAL";
}

}  // namespace cqm
