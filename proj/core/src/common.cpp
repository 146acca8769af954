#include "archsage/common.hpp"

namespace archsage {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::LengthMismatch: return "LENGTH_MISMATCH";
    case ErrorCode::InvalidSpec: return "INVALID_SPEC";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::SamplingExhausted: return "SAMPLING_EXHAUSTED";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::SchemaError: return "SCHEMA_ERROR";
    case ErrorCode::EmptyLabeledBatch: return "EMPTY_LABELED_BATCH";
    case ErrorCode::EmptyLabeledSet: return "EMPTY_LABELED_SET";
    case ErrorCode::DegenerateInput: return "DEGENERATE_INPUT";
    case ErrorCode::NonDeterministicLoss: return "NON_DETERMINISTIC_LOSS";
    case ErrorCode::NonFinite: return "NON_FINITE";
  }
  return "UNKNOWN";
}

}  // namespace archsage
