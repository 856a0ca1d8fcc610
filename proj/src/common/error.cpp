#include "common/error.hpp"

namespace streamcart {

const char* error_code_name(ErrorCode code) {
  switch (code) {
  case ErrorCode::kInvalidArgument: return "invalid_argument";
  case ErrorCode::kValidation: return "validation";
  case ErrorCode::kNotFound: return "not_found";
  case ErrorCode::kIo: return "io";
  case ErrorCode::kParse: return "parse";
  case ErrorCode::kTransport: return "transport";
  case ErrorCode::kExtraction: return "extraction";
  case ErrorCode::kIntegration: return "integration";
  case ErrorCode::kLayout: return "layout";
  case ErrorCode::kNoMessage: return "no_message";
  case ErrorCode::kMigration: return "migration";
  case ErrorCode::kPrecondition: return "precondition";
  case ErrorCode::kJudge: return "judge";
  case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

} // namespace streamcart
