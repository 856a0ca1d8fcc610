#pragma once

#include <stdexcept>
#include <string>

namespace streamcart {

enum class ErrorCode {
  kInvalidArgument = 1,
  kValidation,
  kNotFound,
  kIo,
  kParse,
  kTransport,
  kExtraction,
  kIntegration,
  kLayout,
  kNoMessage,
  kMigration,
  kPrecondition,
  kJudge,
  kInternal,
};

const char* error_code_name(ErrorCode code);

// All core failures surface as this type; the C API maps `code()` onto
// its status enum.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

} // namespace streamcart
