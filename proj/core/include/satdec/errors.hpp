#pragma once

#include <stdexcept>
#include <string>

namespace satdec {

enum class ErrorCode {
  kInvalidArgument,
  kEmptyPayload,
  kEmptyCorpus,
  kDegenerateProbe,
  kDegenerateDistribution,
  kTooShort,
  kOutOfRange,
  kBackendUnreachable,
  kBackendProtocol,
  kContextTooLong,
  kParse,
  kConfig,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace satdec
