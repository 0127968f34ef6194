#include "satdec/errors.hpp"

namespace satdec {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyPayload: return "EmptyPayload";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kDegenerateProbe: return "DegenerateProbe";
    case ErrorCode::kDegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kBackendUnreachable: return "BackendUnreachable";
    case ErrorCode::kBackendProtocol: return "BackendProtocol";
    case ErrorCode::kContextTooLong: return "ContextTooLong";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace satdec
