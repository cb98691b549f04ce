#pragma once

#include <stdexcept>
#include <string>

namespace stmtc {

enum class ErrorCode {
  EmptyCorpus,
  IoError,
  FormatVersionMismatch,
  PositionOutsideMethod,
  CursorOutsideMethod,
  NoCandidates,
  CorpusTooSmall,
  EmptyConcretization,
  BadRequest,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::PositionOutsideMethod: return "PositionOutsideMethod";
    case ErrorCode::CursorOutsideMethod: return "CursorOutsideMethod";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::CorpusTooSmall: return "CorpusTooSmall";
    case ErrorCode::EmptyConcretization: return "EmptyConcretization";
    case ErrorCode::BadRequest: return "BadRequest";
  }
  return "Unknown";
}

}  // namespace stmtc
