#pragma once

#include <stdexcept>
#include <string>

namespace hara {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidConfig,
  kInvalidNode,
  kInvalidEdge,
  kDuplicateConstraint,
  kMissingConstraint,
  kParseError,
  kMissingField,
  kNoOverlap,
  kComponentExhausted,
  kNumericalFailure,
  kIoError,
};

const char* ErrorCodeName(ErrorCode code);

// All library failures surface as this exception. The CLI maps the code to
// an exit status (numerical failures → 3, everything else → 2).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hara
