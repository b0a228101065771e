#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace forge {

enum class ErrorCode {
  kMalformedInput,
  kInvalidBBox,
  kDuplicateId,
  kCyclicParentInput,
  kDanglingParent,
  kUnknownElement,
  kIncompleteBinding,
  kTypeMismatch,
  kOverflowAnswer,
  kAnchorNotFound,
  kBadRatios,
  kIoFailure,
  kSchemaViolation,
  kUnknownQid,
  kKindMismatch,
  kUnknownDocument,
  kUnknownPage,
};

std::string_view error_code_name(ErrorCode code);

// Every failure the library reports carries one of the codes above; callers
// that need to branch on the failure class inspect code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedInput: return "MalformedInput";
    case ErrorCode::kInvalidBBox: return "InvalidBBox";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kCyclicParentInput: return "CyclicParentInput";
    case ErrorCode::kDanglingParent: return "DanglingParent";
    case ErrorCode::kUnknownElement: return "UnknownElement";
    case ErrorCode::kIncompleteBinding: return "IncompleteBinding";
    case ErrorCode::kTypeMismatch: return "TypeMismatch";
    case ErrorCode::kOverflowAnswer: return "OverflowAnswer";
    case ErrorCode::kAnchorNotFound: return "AnchorNotFound";
    case ErrorCode::kBadRatios: return "BadRatios";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kUnknownQid: return "UnknownQid";
    case ErrorCode::kKindMismatch: return "KindMismatch";
    case ErrorCode::kUnknownDocument: return "UnknownDocument";
    case ErrorCode::kUnknownPage: return "UnknownPage";
  }
  return "Unknown";
}

}  // namespace forge
