#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace likecat {

enum class ErrorCode {
  OutOfRange,
  NonFinite,
  MalformedRow,
  DuplicateUser,
  TransportError,
  EmptyDataset,
  ZeroTotal,
  UnknownCategory,
  TooFewRows,
  InsufficientRows,
  DegenerateInput,
  KTooLarge,
  DimensionMismatch,
  UnsupportedVersion,
  CorruptDocument,
  LengthMismatch,
  EmptyInput,
  LabelOutOfRange,
  FeatureSpaceMismatch,
  InvalidSpec,
  InvalidConfig,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace likecat
