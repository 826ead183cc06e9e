#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chdet {

enum class ErrorCode {
  FileNotFound,
  UnsupportedFormat,
  CorruptImage,
  IoFailure,
  RecordMismatch,
  DimensionMismatch,
  WeightOutOfRange,
  NonPowerOfTwoLength,
  NotSquare,
  NotPowerOfTwo,
  TooManyLevels,
  ShapeMismatch,
  TooFewPoints,
  NonFiniteInput,
  EmptyInput,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library surfaces as this exception; code() tells the
// caller which contract was broken.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace chdet
