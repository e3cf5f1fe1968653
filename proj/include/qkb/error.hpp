#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qkb {

/// Validation failures raised by the library. The kind names the violated
/// invariant and is what the command-line front end prints.
enum class ErrorKind {
  NegativeEigenvalue,
  NotNormalized,
  DimensionMismatch,
  InvalidObservable,
  InvalidPermutation,
  UnsupportedClass,
  TooLarge,
  NonPositiveTemperature,
  InvalidLevels,
  NotUnitary,
  NotHermitian,
  InvalidArgument,
  InvalidInstance,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qkb
