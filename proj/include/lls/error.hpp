#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lls {

enum class ErrorKind {
  RankDeficient,
  NotPositiveDefinite,
  DimensionMismatch,
  DegenerateMse,
  MissingData,
  IndexOutOfRange,
  InconsistentSigma,
  ScaleExceeded,
  FdStepUnstable,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// True for errors raised by the numerics (as opposed to bad input or usage).
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lls
