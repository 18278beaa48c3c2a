// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ncg {

enum class ErrorKind {
  InvalidDimension,
  ShapeMismatch,
  DegenerateBasis,
  DegenerateMetric,
  InvalidArgument,
  Parse,
};

/// Single exception type for the library; `kind()` distinguishes the
/// documented failure modes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace ncg
