#pragma once

#include <stdexcept>
#include <string>

namespace critp {

enum class ErrorKind {
  Config,
  Dimension,
  DegenerateInput,
  Sign,
  NoRoot,
  Precondition,
  DegenerateConstraint,
  LostSign,
  Stagnation,
  Io,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; `kind()` tells callers which
// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace critp
