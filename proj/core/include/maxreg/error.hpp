#pragma once

#include <stdexcept>
#include <string>

namespace maxreg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Two grid functions (or a grid function and a Gram matrix) live on different meshes.
class MeshMismatchError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment configuration; carries the offending field name.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error("config field '" + field + "': " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace maxreg
