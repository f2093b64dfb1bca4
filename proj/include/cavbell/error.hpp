#pragma once

#include <stdexcept>
#include <string>

namespace cavbell {

/// Failure category. The CLI maps each kind to a distinct exit code.
enum class ErrorKind {
  config,     // invalid input or violated precondition
  numeric,    // integrator failure, non-finite results
  ill_posed,  // rank-deficient sampling plan
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

class IllPosedError : public Error {
 public:
  explicit IllPosedError(const std::string& what) : Error(ErrorKind::ill_posed, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace cavbell
