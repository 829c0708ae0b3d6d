#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace dstyle {

// Error categories, doubling as CLI exit codes.
enum class ErrorKind { config = 2, data = 3, numeric = 4 };

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::config: return "config";
    case ErrorKind::data: return "data";
    case ErrorKind::numeric: return "numeric";
  }
  return "unknown";
}

// All failures carry a short machine-readable code ("NonUniformSampling",
// "NoRuleFired", ...) next to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
  std::string code_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string code, const std::string& message)
      : Error(ErrorKind::config, std::move(code), message) {}
};

class DataError : public Error {
 public:
  DataError(std::string code, const std::string& message)
      : Error(ErrorKind::data, std::move(code), message) {}
};

class NumericError : public Error {
 public:
  NumericError(std::string code, const std::string& message)
      : Error(ErrorKind::numeric, std::move(code), message) {}
};

}  // namespace dstyle
