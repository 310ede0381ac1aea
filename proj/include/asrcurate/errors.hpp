#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace asrcurate {

// Maps one-to-one onto the CLI exit codes (usage=1, data=2, internal=3).
enum class ErrorKind {
  kUsage = 1,
  kData = 2,
  kInternal = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  const char* code() const noexcept;

 private:
  ErrorKind kind_;
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& message)
      : Error(ErrorKind::kData, message) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message)
      : Error(ErrorKind::kUsage, message) {}
};

/// Raised by the subtitle parsers; `line()` is 1-based, 0 when not tied to a
/// specific line (e.g. empty input).
class ParseError : public DataError {
 public:
  ParseError(const std::string& message, std::size_t line)
      : DataError(line == 0 ? message
                            : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline const char* Error::code() const noexcept {
  switch (kind_) {
    case ErrorKind::kUsage:
      return "usage";
    case ErrorKind::kData:
      return "data";
    case ErrorKind::kInternal:
      return "internal";
  }
  return "internal";
}

}  // namespace asrcurate
