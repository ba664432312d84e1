#ifndef ARGLABEL_ERRORS_HPP
#define ARGLABEL_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace arglabel {

enum class ErrorKind { Parse, Validation, Numeric, Io, Config };

// Base of every error the library raises. The kind selects the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorKind::Parse, what) {}
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(ErrorKind::Parse,
              source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::Validation, what) {}
};

// Raised by build_instance when the relation window does not fit max_len.
class OversizeError : public ValidationError {
 public:
  OversizeError(std::size_t window_length, std::size_t max_len)
      : ValidationError("window of " + std::to_string(window_length) +
                        " tokens exceeds max_len " + std::to_string(max_len)),
        window_length_(window_length) {}
  std::size_t window_length() const noexcept { return window_length_; }

 private:
  std::size_t window_length_;
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::Numeric, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::Config, what) {}
};

// 0 is success; 1 is reserved for usage errors reported by the argument parser.
constexpr int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parse: return 2;
    case ErrorKind::Validation: return 3;
    case ErrorKind::Numeric: return 4;
    case ErrorKind::Io: return 5;
    case ErrorKind::Config: return 6;
  }
  return 1;
}

}  // namespace arglabel

#endif  // ARGLABEL_ERRORS_HPP
