#pragma once

#include <stdexcept>
#include <string>

namespace regraph {

// Failure categories. The CLI maps each one to its own exit code.
enum class ErrorCategory {
  Parse = 2,
  Validation = 3,
  Integration = 4,
  Io = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(ErrorCategory::Parse, what) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what)
      : Error(ErrorCategory::Validation, what) {}
};

struct IntegrationError : Error {
  explicit IntegrationError(const std::string& what)
      : Error(ErrorCategory::Integration, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

}  // namespace regraph
