#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace minuet {

// Invalid scenario or CLI configuration. `field` is a dotted path such as
// "events[0].mdt".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)), message_(what) {}
  const std::string& field() const noexcept { return field_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string field_;
  std::string message_;
};

// Malformed input text (trace or log). `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Structurally valid input that is missing something the schema requires.
class SchemaError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Bad data discovered while simulating (NaN positions and the like).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace minuet
