#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpvg {

// Input that violates a schema or data-model invariant. Carries the source
// location so diagnostics can point at the offending line. `line` is 0 when
// the error is not tied to a single input line.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string file, std::size_t line, std::string field,
                  std::string message);

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }
  const std::string& message() const noexcept { return message_; }

  // Single-line JSON object suitable for machine consumption on stderr.
  std::string to_json() const;

 private:
  std::string file_;
  std::size_t line_;
  std::string field_;
  std::string message_;
};

// A file could not be opened, read, written or renamed.
class IoError : public std::runtime_error {
 public:
  IoError(std::string path, std::string message);

  const std::string& path() const noexcept { return path_; }
  std::string to_json() const;

 private:
  std::string path_;
};

}  // namespace fpvg
