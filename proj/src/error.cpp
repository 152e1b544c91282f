#include "fpvg/error.hpp"

#include <utility>

#include "json.hpp"

namespace fpvg {
namespace {

std::string describe(const std::string& file, std::size_t line,
                     const std::string& field, const std::string& message) {
  std::string out = file.empty() ? std::string("<input>") : file;
  if (line > 0) out += ":" + std::to_string(line);
  if (!field.empty()) out += ": field '" + field + "'";
  out += ": " + message;
  return out;
}

}  // namespace

ValidationError::ValidationError(std::string file, std::size_t line,
                                 std::string field, std::string message)
    : std::runtime_error(describe(file, line, field, message)),
      file_(std::move(file)),
      line_(line),
      field_(std::move(field)),
      message_(std::move(message)) {}

std::string ValidationError::to_json() const {
  nlohmann::ordered_json j;
  j["error"] = "validation";
  j["file"] = file_;
  j["line"] = line_;
  j["field"] = field_;
  j["message"] = message_;
  return j.dump();
}

IoError::IoError(std::string path, std::string message)
    : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

std::string IoError::to_json() const {
  nlohmann::ordered_json j;
  j["error"] = "io";
  j["path"] = path_;
  j["message"] = what();
  return j.dump();
}

}  // namespace fpvg
