#pragma once

#include <string>
#include <string_view>

namespace fpvg {

enum class AnswerMode {
  kNormalized,  // NFC, trimmed, lowercased
  kStrict,      // raw byte equality
};

// Canonical comparison key for an answer string. In normalized mode the input
// must be valid UTF-8; invalid sequences are replaced by U+FFFD.
std::string normalize_answer(std::string_view raw, AnswerMode mode);

// The answer-equality predicate used by every metric.
class AnswerEquality {
 public:
  explicit AnswerEquality(AnswerMode mode = AnswerMode::kNormalized) : mode_(mode) {}

  AnswerMode mode() const noexcept { return mode_; }
  std::string key(std::string_view raw) const { return normalize_answer(raw, mode_); }
  bool operator()(std::string_view a, std::string_view b) const;

 private:
  AnswerMode mode_;
};

}  // namespace fpvg
