#include "fpvg/answer.hpp"

#include <stdexcept>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

namespace fpvg {

std::string normalize_answer(std::string_view raw, AnswerMode mode) {
  if (mode == AnswerMode::kStrict) return std::string(raw);

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw std::runtime_error(std::string("ICU NFC unavailable: ") + u_errorName(status));
  }

  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  text.trim();
  text.toLower(icu::Locale::getRoot());
  icu::UnicodeString normalized = nfc->normalize(text, status);
  if (U_FAILURE(status)) {
    throw std::runtime_error(std::string("NFC normalization failed: ") + u_errorName(status));
  }

  std::string out;
  normalized.toUTF8String(out);
  return out;
}

bool AnswerEquality::operator()(std::string_view a, std::string_view b) const {
  if (mode_ == AnswerMode::kStrict) return a == b;
  if (a == b) return true;
  return normalize_answer(a, mode_) == normalize_answer(b, mode_);
}

}  // namespace fpvg
