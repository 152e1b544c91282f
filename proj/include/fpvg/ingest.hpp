#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpvg/geometry.hpp"

namespace fpvg {

// Tolerance on |sum(distribution) - 1| accepted at ingestion.
inline constexpr double kDistributionSumTolerance = 1e-4;
// Tolerance between an explicit "prob" and distribution[answer].
inline constexpr double kProbabilityMatchTolerance = 1e-9;
inline constexpr std::size_t kDefaultMaxObjects = 100;

struct QuestionRecord {
  std::string question_id;
  std::string image_id;
  std::string gold_answer;
  std::vector<BoundingBox> relevant_boxes;  // never empty after parsing
};

struct QuestionSet {
  std::vector<QuestionRecord> records;  // sorted by question_id
  std::size_t skipped_no_annotation = 0;

  const QuestionRecord* find(std::string_view question_id) const;
};

// Boxes in the exact row order the model consumes; index == object index.
struct DetectionSet {
  std::string image_id;
  std::vector<BoundingBox> boxes;
};

using DetectionIndex = std::map<std::string, DetectionSet, std::less<>>;

struct PredictionRecord {
  std::string question_id;
  std::string answer;
  std::optional<double> predicted_class_prob;
  std::optional<std::map<std::string, double>> distribution;
};

// Which visual input a run was produced under.
struct Condition {
  enum class Kind { kAll, kRel, kIrrel, kLoo };

  Kind kind = Kind::kAll;
  std::size_t loo_index = 0;  // meaningful only for kLoo

  static Condition all() { return {Kind::kAll, 0}; }
  static Condition rel() { return {Kind::kRel, 0}; }
  static Condition irrel() { return {Kind::kIrrel, 0}; }
  static Condition loo(std::size_t k) { return {Kind::kLoo, k}; }

  // "all", "rel", "irrel" or "loo:<k>".
  std::string to_string() const;
  // Accepts the forms produced by to_string(); throws std::invalid_argument.
  static Condition parse(std::string_view text);

  friend bool operator==(const Condition&, const Condition&) = default;
  friend auto operator<=>(const Condition&, const Condition&) = default;
};

struct PredictionRun {
  Condition condition;
  std::string run_label;
  std::string source;  // file path, for diagnostics
  std::map<std::string, PredictionRecord, std::less<>> records;

  const PredictionRecord* find(std::string_view question_id) const;
};

struct ImportanceVector {
  std::string question_id;
  std::string method;
  std::vector<double> scores;
  std::size_t source_line = 0;  // 0 when not read from a file
};

using ImportanceMap = std::map<std::string, ImportanceVector, std::less<>>;

// Parsers. Each throws ValidationError (file, line, field) on schema or
// invariant violations and IoError when the file cannot be read. Blank lines
// are ignored. Results do not depend on input line order.
QuestionSet parse_questions(const std::string& path);
DetectionIndex parse_detections(const std::string& path,
                                std::size_t max_objects = kDefaultMaxObjects);
PredictionRun parse_predictions(const std::string& path, Condition condition,
                                std::string run_label = {});
ImportanceMap parse_importance(const std::string& path);

// String-input variants; `source` names the input in diagnostics.
QuestionSet parse_questions_text(std::string_view text, const std::string& source);
DetectionIndex parse_detections_text(std::string_view text, const std::string& source,
                                     std::size_t max_objects = kDefaultMaxObjects);
PredictionRun parse_predictions_text(std::string_view text, const std::string& source,
                                     Condition condition, std::string run_label = {});
ImportanceMap parse_importance_text(std::string_view text, const std::string& source);

// Enforces |scores| == detection count of the question's image.
void check_importance_lengths(const ImportanceMap& importance, const QuestionSet& questions,
                              const DetectionIndex& detections, const std::string& source);

// Canonical single-line JSON serializers (no trailing newline).
std::string to_jsonl(const QuestionRecord& q);
std::string to_jsonl(const DetectionSet& d);
std::string to_jsonl(const PredictionRecord& p);
std::string to_jsonl(const ImportanceVector& v);

// Probability that `record` assigns to `answer_class`, read from the
// distribution when present, else from predicted_class_prob when the record's
// own answer equals `answer_class`. Equality of class names uses `equal`.
template <typename Equal>
std::optional<double> class_probability(const PredictionRecord& record,
                                        std::string_view answer_class, const Equal& equal) {
  if (record.distribution) {
    auto exact = record.distribution->find(std::string(answer_class));
    if (exact != record.distribution->end()) return exact->second;
    for (const auto& [name, p] : *record.distribution) {
      if (equal(name, answer_class)) return p;
    }
    return 0.0;  // class absent from a full distribution carries no mass
  }
  if (record.predicted_class_prob && equal(record.answer, answer_class)) {
    return record.predicted_class_prob;
  }
  return std::nullopt;
}

}  // namespace fpvg
