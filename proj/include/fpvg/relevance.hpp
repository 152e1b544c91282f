#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpvg/ingest.hpp"

namespace fpvg {

struct RelevanceConfig {
  double iou_threshold = 0.5;        // relevant: IoU strictly above
  double coverage_threshold = 0.25;  // irrelevant: coverage at most this for every annotation
  std::size_t max_objects = kDefaultMaxObjects;

  // Throws std::invalid_argument unless 0 < thresholds < 1 and max_objects >= 1.
  void validate() const;
};

// Partition of one question's detected objects. Index lists are ascending.
struct RelevanceAssignment {
  std::string question_id;
  std::vector<std::size_t> relevant;
  std::vector<std::size_t> irrelevant;
  std::vector<std::size_t> neither;
  bool eligible = false;

  std::size_t object_count() const noexcept {
    return relevant.size() + irrelevant.size() + neither.size();
  }
};

RelevanceAssignment assign_relevance(const QuestionRecord& question, const DetectionSet& detections,
                                     const RelevanceConfig& config);

// Assignment for a question whose image has no detection set at all.
RelevanceAssignment empty_assignment(std::string question_id);

struct DropReport {
  std::size_t no_annotation = 0;  // filled from QuestionSet::skipped_no_annotation
  std::size_t no_detections = 0;
  std::size_t no_relevant_detected = 0;
  std::size_t no_irrelevant_detected = 0;
  std::size_t total_eligible = 0;
};

struct EligibleSet {
  std::vector<std::string> question_ids;  // ascending
  DropReport drops;
};

// Each ineligible question is counted once, in the first matching bucket of
// no_detections, no_relevant_detected, no_irrelevant_detected.
EligibleSet filter_eligible(std::span<const RelevanceAssignment> assignments);

// assignments.jsonl line: {"question_id","relevant","irrelevant","neither","eligible"}.
std::string to_jsonl(const RelevanceAssignment& a);
// Parses and checks partition invariants; throws ValidationError.
std::vector<RelevanceAssignment> parse_assignments_text(std::string_view text,
                                                        const std::string& source);
std::vector<RelevanceAssignment> parse_assignments(const std::string& path);

}  // namespace fpvg
