#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpvg/answer.hpp"
#include "fpvg/ingest.hpp"

namespace fpvg {

// Exact fraction of question counts. A zero denominator means "undefined".
struct Ratio {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 0;

  bool defined() const noexcept { return denominator != 0; }
  double value() const noexcept {
    return defined() ? static_cast<double>(numerator) / static_cast<double>(denominator) : 0.0;
  }

  friend bool operator==(const Ratio&, const Ratio&) = default;
};

// Grounded iff the answer survives the relevant-only input and changes under
// the irrelevant-only input.
bool fpvg_question(std::string_view answer_all, std::string_view answer_rel,
                   std::string_view answer_irrel, const AnswerEquality& equal = AnswerEquality{});

// The ablated variant that drops the irrelevant-only test.
bool mod_fpvg_question(std::string_view answer_all, std::string_view answer_rel,
                       const AnswerEquality& equal = AnswerEquality{});

struct FpvgCategory {
  bool grounded = false;
  bool correct = false;

  // "plus_correct", "plus_incorrect", "minus_correct" or "minus_incorrect".
  std::string_view label() const noexcept;

  friend bool operator==(const FpvgCategory&, const FpvgCategory&) = default;
};

// The three runs a question is evaluated against.
struct ConditionRuns {
  const PredictionRun& all;
  const PredictionRun& rel;
  const PredictionRun& irrel;
};

// Throws ValidationError naming the run label when a run lacks the question.
FpvgCategory categorize(std::string_view question_id, std::string_view gold,
                        const ConditionRuns& runs, const AnswerEquality& equal = AnswerEquality{});

struct QuestionOutcome {
  std::string question_id;
  std::string gold;
  std::string answer_all;
  std::string answer_rel;
  std::string answer_irrel;
  FpvgCategory category;
  bool mod_grounded = false;
  bool correct_rel = false;
  bool correct_irrel = false;
  bool rel_flipped = false;    // answer_rel differs from answer_all
  bool irrel_flipped = false;  // answer_irrel differs from answer_all
  std::optional<double> suff;
  std::optional<double> comp;
};

// Categorization plus everything the report needs for one question.
QuestionOutcome evaluate_question(std::string_view question_id, std::string_view gold,
                                  const ConditionRuns& runs,
                                  const AnswerEquality& equal = AnswerEquality{});

class EmptyReportError : public std::domain_error {
 public:
  EmptyReportError() : std::domain_error("no evaluated questions; cannot aggregate") {}
};

struct FpvgAggregates {
  std::uint64_t n = 0;
  Ratio plus, minus;
  Ratio plus_correct, plus_incorrect, minus_correct, minus_incorrect;
  Ratio mod_plus, mod_minus;
  Ratio mod_plus_correct, mod_plus_incorrect, mod_minus_correct, mod_minus_incorrect;
  Ratio acc_all, acc_rel, acc_irrel;
};

// Throws EmptyReportError for an empty input.
FpvgAggregates aggregate(std::span<const QuestionOutcome> outcomes);

// Drop in the all-condition predicted class probability when only relevant
// (sufficiency) or only irrelevant (comprehensiveness) objects are kept.
inline double sufficiency(double p_all, double p_rel) noexcept { return p_all - p_rel; }
inline double comprehensiveness(double p_all, double p_irrel) noexcept { return p_all - p_irrel; }

struct SuffCompThresholds {
  double suff_good = 0.01;  // good sufficiency: suff < suff_good
  double comp_bad = 0.20;   // bad comprehensiveness: comp < comp_bad
  std::vector<double> bin_edges{0.01, 0.20, 0.40};

  // Throws std::invalid_argument on non-finite values or unsorted edges.
  void validate() const;
};

struct QuadrantCounts {
  std::uint64_t good_suff_good_comp = 0;
  std::uint64_t good_suff_bad_comp = 0;
  std::uint64_t bad_suff_good_comp = 0;
  std::uint64_t bad_suff_bad_comp = 0;

  std::uint64_t total() const noexcept {
    return good_suff_good_comp + good_suff_bad_comp + bad_suff_good_comp + bad_suff_bad_comp;
  }
  friend bool operator==(const QuadrantCounts&, const QuadrantCounts&) = default;
};

enum class Quadrant { kGoodSuffGoodComp, kGoodSuffBadComp, kBadSuffGoodComp, kBadSuffBadComp };

Quadrant classify_quadrant(double suff, double comp, const SuffCompThresholds& thresholds);

// Counts only questions where both suff and comp are available.
QuadrantCounts suff_comp_quadrants(std::span<const QuestionOutcome> outcomes,
                                   const SuffCompThresholds& thresholds = SuffCompThresholds{});

enum class FlipCategorizer { kSuffBins, kCompBins, kFpvgTerms };

struct FlipRateRow {
  std::string category;
  std::string pairing;  // "rel" or "irrel": the condition compared against "all"
  Ratio flipped;        // flipped / questions in category; undefined when empty
};

std::vector<FlipRateRow> flip_rate_by_category(
    std::span<const QuestionOutcome> outcomes, FlipCategorizer categorizer,
    std::span<const double> bin_edges = std::span<const double>());

}  // namespace fpvg
