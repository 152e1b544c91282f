#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpvg/answer.hpp"
#include "fpvg/ingest.hpp"
#include "fpvg/metrics.hpp"
#include "fpvg/relevance.hpp"

namespace fpvg {

// How well an importance ranking recovers the annotation-derived sets.
// Scores are percentages in [0, 100].
struct RankingMatchScore {
  std::string question_id;
  std::string method;
  double relevant_score = 0.0;
  double irrelevant_score = 0.0;
  std::size_t relevant_hits = 0;    // |topN ∩ relevant|
  std::size_t n_relevant = 0;       // N
  std::size_t irrelevant_hits = 0;  // |topM ∩ irrelevant|
  std::size_t n_irrelevant = 0;     // M
};

// Object indices ordered by descending score, ties by ascending index.
std::vector<std::size_t> importance_order(std::span<const double> scores);

// Requires an eligible assignment (std::invalid_argument) and one score per
// object (ValidationError on the "scores" field).
RankingMatchScore ranking_match(const ImportanceVector& importance,
                                const RelevanceAssignment& assignment);

struct GroupMean {
  std::size_t n = 0;
  std::optional<double> relevant;  // absent when n == 0
  std::optional<double> irrelevant;
};

struct RankingSummary {
  std::string method;
  GroupMean fpvg_plus;
  GroupMean fpvg_minus;
};

// Means per FPVG group. Scores for questions absent from `outcomes` are an
// error (std::invalid_argument); outcomes without a score are skipped.
RankingSummary ranking_match_by_fpvg(std::span<const RankingMatchScore> scores,
                                     std::span<const QuestionOutcome> outcomes);

// scores[k] = p_base(â) − p_loo(k)(â), where â is the base run's answer.
// `loo_records[k]` is the prediction with object k omitted. Throws
// ValidationError when a probability for â cannot be read.
ImportanceVector loo_importance(const PredictionRecord& base,
                                std::span<const PredictionRecord> loo_records,
                                const AnswerEquality& equal = AnswerEquality{});

std::string to_jsonl(const RankingMatchScore& s);

}  // namespace fpvg
