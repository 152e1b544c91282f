#include "fpvg/importance.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "fpvg/error.hpp"
#include "json.hpp"

namespace fpvg {

std::vector<std::size_t> importance_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

namespace {

std::size_t hits_in_top(std::span<const std::size_t> order, std::span<const std::size_t> targets) {
  const std::size_t k = targets.size();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k && i < order.size(); ++i) {
    if (std::binary_search(targets.begin(), targets.end(), order[i])) ++hits;
  }
  return hits;
}

}  // namespace

RankingMatchScore ranking_match(const ImportanceVector& importance,
                                const RelevanceAssignment& assignment) {
  if (!assignment.eligible) {
    throw std::invalid_argument("ranking match requires an eligible question ('" +
                                assignment.question_id + "')");
  }
  if (importance.scores.size() != assignment.object_count()) {
    throw ValidationError("", importance.source_line, "scores",
                          "question '" + importance.question_id + "' has " +
                              std::to_string(importance.scores.size()) + " scores for " +
                              std::to_string(assignment.object_count()) + " objects");
  }
  const auto order = importance_order(importance.scores);

  RankingMatchScore s;
  s.question_id = assignment.question_id;
  s.method = importance.method;
  s.n_relevant = assignment.relevant.size();
  s.n_irrelevant = assignment.irrelevant.size();
  s.relevant_hits = hits_in_top(order, assignment.relevant);
  s.irrelevant_hits = hits_in_top(order, assignment.irrelevant);
  s.relevant_score = 100.0 * static_cast<double>(s.relevant_hits) / static_cast<double>(s.n_relevant);
  s.irrelevant_score =
      100.0 * static_cast<double>(s.irrelevant_hits) / static_cast<double>(s.n_irrelevant);
  return s;
}

RankingSummary ranking_match_by_fpvg(std::span<const RankingMatchScore> scores,
                                     std::span<const QuestionOutcome> outcomes) {
  std::map<std::string_view, bool> grounded;
  for (const auto& o : outcomes) grounded.emplace(o.question_id, o.category.grounded);

  RankingSummary out;
  double sums[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // [plus/minus][relevant/irrelevant]
  for (const auto& s : scores) {
    auto it = grounded.find(s.question_id);
    if (it == grounded.end()) {
      throw std::invalid_argument("ranking score for '" + s.question_id +
                                  "' has no FPVG outcome");
    }
    if (out.method.empty()) out.method = s.method;
    const int g = it->second ? 0 : 1;
    sums[g][0] += s.relevant_score;
    sums[g][1] += s.irrelevant_score;
    ++(g == 0 ? out.fpvg_plus.n : out.fpvg_minus.n);
  }
  auto finish = [&](GroupMean& m, int g) {
    if (m.n == 0) return;
    m.relevant = sums[g][0] / static_cast<double>(m.n);
    m.irrelevant = sums[g][1] / static_cast<double>(m.n);
  };
  finish(out.fpvg_plus, 0);
  finish(out.fpvg_minus, 1);
  return out;
}

ImportanceVector loo_importance(const PredictionRecord& base,
                                std::span<const PredictionRecord> loo_records,
                                const AnswerEquality& equal) {
  const auto p_base = class_probability(base, base.answer, equal);
  if (!p_base) {
    throw ValidationError("", 0, "prob",
                          "base prediction for '" + base.question_id + "' carries no probability");
  }
  ImportanceVector v;
  v.question_id = base.question_id;
  v.method = "loo";
  v.scores.reserve(loo_records.size());
  for (std::size_t k = 0; k < loo_records.size(); ++k) {
    const auto p = class_probability(loo_records[k], base.answer, equal);
    if (!p) {
      throw ValidationError("", 0, "distribution",
                            "leave-one-out run " + std::to_string(k) + " for '" +
                                base.question_id + "' has no probability for class '" +
                                base.answer + "'");
    }
    v.scores.push_back(*p_base - *p);
  }
  return v;
}

std::string to_jsonl(const RankingMatchScore& s) {
  nlohmann::ordered_json j;
  j["question_id"] = s.question_id;
  j["method"] = s.method;
  j["relevant_score"] = s.relevant_score;
  j["irrelevant_score"] = s.irrelevant_score;
  j["relevant_hits"] = s.relevant_hits;
  j["n_relevant"] = s.n_relevant;
  j["irrelevant_hits"] = s.irrelevant_hits;
  j["n_irrelevant"] = s.n_irrelevant;
  return j.dump();
}

}  // namespace fpvg
