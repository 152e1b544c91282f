#include "fpvg/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "fpvg/error.hpp"
#include "fpvg/io.hpp"

namespace fpvg {

bool fpvg_question(std::string_view answer_all, std::string_view answer_rel,
                   std::string_view answer_irrel, const AnswerEquality& equal) {
  return equal(answer_all, answer_rel) && !equal(answer_all, answer_irrel);
}

bool mod_fpvg_question(std::string_view answer_all, std::string_view answer_rel,
                       const AnswerEquality& equal) {
  return equal(answer_all, answer_rel);
}

std::string_view FpvgCategory::label() const noexcept {
  if (grounded) return correct ? "plus_correct" : "plus_incorrect";
  return correct ? "minus_correct" : "minus_incorrect";
}

namespace {

const PredictionRecord& lookup(const PredictionRun& run, std::string_view question_id) {
  const PredictionRecord* r = run.find(question_id);
  if (r == nullptr) {
    throw ValidationError(run.source, 0, "question_id",
                          "question '" + std::string(question_id) + "' missing from run '" +
                              run.run_label + "'");
  }
  return *r;
}

}  // namespace

FpvgCategory categorize(std::string_view question_id, std::string_view gold,
                        const ConditionRuns& runs, const AnswerEquality& equal) {
  const auto& all = lookup(runs.all, question_id);
  const auto& rel = lookup(runs.rel, question_id);
  const auto& irrel = lookup(runs.irrel, question_id);
  return {fpvg_question(all.answer, rel.answer, irrel.answer, equal), equal(all.answer, gold)};
}

QuestionOutcome evaluate_question(std::string_view question_id, std::string_view gold,
                                  const ConditionRuns& runs, const AnswerEquality& equal) {
  const auto& all = lookup(runs.all, question_id);
  const auto& rel = lookup(runs.rel, question_id);
  const auto& irrel = lookup(runs.irrel, question_id);

  QuestionOutcome out;
  out.question_id = std::string(question_id);
  out.gold = std::string(gold);
  out.answer_all = all.answer;
  out.answer_rel = rel.answer;
  out.answer_irrel = irrel.answer;

  const std::string key_all = equal.key(all.answer);
  const bool same_rel = key_all == equal.key(rel.answer);
  const bool same_irrel = key_all == equal.key(irrel.answer);
  const std::string key_gold = equal.key(gold);

  out.category = {same_rel && !same_irrel, key_all == key_gold};
  out.mod_grounded = same_rel;
  out.correct_rel = equal.key(rel.answer) == key_gold;
  out.correct_irrel = equal.key(irrel.answer) == key_gold;
  out.rel_flipped = !same_rel;
  out.irrel_flipped = !same_irrel;

  const auto p_all = class_probability(all, all.answer, equal);
  if (p_all) {
    if (auto p_rel = class_probability(rel, all.answer, equal)) {
      out.suff = sufficiency(*p_all, *p_rel);
    }
    if (auto p_irrel = class_probability(irrel, all.answer, equal)) {
      out.comp = comprehensiveness(*p_all, *p_irrel);
    }
  }
  return out;
}

FpvgAggregates aggregate(std::span<const QuestionOutcome> outcomes) {
  if (outcomes.empty()) throw EmptyReportError();
  FpvgAggregates a;
  a.n = outcomes.size();
  for (Ratio* r : {&a.plus, &a.minus, &a.plus_correct, &a.plus_incorrect, &a.minus_correct,
                   &a.minus_incorrect, &a.mod_plus, &a.mod_minus, &a.mod_plus_correct,
                   &a.mod_plus_incorrect, &a.mod_minus_correct, &a.mod_minus_incorrect,
                   &a.acc_all, &a.acc_rel, &a.acc_irrel}) {
    r->denominator = a.n;
  }
  for (const auto& o : outcomes) {
    const bool g = o.category.grounded;
    const bool c = o.category.correct;
    ++(g ? a.plus : a.minus).numerator;
    ++(g ? (c ? a.plus_correct : a.plus_incorrect) : (c ? a.minus_correct : a.minus_incorrect))
          .numerator;
    const bool m = o.mod_grounded;
    ++(m ? a.mod_plus : a.mod_minus).numerator;
    ++(m ? (c ? a.mod_plus_correct : a.mod_plus_incorrect)
         : (c ? a.mod_minus_correct : a.mod_minus_incorrect))
          .numerator;
    a.acc_all.numerator += c ? 1 : 0;
    a.acc_rel.numerator += o.correct_rel ? 1 : 0;
    a.acc_irrel.numerator += o.correct_irrel ? 1 : 0;
  }
  return a;
}

void SuffCompThresholds::validate() const {
  if (!std::isfinite(suff_good) || !std::isfinite(comp_bad)) {
    throw std::invalid_argument("suff/comp thresholds must be finite");
  }
  for (double e : bin_edges) {
    if (!std::isfinite(e)) throw std::invalid_argument("bin edges must be finite");
  }
  for (std::size_t i = 1; i < bin_edges.size(); ++i) {
    if (!(bin_edges[i - 1] < bin_edges[i])) {
      throw std::invalid_argument("bin edges must be strictly increasing");
    }
  }
}

Quadrant classify_quadrant(double suff, double comp, const SuffCompThresholds& t) {
  const bool good_suff = suff < t.suff_good;
  const bool bad_comp = comp < t.comp_bad;
  if (good_suff) return bad_comp ? Quadrant::kGoodSuffBadComp : Quadrant::kGoodSuffGoodComp;
  return bad_comp ? Quadrant::kBadSuffBadComp : Quadrant::kBadSuffGoodComp;
}

QuadrantCounts suff_comp_quadrants(std::span<const QuestionOutcome> outcomes,
                                   const SuffCompThresholds& thresholds) {
  QuadrantCounts q;
  for (const auto& o : outcomes) {
    if (!o.suff || !o.comp) continue;
    switch (classify_quadrant(*o.suff, *o.comp, thresholds)) {
      case Quadrant::kGoodSuffGoodComp: ++q.good_suff_good_comp; break;
      case Quadrant::kGoodSuffBadComp: ++q.good_suff_bad_comp; break;
      case Quadrant::kBadSuffGoodComp: ++q.bad_suff_good_comp; break;
      case Quadrant::kBadSuffBadComp: ++q.bad_suff_bad_comp; break;
    }
  }
  return q;
}

namespace {

std::vector<std::string> bin_labels(std::string_view metric, std::span<const double> edges) {
  std::vector<std::string> labels;
  const std::string m(metric);
  if (edges.empty()) {
    labels.push_back(m + " any");
    return labels;
  }
  labels.push_back(m + "<" + io::format_decimal(edges.front()));
  for (std::size_t i = 1; i < edges.size(); ++i) {
    labels.push_back(io::format_decimal(edges[i - 1]) + "<=" + m + "<" +
                     io::format_decimal(edges[i]));
  }
  labels.push_back(m + ">=" + io::format_decimal(edges.back()));
  return labels;
}

std::size_t bin_of(double value, std::span<const double> edges) {
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), value) -
                                  edges.begin());
}

}  // namespace

std::vector<FlipRateRow> flip_rate_by_category(std::span<const QuestionOutcome> outcomes,
                                               FlipCategorizer categorizer,
                                               std::span<const double> bin_edges) {
  std::vector<FlipRateRow> rows;
  if (categorizer == FlipCategorizer::kFpvgTerms) {
    rows = {{"fpvg_plus", "rel", {}},          {"fpvg_plus", "irrel", {}},
            {"rel_term_kept", "rel", {}},      {"rel_term_changed", "rel", {}},
            {"irrel_term_changed", "irrel", {}}, {"irrel_term_kept", "irrel", {}}};
    for (const auto& o : outcomes) {
      auto tally = [](FlipRateRow& row, bool flipped) {
        ++row.flipped.denominator;
        row.flipped.numerator += flipped ? 1 : 0;
      };
      if (o.category.grounded) {
        tally(rows[0], o.rel_flipped);
        tally(rows[1], o.irrel_flipped);
      }
      tally(o.rel_flipped ? rows[3] : rows[2], o.rel_flipped);
      tally(o.irrel_flipped ? rows[4] : rows[5], o.irrel_flipped);
    }
    return rows;
  }

  const bool suff_side = categorizer == FlipCategorizer::kSuffBins;
  const auto labels = bin_labels(suff_side ? "suff" : "comp", bin_edges);
  for (const auto& label : labels) rows.push_back({label, suff_side ? "rel" : "irrel", {}});
  for (const auto& o : outcomes) {
    const auto& score = suff_side ? o.suff : o.comp;
    if (!score) continue;
    FlipRateRow& row = rows[bin_of(*score, bin_edges)];
    ++row.flipped.denominator;
    row.flipped.numerator += (suff_side ? o.rel_flipped : o.irrel_flipped) ? 1 : 0;
  }
  return rows;
}

}  // namespace fpvg
