#pragma once

// End-to-end commands behind the `fpvg` CLI. Each cmd_* reads its inputs,
// validates them, and writes outputs atomically. Errors surface as
// ValidationError / std::invalid_argument (bad input) or IoError.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpvg/analysis.hpp"
#include "fpvg/answer.hpp"
#include "fpvg/importance.hpp"
#include "fpvg/ingest.hpp"
#include "fpvg/metrics.hpp"
#include "fpvg/relevance.hpp"
#include "fpvg/synthetic.hpp"

namespace fpvg {

// Every semantic knob that changes a computed number.
struct EvaluationConfig {
  RelevanceConfig relevance;
  SuffCompThresholds suff_comp;
  AnswerMode answer_mode = AnswerMode::kNormalized;

  // Canonical JSON of the semantic fields; the fingerprint hashes exactly this.
  std::string canonical_json() const;
  // 16 hex digits of FNV-1a 64 over canonical_json().
  std::string fingerprint() const;
};

struct ReportFormats {
  bool json = true;
  bool csv = false;
};

// ----------------------------------------------------------------- prepare

struct PrepareOptions {
  std::string questions_path;
  std::string detections_path;
  std::string out_dir;
  RelevanceConfig relevance;
  unsigned threads = 1;
};

struct PrepareResult {
  std::vector<RelevanceAssignment> assignments;  // ascending question_id
  DropReport drops;
};

// In-memory core: one assignment per question (empty for a missing image).
PrepareResult prepare_assignments(const QuestionSet& questions, const DetectionIndex& detections,
                                  const RelevanceConfig& relevance, unsigned threads = 1);

// Writes <out>/assignments.jsonl and <out>/prepare.json.
PrepareResult cmd_prepare(const PrepareOptions& options);

// ---------------------------------------------------------------- manifest

enum class ManifestMode { kConditions, kLoo };

// Manifests for every eligible assignment, question-major.
std::vector<Manifest> build_manifests(std::span<const RelevanceAssignment> assignments,
                                      ManifestMode mode);

// Returns the number of manifest lines written to `out_path`.
std::size_t cmd_manifest(const std::string& assignments_path, ManifestMode mode,
                         const std::string& out_path);

// ---------------------------------------------------------------- evaluate

struct EvaluationResult {
  EvaluationConfig config;
  std::string padding_policy;
  DropReport drops;
  std::vector<QuestionOutcome> outcomes;  // ascending question_id
  FpvgAggregates aggregates;
  QuadrantCounts quadrants;
  std::uint64_t n_suff = 0;
  std::uint64_t n_comp = 0;
  std::vector<FlipRateRow> flips_suff_bins;
  std::vector<FlipRateRow> flips_comp_bins;
  std::vector<FlipRateRow> flips_fpvg_terms;
};

// In-memory core. Evaluates every eligible assignment; each must have a
// question record and a prediction in all three runs.
EvaluationResult evaluate_runs(const QuestionSet& questions,
                               std::span<const RelevanceAssignment> assignments,
                               const ConditionRuns& runs, const EvaluationConfig& config,
                               unsigned threads = 1);

inline constexpr const char* kPerQuestionFile = "per_question.jsonl";

std::string render_report_json(const EvaluationResult& result);
std::string render_report_csv(const EvaluationResult& result);
std::string render_per_question_jsonl(const EvaluationResult& result);

struct EvaluateOptions {
  std::string questions_path;
  std::string assignments_path;
  std::string pred_all_path;
  std::string pred_rel_path;
  std::string pred_irrel_path;
  std::string out_dir;
  EvaluationConfig config;
  std::string padding_policy = "unspecified";
  ReportFormats formats;
  unsigned threads = 1;
};

// Writes <out>/report.json, <out>/per_question.jsonl and, with csv enabled,
// <out>/report.csv. A prepare.json next to the assignments file supplies the
// relevance thresholds recorded in the report.
EvaluationResult cmd_evaluate(const EvaluateOptions& options);

// Report readers used by the downstream commands.
struct LoadedReport {
  std::string path;
  std::string config_fingerprint;
  FpvgAggregates aggregates;
  std::string per_question_path;  // resolved against the report's directory
};
LoadedReport load_report(const std::string& path);
std::vector<QuestionOutcome> parse_outcomes_text(std::string_view text, const std::string& source);

// -------------------------------------------------------------- importance

struct ImportanceOptions {
  std::string importance_path;  // optional: externally computed vectors
  std::string loo_base_path;    // optional: all-condition predictions for LOO
  std::string loo_dir;          // directory of loo_<k>.jsonl runs
  std::string assignments_path;
  std::string report_path;
  std::string out_dir;
  AnswerMode answer_mode = AnswerMode::kNormalized;
};

struct ImportanceResult {
  std::vector<RankingMatchScore> scores;  // method-major, ascending question_id
  std::vector<RankingSummary> summaries;  // one per method
  std::size_t skipped = 0;                // vectors for ineligible or unevaluated questions
};

// LOO importance vectors for every eligible assignment, from the base run and
// per-index runs (runs[k] omits object k).
ImportanceMap build_loo_importance(std::span<const RelevanceAssignment> assignments,
                                   const PredictionRun& base, std::span<const PredictionRun> loo_runs,
                                   const AnswerEquality& equal);

// Writes <out>/ranking_match.jsonl and <out>/ranking_summary.json.
ImportanceResult cmd_importance(const ImportanceOptions& options);

// ----------------------------------------------------------------- analyze

struct AnalyzeOptions {
  // (split label, report paths); several paths = several seeds.
  std::vector<std::pair<std::string, std::vector<std::string>>> splits;
  std::string out_dir;
  ReportFormats formats;
  bool include_mod = false;
};

// Writes <out>/comparison.json and/or <out>/comparison.csv.
SplitComparison cmd_analyze(const AnalyzeOptions& options);

// ------------------------------------------------------------------- synth

struct SynthOptions {
  SyntheticWorldConfig world;
  SyntheticModel model;
  RelevanceConfig relevance;
  std::string out_dir;
  bool loo = false;
};

struct SynthResult {
  SyntheticWorld world;
  PrepareResult prepared;
  std::map<Condition, PredictionRun> runs;
};

// In-memory core used by cmd_synth and the acceptance suite.
SynthResult synthesize(const SyntheticWorldConfig& world, const SyntheticModel& model,
                       const RelevanceConfig& relevance, bool loo);

// Writes questions.jsonl, detections.jsonl, assignments.jsonl, prepare.json,
// manifests.jsonl, predictions_{all,rel,irrel}.jsonl and synth.json; with
// loo also manifests_loo.jsonl and loo/loo_<k>.jsonl.
SynthResult cmd_synth(const SynthOptions& options);

}  // namespace fpvg
