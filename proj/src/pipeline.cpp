#include "fpvg/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <stdexcept>

#include "fpvg/error.hpp"
#include "fpvg/hash.hpp"
#include "fpvg/io.hpp"
#include "fpvg/manifest.hpp"
#include "fpvg/parallel.hpp"
#include "json.hpp"

namespace fpvg {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kTieBreaking = "score descending, then object index ascending";

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

ordered_json ratio_json(const Ratio& r) {
  ordered_json j;
  j["value"] = r.defined() ? ordered_json(io::round_decimal(r.value())) : ordered_json(nullptr);
  j["numerator"] = r.numerator;
  j["denominator"] = r.denominator;
  return j;
}

Ratio ratio_from_json(const json& j, const std::string& source, const std::string& field) {
  if (!j.is_object() || !j.contains("numerator") || !j.contains("denominator")) {
    throw ValidationError(source, 0, field, "expected {numerator, denominator}");
  }
  return {j.at("numerator").get<std::uint64_t>(), j.at("denominator").get<std::uint64_t>()};
}

ordered_json relevance_json(const RelevanceConfig& r) {
  ordered_json j;
  j["iou_threshold"] = r.iou_threshold;
  j["coverage_threshold"] = r.coverage_threshold;
  j["max_objects"] = r.max_objects;
  return j;
}

ordered_json drops_json(const DropReport& d) {
  ordered_json j;
  j["no_annotation"] = d.no_annotation;
  j["no_detections"] = d.no_detections;
  j["no_relevant_detected"] = d.no_relevant_detected;
  j["no_irrelevant_detected"] = d.no_irrelevant_detected;
  j["total_eligible"] = d.total_eligible;
  return j;
}

ordered_json flip_rows_json(const std::vector<FlipRateRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json e;
    e["category"] = r.category;
    e["pairing"] = r.pairing;
    e["rate"] = ratio_json(r.flipped);
    arr.push_back(std::move(e));
  }
  return arr;
}

ordered_json fpvg_block(const Ratio& plus, const Ratio& minus, const Ratio& pc, const Ratio& pi,
                        const Ratio& mc, const Ratio& mi) {
  ordered_json j;
  j["plus"] = ratio_json(plus);
  j["minus"] = ratio_json(minus);
  j["plus_correct"] = ratio_json(pc);
  j["plus_incorrect"] = ratio_json(pi);
  j["minus_correct"] = ratio_json(mc);
  j["minus_incorrect"] = ratio_json(mi);
  return j;
}

ordered_json c2i_json(const C2iRatio& r) {
  ordered_json j;
  j["correct"] = r.correct;
  j["incorrect"] = r.incorrect;
  const auto v = r.ratio();
  j["ratio"] = v ? ordered_json(io::round_decimal(*v)) : ordered_json(nullptr);
  j["infinite"] = r.state() == C2iRatio::State::kInfinite;
  return j;
}

json read_json_file(const std::string& path) {
  const std::string text = io::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path, 0, "", std::string("malformed JSON: ") + e.what());
  }
}

void write_jsonl(const std::string& path, const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  io::write_file_atomic(path, out);
}

}  // namespace

// ------------------------------------------------------------------ config

std::string EvaluationConfig::canonical_json() const {
  ordered_json j;
  j["iou_threshold"] = relevance.iou_threshold;
  j["coverage_threshold"] = relevance.coverage_threshold;
  j["max_objects"] = relevance.max_objects;
  j["suff_good"] = suff_comp.suff_good;
  j["comp_bad"] = suff_comp.comp_bad;
  j["bin_edges"] = suff_comp.bin_edges;
  j["answer_mode"] = answer_mode == AnswerMode::kStrict ? "strict" : "normalized";
  return j.dump();
}

std::string EvaluationConfig::fingerprint() const { return hex64(fnv1a64(canonical_json())); }

// ----------------------------------------------------------------- prepare

PrepareResult prepare_assignments(const QuestionSet& questions, const DetectionIndex& detections,
                                  const RelevanceConfig& relevance, unsigned threads) {
  relevance.validate();
  PrepareResult out;
  out.assignments.resize(questions.records.size());
  parallel_for(questions.records.size(), threads, [&](std::size_t i) {
    const QuestionRecord& q = questions.records[i];
    auto d = detections.find(q.image_id);
    out.assignments[i] = d == detections.end() ? empty_assignment(q.question_id)
                                               : assign_relevance(q, d->second, relevance);
  });
  out.drops = filter_eligible(out.assignments).drops;
  out.drops.no_annotation = questions.skipped_no_annotation;
  return out;
}

PrepareResult cmd_prepare(const PrepareOptions& o) {
  o.relevance.validate();
  const QuestionSet questions = parse_questions(o.questions_path);
  const DetectionIndex detections = parse_detections(o.detections_path, o.relevance.max_objects);
  PrepareResult result = prepare_assignments(questions, detections, o.relevance, o.threads);

  std::vector<std::string> lines;
  lines.reserve(result.assignments.size());
  for (const auto& a : result.assignments) lines.push_back(to_jsonl(a));
  write_jsonl(join_path(o.out_dir, "assignments.jsonl"), lines);

  ordered_json meta;
  meta["relevance"] = relevance_json(o.relevance);
  meta["drop_report"] = drops_json(result.drops);
  io::write_file_atomic(join_path(o.out_dir, "prepare.json"), meta.dump(2) + "\n");
  return result;
}

// ---------------------------------------------------------------- manifest

std::vector<Manifest> build_manifests(std::span<const RelevanceAssignment> assignments,
                                      ManifestMode mode) {
  std::vector<Manifest> out;
  for (const auto& a : assignments) {
    if (!a.eligible) continue;
    if (mode == ManifestMode::kConditions) {
      auto m = build_condition_manifests(a);
      out.push_back(std::move(m.all));
      out.push_back(std::move(m.rel));
      out.push_back(std::move(m.irrel));
    } else {
      for (auto& m : build_loo_manifests(a)) out.push_back(std::move(m));
    }
  }
  return out;
}

std::size_t cmd_manifest(const std::string& assignments_path, ManifestMode mode,
                         const std::string& out_path) {
  const auto assignments = parse_assignments(assignments_path);
  const auto manifests = build_manifests(assignments, mode);
  std::vector<std::string> lines;
  lines.reserve(manifests.size());
  for (const auto& m : manifests) lines.push_back(to_jsonl(m));
  write_jsonl(out_path, lines);
  return manifests.size();
}

// ---------------------------------------------------------------- evaluate

EvaluationResult evaluate_runs(const QuestionSet& questions,
                               std::span<const RelevanceAssignment> assignments,
                               const ConditionRuns& runs, const EvaluationConfig& config,
                               unsigned threads) {
  config.relevance.validate();
  config.suff_comp.validate();
  const AnswerEquality equal(config.answer_mode);

  EvaluationResult r;
  r.config = config;
  const EligibleSet eligible = filter_eligible(assignments);
  r.drops = eligible.drops;
  r.drops.no_annotation = questions.skipped_no_annotation;

  r.outcomes.resize(eligible.question_ids.size());
  parallel_for(eligible.question_ids.size(), threads, [&](std::size_t i) {
    const std::string& qid = eligible.question_ids[i];
    const QuestionRecord* q = questions.find(qid);
    if (q == nullptr) {
      throw ValidationError("", 0, "question_id",
                            "assignment for '" + qid + "' has no question record");
    }
    r.outcomes[i] = evaluate_question(qid, q->gold_answer, runs, equal);
  });

  r.aggregates = aggregate(r.outcomes);
  r.quadrants = suff_comp_quadrants(r.outcomes, config.suff_comp);
  for (const auto& o : r.outcomes) {
    r.n_suff += o.suff ? 1 : 0;
    r.n_comp += o.comp ? 1 : 0;
  }
  const auto& edges = config.suff_comp.bin_edges;
  r.flips_suff_bins = flip_rate_by_category(r.outcomes, FlipCategorizer::kSuffBins, edges);
  r.flips_comp_bins = flip_rate_by_category(r.outcomes, FlipCategorizer::kCompBins, edges);
  r.flips_fpvg_terms = flip_rate_by_category(r.outcomes, FlipCategorizer::kFpvgTerms);
  return r;
}

std::string render_report_json(const EvaluationResult& r) {
  const auto& a = r.aggregates;
  ordered_json j;
  j["config_fingerprint"] = r.config.fingerprint();
  j["config"] = ordered_json::parse(r.config.canonical_json());
  ordered_json meta;
  meta["padding_policy"] = r.padding_policy;
  meta["ranking_tie_breaking"] = kTieBreaking;
  meta["decimal_precision"] = "12 significant digits";
  j["metadata"] = std::move(meta);
  j["n_evaluated"] = a.n;
  j["drop_report"] = drops_json(r.drops);
  j["accuracy"] = {{"all", ratio_json(a.acc_all)},
                   {"rel", ratio_json(a.acc_rel)},
                   {"irrel", ratio_json(a.acc_irrel)}};
  j["fpvg"] = fpvg_block(a.plus, a.minus, a.plus_correct, a.plus_incorrect, a.minus_correct,
                         a.minus_incorrect);
  j["mod_fpvg"] = fpvg_block(a.mod_plus, a.mod_minus, a.mod_plus_correct, a.mod_plus_incorrect,
                             a.mod_minus_correct, a.mod_minus_incorrect);

  ordered_json sc;
  sc["thresholds"] = {{"suff_good", r.config.suff_comp.suff_good},
                      {"comp_bad", r.config.suff_comp.comp_bad}};
  sc["n_suff"] = r.n_suff;
  sc["n_comp"] = r.n_comp;
  sc["excluded_suff"] = a.n - r.n_suff;
  sc["excluded_comp"] = a.n - r.n_comp;
  const std::uint64_t nq = r.quadrants.total();
  ordered_json quad;
  quad["good_suff_good_comp"] = ratio_json({r.quadrants.good_suff_good_comp, nq});
  quad["good_suff_bad_comp"] = ratio_json({r.quadrants.good_suff_bad_comp, nq});
  quad["bad_suff_good_comp"] = ratio_json({r.quadrants.bad_suff_good_comp, nq});
  quad["bad_suff_bad_comp"] = ratio_json({r.quadrants.bad_suff_bad_comp, nq});
  sc["quadrants"] = std::move(quad);
  sc["flip_rates"] = {{"suff_bins", flip_rows_json(r.flips_suff_bins)},
                      {"comp_bins", flip_rows_json(r.flips_comp_bins)},
                      {"fpvg_terms", flip_rows_json(r.flips_fpvg_terms)}};
  j["suff_comp"] = std::move(sc);

  j["c2i"] = {{"all", c2i_json(c2i(a, C2iSubset::kAll))},
              {"fpvg_plus", c2i_json(c2i(a, C2iSubset::kFpvgPlus))},
              {"fpvg_minus", c2i_json(c2i(a, C2iSubset::kFpvgMinus))}};
  j["per_question_path"] = kPerQuestionFile;
  return j.dump(2) + "\n";
}

std::string render_report_csv(const EvaluationResult& r) {
  const auto& a = r.aggregates;
  std::string out = "metric,numerator,denominator,value\n";
  auto row = [&](const std::string& name, const Ratio& ratio) {
    out += name + "," + std::to_string(ratio.numerator) + "," + std::to_string(ratio.denominator) +
           "," + (ratio.defined() ? io::format_decimal(ratio.value()) : std::string()) + "\n";
  };
  row("accuracy.all", a.acc_all);
  row("accuracy.rel", a.acc_rel);
  row("accuracy.irrel", a.acc_irrel);
  const std::pair<const char*, const Ratio*> fpvg_rows[] = {
      {"plus", &a.plus},           {"minus", &a.minus},
      {"plus_correct", &a.plus_correct}, {"plus_incorrect", &a.plus_incorrect},
      {"minus_correct", &a.minus_correct}, {"minus_incorrect", &a.minus_incorrect}};
  for (const auto& [name, ratio] : fpvg_rows) row(std::string("fpvg.") + name, *ratio);
  const std::pair<const char*, const Ratio*> mod_rows[] = {
      {"plus", &a.mod_plus},           {"minus", &a.mod_minus},
      {"plus_correct", &a.mod_plus_correct}, {"plus_incorrect", &a.mod_plus_incorrect},
      {"minus_correct", &a.mod_minus_correct}, {"minus_incorrect", &a.mod_minus_incorrect}};
  for (const auto& [name, ratio] : mod_rows) row(std::string("mod_fpvg.") + name, *ratio);
  const std::uint64_t nq = r.quadrants.total();
  row("suff_comp.quadrants.good_suff_good_comp", {r.quadrants.good_suff_good_comp, nq});
  row("suff_comp.quadrants.good_suff_bad_comp", {r.quadrants.good_suff_bad_comp, nq});
  row("suff_comp.quadrants.bad_suff_good_comp", {r.quadrants.bad_suff_good_comp, nq});
  row("suff_comp.quadrants.bad_suff_bad_comp", {r.quadrants.bad_suff_bad_comp, nq});
  auto flips = [&](const char* table, const std::vector<FlipRateRow>& rows) {
    for (const auto& f : rows) {
      row(std::string("suff_comp.flip_rates.") + table + "." + f.category + "." + f.pairing,
          f.flipped);
    }
  };
  flips("suff_bins", r.flips_suff_bins);
  flips("comp_bins", r.flips_comp_bins);
  flips("fpvg_terms", r.flips_fpvg_terms);
  return out;
}

std::string render_per_question_jsonl(const EvaluationResult& r) {
  std::string out;
  for (const auto& o : r.outcomes) {
    ordered_json j;
    j["question_id"] = o.question_id;
    j["category"] = o.category.label();
    j["grounded"] = o.category.grounded;
    j["correct"] = o.category.correct;
    j["mod_grounded"] = o.mod_grounded;
    j["gold"] = o.gold;
    j["answer_all"] = o.answer_all;
    j["answer_rel"] = o.answer_rel;
    j["answer_irrel"] = o.answer_irrel;
    j["correct_rel"] = o.correct_rel;
    j["correct_irrel"] = o.correct_irrel;
    j["rel_flipped"] = o.rel_flipped;
    j["irrel_flipped"] = o.irrel_flipped;
    j["suff"] = o.suff ? ordered_json(*o.suff) : ordered_json(nullptr);
    j["comp"] = o.comp ? ordered_json(*o.comp) : ordered_json(nullptr);
    out += j.dump() + "\n";
  }
  return out;
}

EvaluationResult cmd_evaluate(const EvaluateOptions& o) {
  EvaluationConfig config = o.config;
  const fs::path prepare_meta = fs::path(o.assignments_path).parent_path() / "prepare.json";
  if (fs::exists(prepare_meta)) {
    const json meta = read_json_file(prepare_meta.string());
    if (meta.contains("relevance")) {
      const json& rel = meta.at("relevance");
      config.relevance.iou_threshold = rel.at("iou_threshold").get<double>();
      config.relevance.coverage_threshold = rel.at("coverage_threshold").get<double>();
      config.relevance.max_objects = rel.at("max_objects").get<std::size_t>();
    }
  }

  const QuestionSet questions = parse_questions(o.questions_path);
  const auto assignments = parse_assignments(o.assignments_path);
  const PredictionRun all = parse_predictions(o.pred_all_path, Condition::all(), "all");
  const PredictionRun rel = parse_predictions(o.pred_rel_path, Condition::rel(), "rel");
  const PredictionRun irrel = parse_predictions(o.pred_irrel_path, Condition::irrel(), "irrel");

  EvaluationResult r = evaluate_runs(questions, assignments, {all, rel, irrel}, config, o.threads);
  r.padding_policy = o.padding_policy;

  io::write_file_atomic(join_path(o.out_dir, kPerQuestionFile), render_per_question_jsonl(r));
  if (o.formats.json) io::write_file_atomic(join_path(o.out_dir, "report.json"), render_report_json(r));
  if (o.formats.csv) io::write_file_atomic(join_path(o.out_dir, "report.csv"), render_report_csv(r));
  return r;
}

LoadedReport load_report(const std::string& path) {
  const json j = read_json_file(path);
  LoadedReport out;
  out.path = path;
  try {
    out.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    FpvgAggregates& a = out.aggregates;
    a.n = j.at("n_evaluated").get<std::uint64_t>();
    const json& acc = j.at("accuracy");
    a.acc_all = ratio_from_json(acc.at("all"), path, "accuracy.all");
    a.acc_rel = ratio_from_json(acc.at("rel"), path, "accuracy.rel");
    a.acc_irrel = ratio_from_json(acc.at("irrel"), path, "accuracy.irrel");
    auto block = [&](const char* name, Ratio& plus, Ratio& minus, Ratio& pc, Ratio& pi, Ratio& mc,
                     Ratio& mi) {
      const json& b = j.at(name);
      const std::string n(name);
      plus = ratio_from_json(b.at("plus"), path, n + ".plus");
      minus = ratio_from_json(b.at("minus"), path, n + ".minus");
      pc = ratio_from_json(b.at("plus_correct"), path, n + ".plus_correct");
      pi = ratio_from_json(b.at("plus_incorrect"), path, n + ".plus_incorrect");
      mc = ratio_from_json(b.at("minus_correct"), path, n + ".minus_correct");
      mi = ratio_from_json(b.at("minus_incorrect"), path, n + ".minus_incorrect");
    };
    block("fpvg", a.plus, a.minus, a.plus_correct, a.plus_incorrect, a.minus_correct,
          a.minus_incorrect);
    block("mod_fpvg", a.mod_plus, a.mod_minus, a.mod_plus_correct, a.mod_plus_incorrect,
          a.mod_minus_correct, a.mod_minus_incorrect);
    const std::string pq = j.at("per_question_path").get<std::string>();
    out.per_question_path = (fs::path(path).parent_path() / pq).string();
  } catch (const json::exception& e) {
    throw ValidationError(path, 0, "", std::string("not a report: ") + e.what());
  }
  return out;
}

std::vector<QuestionOutcome> parse_outcomes_text(std::string_view text, const std::string& source) {
  std::vector<QuestionOutcome> out;
  io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    try {
      const json j = json::parse(line);
      QuestionOutcome o;
      o.question_id = j.at("question_id").get<std::string>();
      o.category.grounded = j.at("grounded").get<bool>();
      o.category.correct = j.at("correct").get<bool>();
      o.mod_grounded = j.at("mod_grounded").get<bool>();
      o.gold = j.at("gold").get<std::string>();
      o.answer_all = j.at("answer_all").get<std::string>();
      o.answer_rel = j.at("answer_rel").get<std::string>();
      o.answer_irrel = j.at("answer_irrel").get<std::string>();
      o.correct_rel = j.at("correct_rel").get<bool>();
      o.correct_irrel = j.at("correct_irrel").get<bool>();
      o.rel_flipped = j.at("rel_flipped").get<bool>();
      o.irrel_flipped = j.at("irrel_flipped").get<bool>();
      if (!j.at("suff").is_null()) o.suff = j.at("suff").get<double>();
      if (!j.at("comp").is_null()) o.comp = j.at("comp").get<double>();
      out.push_back(std::move(o));
    } catch (const json::exception& e) {
      throw ValidationError(source, line_no, "", std::string("bad per-question line: ") + e.what());
    }
  });
  return out;
}

// -------------------------------------------------------------- importance

ImportanceMap build_loo_importance(std::span<const RelevanceAssignment> assignments,
                                   const PredictionRun& base, std::span<const PredictionRun> loo_runs,
                                   const AnswerEquality& equal) {
  ImportanceMap out;
  for (const auto& a : assignments) {
    if (!a.eligible) continue;
    const PredictionRecord* b = base.find(a.question_id);
    if (b == nullptr) {
      throw ValidationError(base.source, 0, "question_id",
                            "question '" + a.question_id + "' missing from run '" +
                                base.run_label + "'");
    }
    const std::size_t n = a.object_count();
    if (loo_runs.size() < n) {
      throw ValidationError("", 0, "loo_index",
                            "question '" + a.question_id + "' has " + std::to_string(n) +
                                " objects but only " + std::to_string(loo_runs.size()) +
                                " leave-one-out runs were supplied");
    }
    std::vector<PredictionRecord> records;
    records.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      const PredictionRecord* r = loo_runs[k].find(a.question_id);
      if (r == nullptr) {
        throw ValidationError(loo_runs[k].source, 0, "question_id",
                              "question '" + a.question_id + "' missing from run '" +
                                  loo_runs[k].run_label + "'");
      }
      records.push_back(*r);
    }
    try {
      out.emplace(a.question_id, loo_importance(*b, records, equal));
    } catch (const ValidationError& e) {
      throw ValidationError(base.source, 0, e.field(), e.message());
    }
  }
  return out;
}

ImportanceResult cmd_importance(const ImportanceOptions& o) {
  if (o.importance_path.empty() && o.loo_base_path.empty()) {
    throw std::invalid_argument("supply --importance and/or --loo-base with --loo-dir");
  }
  const auto assignments = parse_assignments(o.assignments_path);
  const LoadedReport report = load_report(o.report_path);
  const auto outcomes =
      parse_outcomes_text(io::read_file(report.per_question_path), report.per_question_path);
  std::map<std::string_view, const RelevanceAssignment*> by_id;
  for (const auto& a : assignments) by_id.emplace(a.question_id, &a);
  std::map<std::string_view, bool> evaluated;
  for (const auto& o2 : outcomes) evaluated.emplace(o2.question_id, true);

  std::vector<std::pair<std::string, ImportanceMap>> sources;
  if (!o.importance_path.empty()) {
    sources.emplace_back(o.importance_path, parse_importance(o.importance_path));
  }
  if (!o.loo_base_path.empty()) {
    if (o.loo_dir.empty()) throw std::invalid_argument("--loo-base requires --loo-dir");
    const PredictionRun base = parse_predictions(o.loo_base_path, Condition::all(), "all");
    std::vector<PredictionRun> runs;
    for (std::size_t k = 0;; ++k) {
      const std::string p = join_path(o.loo_dir, "loo_" + std::to_string(k) + ".jsonl");
      if (!fs::exists(p)) break;
      runs.push_back(parse_predictions(p, Condition::loo(k), "loo:" + std::to_string(k)));
    }
    std::vector<RelevanceAssignment> evaluated_assignments;
    for (const auto& a : assignments) {
      if (a.eligible && evaluated.count(a.question_id)) evaluated_assignments.push_back(a);
    }
    sources.emplace_back(o.loo_dir, build_loo_importance(evaluated_assignments, base, runs,
                                                         AnswerEquality(o.answer_mode)));
  }

  ImportanceResult result;
  std::map<std::string, std::vector<RankingMatchScore>> by_method;
  for (const auto& [source, vectors] : sources) {
    for (const auto& [qid, v] : vectors) {
      auto it = by_id.find(qid);
      if (it == by_id.end() || !it->second->eligible || !evaluated.count(qid)) {
        ++result.skipped;
        continue;
      }
      if (v.scores.size() != it->second->object_count()) {
        throw ValidationError(source, v.source_line, "scores",
                              std::to_string(v.scores.size()) + " scores for an image with " +
                                  std::to_string(it->second->object_count()) + " objects");
      }
      by_method[v.method].push_back(ranking_match(v, *it->second));
    }
  }

  std::vector<std::string> lines;
  ordered_json summary;
  summary["tie_breaking"] = kTieBreaking;
  summary["config_fingerprint"] = report.config_fingerprint;
  summary["skipped"] = result.skipped;
  ordered_json methods = ordered_json::array();
  auto group_json = [](const GroupMean& g) {
    ordered_json j;
    j["n"] = g.n;
    j["relevant"] = g.relevant ? ordered_json(io::round_decimal(*g.relevant)) : ordered_json(nullptr);
    j["irrelevant"] =
        g.irrelevant ? ordered_json(io::round_decimal(*g.irrelevant)) : ordered_json(nullptr);
    return j;
  };
  for (auto& [method, scores] : by_method) {
    std::sort(scores.begin(), scores.end(),
              [](const auto& x, const auto& y) { return x.question_id < y.question_id; });
    RankingSummary s = ranking_match_by_fpvg(scores, outcomes);
    s.method = method;
    ordered_json m;
    m["method"] = method;
    m["fpvg_plus"] = group_json(s.fpvg_plus);
    m["fpvg_minus"] = group_json(s.fpvg_minus);
    methods.push_back(std::move(m));
    for (const auto& sc : scores) {
      lines.push_back(to_jsonl(sc));
      result.scores.push_back(sc);
    }
    result.summaries.push_back(std::move(s));
  }
  summary["methods"] = std::move(methods);
  write_jsonl(join_path(o.out_dir, "ranking_match.jsonl"), lines);
  io::write_file_atomic(join_path(o.out_dir, "ranking_summary.json"), summary.dump(2) + "\n");
  return result;
}

// ----------------------------------------------------------------- analyze

SplitComparison cmd_analyze(const AnalyzeOptions& o) {
  std::vector<SplitReports> splits;
  for (const auto& [label, paths] : o.splits) {
    SplitReports s;
    s.label = label;
    for (const auto& p : paths) {
      LoadedReport r = load_report(p);
      if (s.runs.empty()) {
        s.config_fingerprint = r.config_fingerprint;
      } else if (r.config_fingerprint != s.config_fingerprint) {
        throw std::invalid_argument("config fingerprint mismatch within split '" + label +
                                    "': " + p);
      }
      s.runs.push_back(r.aggregates);
    }
    splits.push_back(std::move(s));
  }
  SplitComparison c = compare_splits(splits, o.include_mod);
  if (o.formats.json) {
    io::write_file_atomic(join_path(o.out_dir, "comparison.json"), comparison_to_json(c));
  }
  if (o.formats.csv) {
    io::write_file_atomic(join_path(o.out_dir, "comparison.csv"), comparison_to_csv(c));
  }
  return c;
}

// ------------------------------------------------------------------- synth

SynthResult synthesize(const SyntheticWorldConfig& world_config, const SyntheticModel& model,
                       const RelevanceConfig& relevance, bool loo) {
  SynthResult out;
  out.world = generate_world(world_config);
  QuestionSet questions;
  questions.records = out.world.questions;
  DetectionIndex detections;
  for (const auto& d : out.world.detections) detections.emplace(d.image_id, d);
  out.prepared = prepare_assignments(questions, detections, relevance);

  std::vector<Manifest> manifests = build_manifests(out.prepared.assignments, ManifestMode::kConditions);
  if (loo) {
    auto extra = build_manifests(out.prepared.assignments, ManifestMode::kLoo);
    manifests.insert(manifests.end(), extra.begin(), extra.end());
  }
  out.runs = run_model(model, manifests, out.world);
  return out;
}

SynthResult cmd_synth(const SynthOptions& o) {
  SynthResult r = synthesize(o.world, o.model, o.relevance, o.loo);
  const auto& dir = o.out_dir;
  io::write_file_atomic(join_path(dir, "questions.jsonl"), r.world.questions_jsonl());
  io::write_file_atomic(join_path(dir, "detections.jsonl"), r.world.detections_jsonl());

  std::vector<std::string> lines;
  for (const auto& a : r.prepared.assignments) lines.push_back(to_jsonl(a));
  write_jsonl(join_path(dir, "assignments.jsonl"), lines);
  ordered_json prep;
  prep["relevance"] = relevance_json(o.relevance);
  prep["drop_report"] = drops_json(r.prepared.drops);
  io::write_file_atomic(join_path(dir, "prepare.json"), prep.dump(2) + "\n");

  lines.clear();
  for (const auto& m : build_manifests(r.prepared.assignments, ManifestMode::kConditions)) {
    lines.push_back(to_jsonl(m));
  }
  write_jsonl(join_path(dir, "manifests.jsonl"), lines);
  if (o.loo) {
    lines.clear();
    for (const auto& m : build_manifests(r.prepared.assignments, ManifestMode::kLoo)) {
      lines.push_back(to_jsonl(m));
    }
    write_jsonl(join_path(dir, "manifests_loo.jsonl"), lines);
  }

  for (const auto& [condition, run] : r.runs) {
    std::string name;
    switch (condition.kind) {
      case Condition::Kind::kAll: name = "predictions_all.jsonl"; break;
      case Condition::Kind::kRel: name = "predictions_rel.jsonl"; break;
      case Condition::Kind::kIrrel: name = "predictions_irrel.jsonl"; break;
      case Condition::Kind::kLoo:
        name = (fs::path("loo") / ("loo_" + std::to_string(condition.loo_index) + ".jsonl")).string();
        break;
    }
    io::write_file_atomic(join_path(dir, name), predictions_jsonl(run));
  }

  ordered_json meta;
  const auto& w = o.world;
  meta["model"] = o.model.name();
  if (o.model.kind == SyntheticModel::Kind::kMixed) meta["alpha"] = o.model.alpha;
  meta["world"] = {{"n_questions", w.n_questions},   {"min_objects", w.min_objects},
                   {"max_objects", w.max_objects},   {"answer_vocab_size", w.answer_vocab_size},
                   {"seed", w.seed},                 {"image_width", w.image_width},
                   {"image_height", w.image_height}, {"min_box", w.min_box},
                   {"max_box", w.max_box},           {"max_annotations", w.max_annotations},
                   {"gold_match_rate", w.gold_match_rate}};
  meta["drop_report"] = drops_json(r.prepared.drops);
  io::write_file_atomic(join_path(dir, "synth.json"), meta.dump(2) + "\n");
  return r;
}

}  // namespace fpvg
