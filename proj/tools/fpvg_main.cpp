// fpvg: command-line front end for the grounding-metric pipeline.
//
//   fpvg prepare    questions + detections -> assignments.jsonl
//   fpvg manifest   assignments -> manifests.jsonl (conditions or leave-one-out)
//   fpvg evaluate   questions + assignments + 3 prediction runs -> report.json
//   fpvg importance importance vectors / LOO runs -> ranking_match outputs
//   fpvg analyze    several report.json files -> split comparison tables
//   fpvg synth      synthetic world + model runs
//
// Exit codes: 0 ok, 1 validation error, 2 I/O failure. Diagnostics for
// failures are a single JSON object on stderr.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "fpvg/error.hpp"
#include "fpvg/pipeline.hpp"
#include "json.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

void report_generic(const char* kind, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << "\n";
}

fpvg::ReportFormats parse_formats(const std::string& f) {
  if (f == "json") return {true, false};
  if (f == "csv") return {false, true};
  if (f == "both") return {true, true};
  throw std::invalid_argument("--format must be json, csv or both");
}

// "ID=a.json,b.json" -> ("ID", ["a.json", "b.json"])
std::pair<std::string, std::vector<std::string>> parse_split(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw std::invalid_argument("--split expects LABEL=report.json[,report.json...]: " + spec);
  }
  std::pair<std::string, std::vector<std::string>> out{spec.substr(0, eq), {}};
  std::stringstream rest(spec.substr(eq + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    if (!item.empty()) out.second.push_back(item);
  }
  return out;
}

void add_relevance_flags(CLI::App* cmd, fpvg::RelevanceConfig& r) {
  cmd->add_option("--iou-threshold", r.iou_threshold, "relevant if IoU with an annotation exceeds this")
      ->capture_default_str();
  cmd->add_option("--coverage-threshold", r.coverage_threshold,
                  "irrelevant if it covers at most this fraction of every annotation")
      ->capture_default_str();
  cmd->add_option("--max-objects", r.max_objects, "maximum detections per image")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Faithful & plausible visual grounding metrics"};
  app.require_subcommand(1);

  // prepare
  fpvg::PrepareOptions prep;
  auto* prepare = app.add_subcommand("prepare", "Partition detected objects into relevant/irrelevant");
  prepare->add_option("--questions", prep.questions_path, "questions.jsonl")->required();
  prepare->add_option("--detections", prep.detections_path, "detections.jsonl")->required();
  prepare->add_option("--out", prep.out_dir, "output directory")->required();
  prepare->add_option("--threads", prep.threads)->capture_default_str();
  add_relevance_flags(prepare, prep.relevance);

  // manifest
  std::string manifest_assignments, manifest_out, manifest_mode = "conditions";
  auto* manifest = app.add_subcommand("manifest", "Emit per-condition object index lists");
  manifest->add_option("--assignments", manifest_assignments)->required();
  manifest->add_option("--mode", manifest_mode, "conditions or loo")
      ->check(CLI::IsMember({"conditions", "loo"}))
      ->capture_default_str();
  manifest->add_option("--out", manifest_out, "manifests.jsonl path")->required();

  // evaluate
  fpvg::EvaluateOptions eval;
  std::string eval_format = "json";
  bool strict = false;
  auto* evaluate = app.add_subcommand("evaluate", "Compute FPVG and companion metrics");
  evaluate->add_option("--questions", eval.questions_path)->required();
  evaluate->add_option("--assignments", eval.assignments_path)->required();
  evaluate->add_option("--pred-all", eval.pred_all_path)->required();
  evaluate->add_option("--pred-rel", eval.pred_rel_path)->required();
  evaluate->add_option("--pred-irrel", eval.pred_irrel_path)->required();
  evaluate->add_option("--out", eval.out_dir)->required();
  evaluate->add_option("--suff-good", eval.config.suff_comp.suff_good)->capture_default_str();
  evaluate->add_option("--comp-bad", eval.config.suff_comp.comp_bad)->capture_default_str();
  evaluate->add_option("--bin-edges", eval.config.suff_comp.bin_edges, "suff/comp flip-rate bin edges")
      ->delimiter(',');
  evaluate->add_flag("--strict-answers", strict, "compare answers byte-for-byte");
  evaluate->add_option("--format", eval_format, "json, csv or both")->capture_default_str();
  evaluate->add_option("--padding-policy", eval.padding_policy,
                       "how the model runner applied manifests (recorded only)");
  evaluate->add_option("--threads", eval.threads)->capture_default_str();
  add_relevance_flags(evaluate, eval.config.relevance);

  // importance
  fpvg::ImportanceOptions imp;
  bool imp_strict = false;
  auto* importance = app.add_subcommand("importance", "Ranking match of importance vectors");
  importance->add_option("--importance", imp.importance_path, "importance.jsonl");
  importance->add_option("--loo-base", imp.loo_base_path, "all-condition predictions for LOO");
  importance->add_option("--loo-dir", imp.loo_dir, "directory of loo_<k>.jsonl prediction runs");
  importance->add_option("--assignments", imp.assignments_path)->required();
  importance->add_option("--report", imp.report_path, "report.json from evaluate")->required();
  importance->add_option("--out", imp.out_dir)->required();
  importance->add_flag("--strict-answers", imp_strict);

  // analyze
  fpvg::AnalyzeOptions an;
  std::vector<std::string> split_specs;
  std::string an_format = "both";
  auto* analyze = app.add_subcommand("analyze", "c2i ratios and degradation across splits");
  analyze->add_option("--split", split_specs, "LABEL=report.json[,report.json...]; first is baseline")
      ->required();
  analyze->add_option("--out", an.out_dir)->required();
  analyze->add_option("--format", an_format)->capture_default_str();
  analyze->add_flag("--include-mod", an.include_mod, "also tabulate mod_FPVG groups");

  // synth
  fpvg::SynthOptions syn;
  std::string model_name = "grounded_oracle";
  double alpha = 0.5;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic world and model runs");
  synth->add_option("--n", syn.world.n_questions, "number of questions")->capture_default_str();
  synth->add_option("--seed", syn.world.seed)->capture_default_str();
  synth->add_option("--vocab-size", syn.world.answer_vocab_size)->capture_default_str();
  synth->add_option("--min-objects", syn.world.min_objects)->capture_default_str();
  synth->add_option("--max-objects-per-image", syn.world.max_objects)->capture_default_str();
  synth->add_option("--gold-match-rate", syn.world.gold_match_rate)->capture_default_str();
  synth->add_option("--model", model_name)
      ->check(CLI::IsMember({"grounded_oracle", "blind_prior", "uniform_random", "mixed"}))
      ->capture_default_str();
  synth->add_option("--alpha", alpha, "grounded share for --model mixed")->capture_default_str();
  synth->add_flag("--loo", syn.loo, "also emit leave-one-out manifests and runs");
  synth->add_option("--out", syn.out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*prepare) {
      const auto r = fpvg::cmd_prepare(prep);
      std::cout << "eligible " << r.drops.total_eligible << " of " << r.assignments.size()
                << " questions (no_annotation " << r.drops.no_annotation << ", no_detections "
                << r.drops.no_detections << ", no_relevant " << r.drops.no_relevant_detected
                << ", no_irrelevant " << r.drops.no_irrelevant_detected << ")\n";
    } else if (*manifest) {
      const auto mode = manifest_mode == "loo" ? fpvg::ManifestMode::kLoo
                                               : fpvg::ManifestMode::kConditions;
      const auto n = fpvg::cmd_manifest(manifest_assignments, mode, manifest_out);
      std::cout << "wrote " << n << " manifests to " << manifest_out << "\n";
    } else if (*evaluate) {
      eval.formats = parse_formats(eval_format);
      eval.config.answer_mode = strict ? fpvg::AnswerMode::kStrict : fpvg::AnswerMode::kNormalized;
      const auto r = fpvg::cmd_evaluate(eval);
      std::cout << "n_evaluated " << r.aggregates.n << "  FPVG+ " << r.aggregates.plus.value()
                << "  Acc_all " << r.aggregates.acc_all.value() << "\n";
    } else if (*importance) {
      imp.answer_mode = imp_strict ? fpvg::AnswerMode::kStrict : fpvg::AnswerMode::kNormalized;
      const auto r = fpvg::cmd_importance(imp);
      std::cout << "scored " << r.scores.size() << " question vectors (" << r.skipped
                << " skipped)\n";
    } else if (*analyze) {
      an.formats = parse_formats(an_format);
      for (const auto& s : split_specs) an.splits.push_back(parse_split(s));
      const auto c = fpvg::cmd_analyze(an);
      std::cout << "compared " << an.splits.size() << " splits, " << c.cells.size() << " cells\n";
    } else if (*synth) {
      syn.model = fpvg::SyntheticModel::parse(model_name, alpha);
      const auto r = fpvg::cmd_synth(syn);
      std::cout << "generated " << r.world.questions.size() << " questions ("
                << r.prepared.drops.total_eligible << " eligible) for " << syn.model.name() << "\n";
    }
  } catch (const fpvg::ValidationError& e) {
    std::cerr << e.to_json() << "\n";
    return kExitValidation;
  } catch (const fpvg::IoError& e) {
    std::cerr << e.to_json() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    report_generic("validation", e.what());
    return kExitValidation;
  } catch (const std::domain_error& e) {
    report_generic("validation", e.what());
    return kExitValidation;
  } catch (const fpvg::GenerationError& e) {
    report_generic("validation", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    report_generic("internal", e.what());
    return kExitValidation;
  }
  return 0;
}
