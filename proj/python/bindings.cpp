#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpvg/analysis.hpp"
#include "fpvg/error.hpp"
#include "fpvg/geometry.hpp"
#include "fpvg/importance.hpp"
#include "fpvg/manifest.hpp"
#include "fpvg/metrics.hpp"
#include "fpvg/pipeline.hpp"
#include "fpvg/relevance.hpp"

namespace py = pybind11;

namespace {

fpvg::AnswerEquality equality(bool strict) {
  return fpvg::AnswerEquality(strict ? fpvg::AnswerMode::kStrict : fpvg::AnswerMode::kNormalized);
}

py::dict ratio_dict(const fpvg::Ratio& r) {
  py::dict d;
  d["numerator"] = r.numerator;
  d["denominator"] = r.denominator;
  d["value"] = r.defined() ? py::cast(r.value()) : py::none();
  return d;
}

py::dict drops_dict(const fpvg::DropReport& r) {
  py::dict d;
  d["no_annotation"] = r.no_annotation;
  d["no_detections"] = r.no_detections;
  d["no_relevant_detected"] = r.no_relevant_detected;
  d["no_irrelevant_detected"] = r.no_irrelevant_detected;
  d["total_eligible"] = r.total_eligible;
  return d;
}

fpvg::ReportFormats formats(const std::string& f) {
  if (f == "json") return {true, false};
  if (f == "csv") return {false, true};
  if (f == "both") return {true, true};
  throw std::invalid_argument("format must be json, csv or both");
}

void bind_geometry(py::module_& m) {
  py::class_<fpvg::BoundingBox>(m, "BoundingBox")
      .def(py::init<double, double, double, double>(), py::arg("x1"), py::arg("y1"), py::arg("x2"),
           py::arg("y2"))
      .def_readwrite("x1", &fpvg::BoundingBox::x1)
      .def_readwrite("y1", &fpvg::BoundingBox::y1)
      .def_readwrite("x2", &fpvg::BoundingBox::x2)
      .def_readwrite("y2", &fpvg::BoundingBox::y2)
      .def_property_readonly("area", &fpvg::BoundingBox::area)
      .def("valid", &fpvg::BoundingBox::valid)
      .def("__repr__", [](const fpvg::BoundingBox& b) {
        return "BoundingBox(" + std::to_string(b.x1) + ", " + std::to_string(b.y1) + ", " +
               std::to_string(b.x2) + ", " + std::to_string(b.y2) + ")";
      });
  m.def("iou", &fpvg::iou, py::arg("a"), py::arg("b"));
  m.def("coverage_fraction", &fpvg::coverage_fraction, py::arg("candidate"), py::arg("reference"));
}

void bind_metrics(py::module_& m) {
  m.def(
      "normalize_answer",
      [](const std::string& raw, bool strict) {
        return fpvg::normalize_answer(raw, strict ? fpvg::AnswerMode::kStrict
                                                  : fpvg::AnswerMode::kNormalized);
      },
      py::arg("raw"), py::arg("strict") = false);
  m.def(
      "fpvg_question",
      [](const std::string& a, const std::string& r, const std::string& i, bool strict) {
        return fpvg::fpvg_question(a, r, i, equality(strict));
      },
      py::arg("answer_all"), py::arg("answer_rel"), py::arg("answer_irrel"),
      py::arg("strict") = false);
  m.def(
      "mod_fpvg_question",
      [](const std::string& a, const std::string& r, bool strict) {
        return fpvg::mod_fpvg_question(a, r, equality(strict));
      },
      py::arg("answer_all"), py::arg("answer_rel"), py::arg("strict") = false);
  m.def("sufficiency", &fpvg::sufficiency, py::arg("p_all"), py::arg("p_rel"));
  m.def("comprehensiveness", &fpvg::comprehensiveness, py::arg("p_all"), py::arg("p_irrel"));
  m.def(
      "degradation",
      [](double before, double after) { return fpvg::degradation(before, after).value; },
      py::arg("before"), py::arg("after"));
}

void bind_relevance(py::module_& m) {
  py::class_<fpvg::RelevanceConfig>(m, "RelevanceConfig")
      .def(py::init<>())
      .def_readwrite("iou_threshold", &fpvg::RelevanceConfig::iou_threshold)
      .def_readwrite("coverage_threshold", &fpvg::RelevanceConfig::coverage_threshold)
      .def_readwrite("max_objects", &fpvg::RelevanceConfig::max_objects);

  py::class_<fpvg::RelevanceAssignment>(m, "RelevanceAssignment")
      .def_readonly("question_id", &fpvg::RelevanceAssignment::question_id)
      .def_readonly("relevant", &fpvg::RelevanceAssignment::relevant)
      .def_readonly("irrelevant", &fpvg::RelevanceAssignment::irrelevant)
      .def_readonly("neither", &fpvg::RelevanceAssignment::neither)
      .def_readonly("eligible", &fpvg::RelevanceAssignment::eligible)
      .def_property_readonly("object_count", &fpvg::RelevanceAssignment::object_count);

  m.def(
      "assign_relevance",
      [](const std::string& question_id, const std::vector<fpvg::BoundingBox>& annotated,
         const std::vector<fpvg::BoundingBox>& detected, const fpvg::RelevanceConfig& config) {
        fpvg::QuestionRecord q{question_id, "image", "", annotated};
        fpvg::DetectionSet d{"image", detected};
        return fpvg::assign_relevance(q, d, config);
      },
      py::arg("question_id"), py::arg("annotated"), py::arg("detected"),
      py::arg("config") = fpvg::RelevanceConfig{});

  m.def("build_condition_manifests", [](const fpvg::RelevanceAssignment& a) {
    const auto c = fpvg::build_condition_manifests(a);
    py::dict d;
    d["all"] = c.all.object_indices;
    d["rel"] = c.rel.object_indices;
    d["irrel"] = c.irrel.object_indices;
    return d;
  });
  m.def("build_loo_manifests", [](const fpvg::RelevanceAssignment& a) {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& man : fpvg::build_loo_manifests(a)) out.push_back(man.object_indices);
    return out;
  });
  m.def(
      "ranking_match",
      [](const std::vector<double>& scores, const fpvg::RelevanceAssignment& a) {
        fpvg::ImportanceVector v{a.question_id, "python", scores, 0};
        const auto s = fpvg::ranking_match(v, a);
        py::dict d;
        d["relevant_score"] = s.relevant_score;
        d["irrelevant_score"] = s.irrelevant_score;
        return d;
      },
      py::arg("scores"), py::arg("assignment"));
}

void bind_pipeline(py::module_& m) {
  m.def(
      "prepare",
      [](const std::string& questions, const std::string& detections, const std::string& out,
         const fpvg::RelevanceConfig& relevance, unsigned threads) {
        fpvg::PrepareOptions o{questions, detections, out, relevance, threads};
        return drops_dict(fpvg::cmd_prepare(o).drops);
      },
      py::arg("questions"), py::arg("detections"), py::arg("out"),
      py::arg("relevance") = fpvg::RelevanceConfig{}, py::arg("threads") = 1u);

  m.def(
      "manifest",
      [](const std::string& assignments, const std::string& mode, const std::string& out) {
        return fpvg::cmd_manifest(
            assignments, mode == "loo" ? fpvg::ManifestMode::kLoo : fpvg::ManifestMode::kConditions,
            out);
      },
      py::arg("assignments"), py::arg("mode"), py::arg("out"));

  m.def(
      "evaluate",
      [](const std::string& questions, const std::string& assignments, const std::string& pred_all,
         const std::string& pred_rel, const std::string& pred_irrel, const std::string& out,
         bool strict, const std::string& format, unsigned threads) {
        fpvg::EvaluateOptions o;
        o.questions_path = questions;
        o.assignments_path = assignments;
        o.pred_all_path = pred_all;
        o.pred_rel_path = pred_rel;
        o.pred_irrel_path = pred_irrel;
        o.out_dir = out;
        o.config.answer_mode = strict ? fpvg::AnswerMode::kStrict : fpvg::AnswerMode::kNormalized;
        o.formats = formats(format);
        o.threads = threads;
        const auto r = fpvg::cmd_evaluate(o);
        const auto& a = r.aggregates;
        py::dict d;
        d["n_evaluated"] = a.n;
        d["fpvg_plus"] = ratio_dict(a.plus);
        d["fpvg_minus"] = ratio_dict(a.minus);
        d["mod_fpvg_plus"] = ratio_dict(a.mod_plus);
        d["acc_all"] = ratio_dict(a.acc_all);
        d["config_fingerprint"] = r.config.fingerprint();
        return d;
      },
      py::arg("questions"), py::arg("assignments"), py::arg("pred_all"), py::arg("pred_rel"),
      py::arg("pred_irrel"), py::arg("out"), py::arg("strict") = false, py::arg("format") = "json",
      py::arg("threads") = 1u);

  m.def(
      "synth",
      [](const std::string& out, std::size_t n, std::uint64_t seed, const std::string& model,
         double alpha, bool loo) {
        fpvg::SynthOptions o;
        o.world.n_questions = n;
        o.world.seed = seed;
        o.model = fpvg::SyntheticModel::parse(model, alpha);
        o.out_dir = out;
        o.loo = loo;
        return drops_dict(fpvg::cmd_synth(o).prepared.drops);
      },
      py::arg("out"), py::arg("n") = 100, py::arg("seed") = 7, py::arg("model") = "grounded_oracle",
      py::arg("alpha") = 0.5, py::arg("loo") = false);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Faithful & plausible visual grounding metrics (C++ core)";

  py::register_exception<fpvg::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<fpvg::IoError>(m, "IoError", PyExc_OSError);

  bind_geometry(m);
  bind_metrics(m);
  bind_relevance(m);
  bind_pipeline(m);
}
