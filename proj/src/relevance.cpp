#include "fpvg/relevance.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "fpvg/error.hpp"
#include "fpvg/geometry.hpp"
#include "fpvg/io.hpp"
#include "json.hpp"

namespace fpvg {

void RelevanceConfig::validate() const {
  auto in_open_unit = [](double t) { return t > 0.0 && t < 1.0; };
  if (!in_open_unit(iou_threshold)) {
    throw std::invalid_argument("iou_threshold must lie in (0, 1)");
  }
  if (!in_open_unit(coverage_threshold)) {
    throw std::invalid_argument("coverage_threshold must lie in (0, 1)");
  }
  if (max_objects == 0) throw std::invalid_argument("max_objects must be at least 1");
}

RelevanceAssignment assign_relevance(const QuestionRecord& question, const DetectionSet& detections,
                                     const RelevanceConfig& config) {
  if (detections.image_id != question.image_id) {
    throw std::invalid_argument("detections for image '" + detections.image_id +
                                "' do not belong to question '" + question.question_id + "'");
  }
  RelevanceAssignment out;
  out.question_id = question.question_id;
  for (std::size_t i = 0; i < detections.boxes.size(); ++i) {
    const BoundingBox& box = detections.boxes[i];
    bool relevant = false;
    bool covers = false;
    for (const BoundingBox& annotated : question.relevant_boxes) {
      relevant = relevant || iou(box, annotated) > config.iou_threshold;
      covers = covers || coverage_fraction(box, annotated) > config.coverage_threshold;
    }
    // Relevant wins over irrelevant so the sets stay disjoint for any
    // threshold pair (with a low IoU threshold a box can satisfy both tests).
    if (relevant) {
      out.relevant.push_back(i);
    } else if (!covers) {
      out.irrelevant.push_back(i);
    } else {
      out.neither.push_back(i);
    }
  }
  out.eligible = !out.relevant.empty() && !out.irrelevant.empty();
  return out;
}

RelevanceAssignment empty_assignment(std::string question_id) {
  RelevanceAssignment out;
  out.question_id = std::move(question_id);
  return out;
}

EligibleSet filter_eligible(std::span<const RelevanceAssignment> assignments) {
  EligibleSet out;
  for (const auto& a : assignments) {
    if (a.eligible) {
      out.question_ids.push_back(a.question_id);
    } else if (a.object_count() == 0) {
      ++out.drops.no_detections;
    } else if (a.relevant.empty()) {
      ++out.drops.no_relevant_detected;
    } else {
      ++out.drops.no_irrelevant_detected;
    }
  }
  std::sort(out.question_ids.begin(), out.question_ids.end());
  out.drops.total_eligible = out.question_ids.size();
  return out;
}

std::string to_jsonl(const RelevanceAssignment& a) {
  nlohmann::ordered_json j;
  j["question_id"] = a.question_id;
  j["relevant"] = a.relevant;
  j["irrelevant"] = a.irrelevant;
  j["neither"] = a.neither;
  j["eligible"] = a.eligible;
  return j.dump();
}

namespace {

std::vector<std::size_t> index_list(const nlohmann::json& j, const char* field,
                                    const std::string& source, std::size_t line) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_array()) {
    throw ValidationError(source, line, field, "expected an array of object indices");
  }
  std::vector<std::size_t> out;
  for (const auto& v : *it) {
    if (!v.is_number_unsigned()) {
      throw ValidationError(source, line, field, "indices must be non-negative integers");
    }
    out.push_back(v.get<std::size_t>());
  }
  if (!std::is_sorted(out.begin(), out.end()) ||
      std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw ValidationError(source, line, field, "indices must be strictly ascending");
  }
  return out;
}

}  // namespace

std::vector<RelevanceAssignment> parse_assignments_text(std::string_view text,
                                                        const std::string& source) {
  std::vector<RelevanceAssignment> out;
  io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(source, line_no, "", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError(source, line_no, "", "expected a JSON object");
    RelevanceAssignment a;
    auto qid = j.find("question_id");
    if (qid == j.end() || !qid->is_string() || qid->get<std::string>().empty()) {
      throw ValidationError(source, line_no, "question_id", "expected a non-empty string");
    }
    a.question_id = qid->get<std::string>();
    a.relevant = index_list(j, "relevant", source, line_no);
    a.irrelevant = index_list(j, "irrelevant", source, line_no);
    a.neither = index_list(j, "neither", source, line_no);
    auto el = j.find("eligible");
    if (el == j.end() || !el->is_boolean()) {
      throw ValidationError(source, line_no, "eligible", "expected a boolean");
    }
    a.eligible = el->get<bool>();

    std::vector<std::size_t> all;
    all.insert(all.end(), a.relevant.begin(), a.relevant.end());
    all.insert(all.end(), a.irrelevant.begin(), a.irrelevant.end());
    all.insert(all.end(), a.neither.begin(), a.neither.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all[i] != i) {
        throw ValidationError(source, line_no, "relevant",
                              "relevant/irrelevant/neither must partition 0..N-1");
      }
    }
    if (a.eligible != (!a.relevant.empty() && !a.irrelevant.empty())) {
      throw ValidationError(source, line_no, "eligible", "inconsistent with the partition");
    }
    out.push_back(std::move(a));
  });
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.question_id < y.question_id;
  });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].question_id == out[i - 1].question_id) {
      throw ValidationError(source, 0, "question_id",
                            "duplicate assignment for '" + out[i].question_id + "'");
    }
  }
  return out;
}

std::vector<RelevanceAssignment> parse_assignments(const std::string& path) {
  return parse_assignments_text(io::read_file(path), path);
}

}  // namespace fpvg
