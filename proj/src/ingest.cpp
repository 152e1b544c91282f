#include "fpvg/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "fpvg/error.hpp"
#include "fpvg/io.hpp"
#include "json.hpp"

namespace fpvg {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct LineContext {
  const std::string& source;
  std::size_t line;

  [[noreturn]] void fail(const std::string& field, const std::string& message) const {
    throw ValidationError(source, line, field, message);
  }
};

json parse_line(const LineContext& ctx, std::string_view line) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) ctx.fail("", "expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    ctx.fail("", std::string("malformed JSON: ") + e.what());
  }
}

const json& require(const LineContext& ctx, const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) ctx.fail(field, "missing required field");
  return *it;
}

std::string require_string(const LineContext& ctx, const json& obj, const char* field) {
  const json& v = require(ctx, obj, field);
  if (!v.is_string()) ctx.fail(field, "expected a string");
  std::string s = v.get<std::string>();
  if (s.empty()) ctx.fail(field, "must not be empty");
  return s;
}

double as_finite(const LineContext& ctx, const json& v, const std::string& field) {
  if (!v.is_number()) ctx.fail(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) ctx.fail(field, "must be finite");
  return d;
}

double as_probability(const LineContext& ctx, const json& v, const std::string& field) {
  const double p = as_finite(ctx, v, field);
  if (p < 0.0 || p > 1.0) ctx.fail(field, "probability outside [0, 1]");
  return p;
}

std::vector<BoundingBox> parse_boxes(const LineContext& ctx, const json& arr,
                                     const std::string& field) {
  if (!arr.is_array()) ctx.fail(field, "expected an array of [x1,y1,x2,y2] boxes");
  std::vector<BoundingBox> boxes;
  boxes.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string name = field + "[" + std::to_string(i) + "]";
    const json& b = arr[i];
    if (!b.is_array() || b.size() != 4) ctx.fail(name, "expected [x1, y1, x2, y2]");
    BoundingBox box{as_finite(ctx, b[0], name), as_finite(ctx, b[1], name),
                    as_finite(ctx, b[2], name), as_finite(ctx, b[3], name)};
    if (!box.valid()) ctx.fail(name, "degenerate box: requires x1 < x2 and y1 < y2");
    boxes.push_back(box);
  }
  return boxes;
}

ordered_json boxes_json(const std::vector<BoundingBox>& boxes) {
  ordered_json arr = ordered_json::array();
  for (const auto& b : boxes) arr.push_back({b.x1, b.y1, b.x2, b.y2});
  return arr;
}

template <typename Map>
void reject_duplicate(const LineContext& ctx, const Map& seen, const std::string& key,
                      const char* field) {
  auto it = seen.find(key);
  if (it != seen.end()) {
    ctx.fail(field, "duplicate value '" + key + "' (first seen on line " +
                        std::to_string(it->second) + ")");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

const QuestionRecord* QuestionSet::find(std::string_view question_id) const {
  auto it = std::lower_bound(
      records.begin(), records.end(), question_id,
      [](const QuestionRecord& r, std::string_view id) { return r.question_id < id; });
  if (it == records.end() || it->question_id != question_id) return nullptr;
  return &*it;
}

const PredictionRecord* PredictionRun::find(std::string_view question_id) const {
  auto it = records.find(question_id);
  return it == records.end() ? nullptr : &it->second;
}

std::string Condition::to_string() const {
  switch (kind) {
    case Kind::kAll: return "all";
    case Kind::kRel: return "rel";
    case Kind::kIrrel: return "irrel";
    case Kind::kLoo: return "loo:" + std::to_string(loo_index);
  }
  return "?";
}

Condition Condition::parse(std::string_view text) {
  if (text == "all") return all();
  if (text == "rel") return rel();
  if (text == "irrel") return irrel();
  if (text.substr(0, 4) == "loo:" && text.size() > 4) {
    std::size_t k = 0;
    for (char c : text.substr(4)) {
      if (c < '0' || c > '9') throw std::invalid_argument("bad condition: " + std::string(text));
      k = k * 10 + static_cast<std::size_t>(c - '0');
    }
    return loo(k);
  }
  throw std::invalid_argument("unknown condition: " + std::string(text));
}

// ---------------------------------------------------------------------------

QuestionSet parse_questions_text(std::string_view text, const std::string& source) {
  QuestionSet out;
  std::map<std::string, std::size_t> seen;
  io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const LineContext ctx{source, line_no};
    const json j = parse_line(ctx, line);
    QuestionRecord q;
    q.question_id = require_string(ctx, j, "question_id");
    q.image_id = require_string(ctx, j, "image_id");
    q.gold_answer = require_string(ctx, j, "answer");
    q.relevant_boxes = parse_boxes(ctx, require(ctx, j, "relevant_boxes"), "relevant_boxes");
    reject_duplicate(ctx, seen, q.question_id, "question_id");
    seen.emplace(q.question_id, line_no);
    if (q.relevant_boxes.empty()) {
      ++out.skipped_no_annotation;
      return;
    }
    out.records.push_back(std::move(q));
  });
  std::sort(out.records.begin(), out.records.end(),
            [](const QuestionRecord& a, const QuestionRecord& b) {
              return a.question_id < b.question_id;
            });
  return out;
}

DetectionIndex parse_detections_text(std::string_view text, const std::string& source,
                                     std::size_t max_objects) {
  DetectionIndex out;
  std::map<std::string, std::size_t> seen;
  io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const LineContext ctx{source, line_no};
    const json j = parse_line(ctx, line);
    DetectionSet d;
    d.image_id = require_string(ctx, j, "image_id");
    d.boxes = parse_boxes(ctx, require(ctx, j, "boxes"), "boxes");
    if (d.boxes.size() > max_objects) {
      ctx.fail("boxes", std::to_string(d.boxes.size()) + " boxes exceed max_objects=" +
                            std::to_string(max_objects));
    }
    reject_duplicate(ctx, seen, d.image_id, "image_id");
    seen.emplace(d.image_id, line_no);
    std::string key = d.image_id;
    out.emplace(std::move(key), std::move(d));
  });
  return out;
}

PredictionRun parse_predictions_text(std::string_view text, const std::string& source,
                                     Condition condition, std::string run_label) {
  PredictionRun run;
  run.condition = condition;
  run.run_label = run_label.empty() ? condition.to_string() : std::move(run_label);
  run.source = source;
  std::map<std::string, std::size_t> seen;
  io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const LineContext ctx{source, line_no};
    const json j = parse_line(ctx, line);
    PredictionRecord r;
    r.question_id = require_string(ctx, j, "question_id");
    r.answer = require_string(ctx, j, "answer");
    if (auto it = j.find("prob"); it != j.end() && !it->is_null()) {
      r.predicted_class_prob = as_probability(ctx, *it, "prob");
    }
    if (auto it = j.find("distribution"); it != j.end() && !it->is_null()) {
      if (!it->is_object() || it->empty()) ctx.fail("distribution", "expected a non-empty object");
      std::map<std::string, double> dist;
      double sum = 0.0;
      for (const auto& [name, value] : it->items()) {
        const double p = as_probability(ctx, value, "distribution." + name);
        dist.emplace(name, p);
        sum += p;
      }
      if (std::abs(sum - 1.0) > kDistributionSumTolerance) {
        ctx.fail("distribution", "probabilities sum to " + io::format_decimal(sum) +
                                     ", expected 1 within 1e-4");
      }
      auto own = dist.find(r.answer);
      if (own == dist.end()) ctx.fail("answer", "answer '" + r.answer + "' not in distribution");
      for (const auto& [name, p] : dist) {
        if (p > own->second) {
          ctx.fail("answer", "answer '" + r.answer + "' is not the argmax of distribution ('" +
                                 name + "' is higher)");
        }
      }
      if (r.predicted_class_prob &&
          std::abs(*r.predicted_class_prob - own->second) > kProbabilityMatchTolerance) {
        ctx.fail("prob", "prob disagrees with distribution[answer]");
      }
      r.predicted_class_prob = own->second;
      r.distribution = std::move(dist);
    }
    reject_duplicate(ctx, seen, r.question_id, "question_id");
    seen.emplace(r.question_id, line_no);
    std::string key = r.question_id;
    run.records.emplace(std::move(key), std::move(r));
  });
  return run;
}

ImportanceMap parse_importance_text(std::string_view text, const std::string& source) {
  ImportanceMap out;
  io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const LineContext ctx{source, line_no};
    const json j = parse_line(ctx, line);
    ImportanceVector v;
    v.question_id = require_string(ctx, j, "question_id");
    v.method = require_string(ctx, j, "method");
    const json& scores = require(ctx, j, "scores");
    if (!scores.is_array()) ctx.fail("scores", "expected an array of numbers");
    v.scores.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      v.scores.push_back(as_finite(ctx, scores[i], "scores[" + std::to_string(i) + "]"));
    }
    v.source_line = line_no;
    if (auto it = out.find(v.question_id); it != out.end()) {
      ctx.fail("question_id", "duplicate value '" + v.question_id + "' (first seen on line " +
                                  std::to_string(it->second.source_line) + ")");
    }
    std::string key = v.question_id;
    out.emplace(std::move(key), std::move(v));
  });
  return out;
}

QuestionSet parse_questions(const std::string& path) {
  return parse_questions_text(io::read_file(path), path);
}

DetectionIndex parse_detections(const std::string& path, std::size_t max_objects) {
  return parse_detections_text(io::read_file(path), path, max_objects);
}

PredictionRun parse_predictions(const std::string& path, Condition condition,
                                std::string run_label) {
  return parse_predictions_text(io::read_file(path), path, condition, std::move(run_label));
}

ImportanceMap parse_importance(const std::string& path) {
  return parse_importance_text(io::read_file(path), path);
}

void check_importance_lengths(const ImportanceMap& importance, const QuestionSet& questions,
                              const DetectionIndex& detections, const std::string& source) {
  for (const auto& [qid, v] : importance) {
    const QuestionRecord* q = questions.find(qid);
    if (q == nullptr) {
      throw ValidationError(source, v.source_line, "question_id", "unknown question '" + qid + "'");
    }
    auto d = detections.find(q->image_id);
    const std::size_t expected = d == detections.end() ? 0 : d->second.boxes.size();
    if (v.scores.size() != expected) {
      throw ValidationError(source, v.source_line, "scores",
                            std::to_string(v.scores.size()) + " scores for an image with " +
                                std::to_string(expected) + " detected objects");
    }
  }
}

// ---------------------------------------------------------------------------

std::string to_jsonl(const QuestionRecord& q) {
  ordered_json j;
  j["question_id"] = q.question_id;
  j["image_id"] = q.image_id;
  j["answer"] = q.gold_answer;
  j["relevant_boxes"] = boxes_json(q.relevant_boxes);
  return j.dump();
}

std::string to_jsonl(const DetectionSet& d) {
  ordered_json j;
  j["image_id"] = d.image_id;
  j["boxes"] = boxes_json(d.boxes);
  return j.dump();
}

std::string to_jsonl(const PredictionRecord& p) {
  ordered_json j;
  j["question_id"] = p.question_id;
  j["answer"] = p.answer;
  if (p.predicted_class_prob) j["prob"] = *p.predicted_class_prob;
  if (p.distribution) {
    ordered_json dist = ordered_json::object();
    for (const auto& [name, prob] : *p.distribution) dist[name] = prob;
    j["distribution"] = std::move(dist);
  }
  return j.dump();
}

std::string to_jsonl(const ImportanceVector& v) {
  ordered_json j;
  j["question_id"] = v.question_id;
  j["method"] = v.method;
  j["scores"] = v.scores;
  return j.dump();
}

}  // namespace fpvg
