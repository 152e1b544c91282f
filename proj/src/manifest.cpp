#include "fpvg/manifest.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "fpvg/error.hpp"
#include "fpvg/io.hpp"
#include "json.hpp"

namespace fpvg {

ConditionManifests build_condition_manifests(const RelevanceAssignment& assignment) {
  if (!assignment.eligible) {
    throw std::invalid_argument("question '" + assignment.question_id +
                                "' is not eligible; filter assignments before building manifests");
  }
  ConditionManifests out;
  out.all.question_id = assignment.question_id;
  out.all.condition = Condition::all();
  out.all.object_indices.resize(assignment.object_count());
  std::iota(out.all.object_indices.begin(), out.all.object_indices.end(), std::size_t{0});

  out.rel = {assignment.question_id, Condition::rel(), assignment.relevant};
  out.irrel = {assignment.question_id, Condition::irrel(), assignment.irrelevant};
  return out;
}

std::vector<Manifest> build_loo_manifests(const RelevanceAssignment& assignment) {
  const std::size_t n = assignment.object_count();
  std::vector<Manifest> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Manifest m{assignment.question_id, Condition::loo(k), {}};
    m.object_indices.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != k) m.object_indices.push_back(i);
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::string to_jsonl(const Manifest& m) {
  nlohmann::ordered_json j;
  j["question_id"] = m.question_id;
  switch (m.condition.kind) {
    case Condition::Kind::kAll: j["condition"] = "all"; break;
    case Condition::Kind::kRel: j["condition"] = "rel"; break;
    case Condition::Kind::kIrrel: j["condition"] = "irrel"; break;
    case Condition::Kind::kLoo:
      j["condition"] = "loo";
      j["loo_index"] = m.condition.loo_index;
      break;
  }
  j["object_indices"] = m.object_indices;
  return j.dump();
}

std::vector<Manifest> parse_manifests_text(std::string_view text, const std::string& source) {
  std::vector<Manifest> out;
  io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    auto fail = [&](const char* field, const std::string& msg) {
      throw ValidationError(source, line_no, field, msg);
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail("", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) fail("", "expected a JSON object");
    Manifest m;
    auto qid = j.find("question_id");
    if (qid == j.end() || !qid->is_string()) fail("question_id", "expected a string");
    m.question_id = qid->get<std::string>();

    auto cond = j.find("condition");
    if (cond == j.end() || !cond->is_string()) fail("condition", "expected a string");
    const std::string c = cond->get<std::string>();
    if (c == "loo") {
      auto k = j.find("loo_index");
      if (k == j.end() || !k->is_number_unsigned()) {
        fail("loo_index", "required non-negative integer for condition 'loo'");
      }
      m.condition = Condition::loo(k->get<std::size_t>());
    } else if (c == "all" || c == "rel" || c == "irrel") {
      m.condition = Condition::parse(c);
    } else {
      fail("condition", "unknown condition '" + c + "'");
    }

    auto idx = j.find("object_indices");
    if (idx == j.end() || !idx->is_array()) fail("object_indices", "expected an array");
    for (const auto& v : *idx) {
      if (!v.is_number_unsigned()) fail("object_indices", "indices must be non-negative integers");
      m.object_indices.push_back(v.get<std::size_t>());
    }
    for (std::size_t i = 1; i < m.object_indices.size(); ++i) {
      if (m.object_indices[i] <= m.object_indices[i - 1]) {
        fail("object_indices", "indices must be strictly ascending");
      }
    }
    out.push_back(std::move(m));
  });
  return out;
}

std::vector<Manifest> parse_manifests(const std::string& path) {
  return parse_manifests_text(io::read_file(path), path);
}

}  // namespace fpvg
