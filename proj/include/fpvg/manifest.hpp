#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fpvg/ingest.hpp"
#include "fpvg/relevance.hpp"

namespace fpvg {

// The object rows a model runner must feed for one question under one test
// condition. Indices are ascending and refer to the image's DetectionSet.
struct Manifest {
  std::string question_id;
  Condition condition;
  std::vector<std::size_t> object_indices;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

struct ConditionManifests {
  Manifest all;
  Manifest rel;
  Manifest irrel;
};

// Throws std::invalid_argument for an ineligible assignment.
ConditionManifests build_condition_manifests(const RelevanceAssignment& assignment);

// One manifest per object; manifest k omits index k. Empty for N = 0.
std::vector<Manifest> build_loo_manifests(const RelevanceAssignment& assignment);

// {"question_id","condition","loo_index"?,"object_indices"}
std::string to_jsonl(const Manifest& m);
std::vector<Manifest> parse_manifests_text(std::string_view text, const std::string& source);
std::vector<Manifest> parse_manifests(const std::string& path);

}  // namespace fpvg
