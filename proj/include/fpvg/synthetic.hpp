#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpvg/ingest.hpp"
#include "fpvg/manifest.hpp"

namespace fpvg {

// Answer the grounded oracle gives when no relevant object is visible. It is
// never part of the answer vocabulary.
inline constexpr std::string_view kNoEvidenceAnswer = "\xE2\x88\x85";  // U+2205

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Synthetic world layout: annotated objects live in the left half of each
// image (one horizontal band per annotation slot); irrelevant detections live
// in the right half, so they never cover an annotation.
struct SyntheticWorldConfig {
  std::size_t n_questions = 100;
  std::size_t min_objects = 4;  // per image, including relevant and irrelevant ones
  std::size_t max_objects = 12;
  std::size_t answer_vocab_size = 20;
  std::uint64_t seed = 7;
  double image_width = 640.0;
  double image_height = 480.0;
  double min_box = 16.0;
  double max_box = 96.0;
  std::size_t max_annotations = 3;
  double gold_match_rate = 0.5;  // P(gold == full-evidence oracle answer)

  // Throws std::invalid_argument for out-of-range values and GenerationError
  // when boxes cannot be placed under the layout constraints.
  void validate() const;
};

struct SyntheticWorld {
  SyntheticWorldConfig config;
  std::vector<std::string> vocabulary;
  std::vector<QuestionRecord> questions;  // ascending question_id
  std::vector<DetectionSet> detections;   // detections[i] belongs to questions[i]
  // Detected objects placed to match an annotation, per question (ascending).
  std::vector<std::vector<std::size_t>> relevant_objects;

  // Index into `questions`, or npos.
  std::size_t find(std::string_view question_id) const;

  std::string questions_jsonl() const;
  std::string detections_jsonl() const;
};

// Deterministic in the config: same config, byte-identical JSONL. Question j
// draws from its own stream derived from (seed, j), so growing n_questions
// leaves earlier questions untouched.
SyntheticWorld generate_world(const SyntheticWorldConfig& config);

struct SyntheticModel {
  enum class Kind { kGroundedOracle, kBlindPrior, kUniformRandom, kMixed };

  Kind kind = Kind::kGroundedOracle;
  double alpha = 0.0;  // kMixed: probability of grounded behavior

  static SyntheticModel grounded_oracle() { return {Kind::kGroundedOracle, 0.0}; }
  static SyntheticModel blind_prior() { return {Kind::kBlindPrior, 0.0}; }
  static SyntheticModel uniform_random() { return {Kind::kUniformRandom, 0.0}; }
  static SyntheticModel mixed(double alpha);  // throws std::invalid_argument unless 0 <= alpha <= 1

  // "grounded_oracle", "blind_prior", "uniform_random", "mixed".
  std::string name() const;
  static SyntheticModel parse(std::string_view name, double alpha = 0.0);
};

// Whether the mixed model answers question `question_id` like the grounded
// oracle. Seeded per question from the world seed.
bool mixed_uses_grounded(const SyntheticWorld& world, std::string_view question_id, double alpha);

// One prediction run per condition present in `manifests`. Each record holds a
// full distribution over vocabulary ∪ {∅}: 0.9 on the answer and the rest
// spread uniformly. Throws ValidationError for manifests that reference an
// unknown question or an out-of-range object index.
std::map<Condition, PredictionRun> run_model(const SyntheticModel& model,
                                             std::span<const Manifest> manifests,
                                             const SyntheticWorld& world);

std::string predictions_jsonl(const PredictionRun& run);

}  // namespace fpvg
