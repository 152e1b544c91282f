#include "fpvg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <utility>

#include "fpvg/error.hpp"
#include "fpvg/hash.hpp"

namespace fpvg {
namespace {

constexpr double kPeakProbability = 0.9;

// Engine output is fixed by the standard; the mappings below avoid the
// implementation-defined std:: distributions so worlds match across platforms.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  // Inclusive integer range.
  double integer(double lo, double hi) {
    const auto a = static_cast<std::int64_t>(std::ceil(lo));
    const auto b = static_cast<std::int64_t>(std::floor(hi));
    return static_cast<double>(a + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(b - a + 1))));
  }

 private:
  std::mt19937_64 engine_;
};

std::string padded(const char* prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

double band_height(const SyntheticWorldConfig& c) {
  return std::floor(c.image_height / static_cast<double>(c.max_annotations));
}

double half_width(const SyntheticWorldConfig& c) { return std::floor(c.image_width / 2.0); }

std::string join_indices(std::span<const std::size_t> indices) {
  std::string s;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(indices[i]);
  }
  return s;
}

std::string oracle_answer(const std::vector<std::string>& vocab, std::string_view question_id,
                          std::span<const std::size_t> present_relevant) {
  if (present_relevant.empty()) return std::string(kNoEvidenceAnswer);
  const std::string key = std::string(question_id) + ":" + join_indices(present_relevant);
  return vocab[fnv1a64(key) % vocab.size()];
}

std::string prior_answer(const std::vector<std::string>& vocab, std::string_view question_id) {
  return vocab[fnv1a64(std::string(question_id) + "#prior") % vocab.size()];
}

BoundingBox jittered(const BoundingBox& b, Stream& rng, const SyntheticWorldConfig& c) {
  const double d = std::floor(0.05 * std::min(b.width(), b.height()));
  auto shift = [&](double v, double hi) { return std::clamp(v + rng.integer(-d, d), 0.0, hi); };
  return {shift(b.x1, c.image_width), shift(b.y1, c.image_height), shift(b.x2, c.image_width),
          shift(b.y2, c.image_height)};
}

// A 40% slice of the annotation along one side: IoU with it stays in
// [0.4, 0.5] while it still covers more than a quarter of it.
BoundingBox slice(const BoundingBox& b, std::uint64_t side) {
  const double sw = std::ceil(0.4 * b.width());
  const double sh = std::ceil(0.4 * b.height());
  switch (side) {
    case 0: return {b.x1, b.y1, b.x1 + sw, b.y2};
    case 1: return {b.x2 - sw, b.y1, b.x2, b.y2};
    case 2: return {b.x1, b.y1, b.x2, b.y1 + sh};
    default: return {b.x1, b.y2 - sh, b.x2, b.y2};
  }
}

}  // namespace

void SyntheticWorldConfig::validate() const {
  if (min_objects < 2) throw std::invalid_argument("min_objects must be at least 2");
  if (max_objects < min_objects) throw std::invalid_argument("max_objects < min_objects");
  if (max_objects > kDefaultMaxObjects) {
    throw std::invalid_argument("max_objects exceeds the detection limit of 100");
  }
  if (answer_vocab_size < 2) throw std::invalid_argument("answer_vocab_size must be at least 2");
  if (max_annotations < 1) throw std::invalid_argument("max_annotations must be at least 1");
  if (!(gold_match_rate >= 0.0 && gold_match_rate <= 1.0)) {
    throw std::invalid_argument("gold_match_rate must lie in [0, 1]");
  }
  if (!(image_width > 0.0 && image_height > 0.0 && min_box > 0.0 && max_box >= min_box)) {
    throw std::invalid_argument("image and box sizes must be positive with max_box >= min_box");
  }
  if (min_box < 4.0) throw GenerationError("min_box below 4 px leaves no room for partial boxes");
  if (std::ceil(min_box) > band_height(*this)) {
    throw GenerationError("min_box does not fit the per-annotation band height");
  }
  if (std::ceil(min_box) > half_width(*this)) {
    throw GenerationError("min_box does not fit half the image width");
  }
}

std::size_t SyntheticWorld::find(std::string_view question_id) const {
  auto it = std::lower_bound(
      questions.begin(), questions.end(), question_id,
      [](const QuestionRecord& q, std::string_view id) { return q.question_id < id; });
  if (it == questions.end() || it->question_id != question_id) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - questions.begin());
}

std::string SyntheticWorld::questions_jsonl() const {
  std::string out;
  for (const auto& q : questions) out += to_jsonl(q) + "\n";
  return out;
}

std::string SyntheticWorld::detections_jsonl() const {
  std::string out;
  for (const auto& d : detections) out += to_jsonl(d) + "\n";
  return out;
}

SyntheticWorld generate_world(const SyntheticWorldConfig& c) {
  c.validate();
  SyntheticWorld w;
  w.config = c;
  for (std::size_t v = 0; v < c.answer_vocab_size; ++v) w.vocabulary.push_back(padded("a", v, 3));

  const double bh = band_height(c);
  const double hw = half_width(c);
  const double box_hi_w = std::min(c.max_box, hw);
  const double box_hi_h = std::min(c.max_box, bh);

  for (std::size_t j = 0; j < c.n_questions; ++j) {
    Stream rng(splitmix64(c.seed ^ splitmix64(j)));
    QuestionRecord q;
    q.question_id = padded("q", j, 6);
    q.image_id = padded("img", j, 6);

    const auto total = static_cast<std::size_t>(
        rng.integer(static_cast<double>(c.min_objects), static_cast<double>(c.max_objects)));
    const std::size_t n_irrelevant = total / 2;
    const std::size_t n_other = total - n_irrelevant;
    const auto n_annotations = static_cast<std::size_t>(
        rng.integer(1.0, static_cast<double>(std::min(c.max_annotations, n_other))));

    // Annotation slots are distinct bands, so annotated boxes never overlap.
    std::vector<std::size_t> bands(c.max_annotations);
    for (std::size_t b = 0; b < bands.size(); ++b) bands[b] = b;
    for (std::size_t b = bands.size(); b > 1; --b) std::swap(bands[b - 1], bands[rng.below(b)]);

    for (std::size_t a = 0; a < n_annotations; ++a) {
      const double top = static_cast<double>(bands[a]) * bh;
      const double bw = rng.integer(c.min_box, box_hi_w);
      const double bhgt = rng.integer(c.min_box, box_hi_h);
      const double x1 = rng.integer(0.0, hw - bw);
      const double y1 = rng.integer(top, top + bh - bhgt);
      q.relevant_boxes.push_back({x1, y1, x1 + bw, y1 + bhgt});
    }

    struct Placed {
      BoundingBox box;
      bool relevant;
    };
    std::vector<Placed> objects;
    for (const auto& ann : q.relevant_boxes) objects.push_back({jittered(ann, rng, c), true});
    for (std::size_t k = n_annotations; k < n_other; ++k) {
      const auto& ann = q.relevant_boxes[rng.below(n_annotations)];
      if (rng.below(2) == 0) {
        objects.push_back({jittered(ann, rng, c), true});
      } else {
        objects.push_back({slice(ann, rng.below(4)), false});
      }
    }
    for (std::size_t k = 0; k < n_irrelevant; ++k) {
      const double bw = rng.integer(c.min_box, box_hi_w);
      const double bhgt = rng.integer(c.min_box, std::min(c.max_box, c.image_height));
      const double x1 = rng.integer(hw, c.image_width - bw);
      const double y1 = rng.integer(0.0, c.image_height - bhgt);
      objects.push_back({{x1, y1, x1 + bw, y1 + bhgt}, false});
    }
    for (std::size_t k = objects.size(); k > 1; --k) std::swap(objects[k - 1], objects[rng.below(k)]);

    DetectionSet d;
    d.image_id = q.image_id;
    std::vector<std::size_t> relevant;
    for (std::size_t k = 0; k < objects.size(); ++k) {
      d.boxes.push_back(objects[k].box);
      if (objects[k].relevant) relevant.push_back(k);
    }

    if (rng.uniform01() < c.gold_match_rate) {
      q.gold_answer = oracle_answer(w.vocabulary, q.question_id, relevant);
    } else {
      q.gold_answer = w.vocabulary[rng.below(w.vocabulary.size())];
    }

    w.questions.push_back(std::move(q));
    w.detections.push_back(std::move(d));
    w.relevant_objects.push_back(std::move(relevant));
  }
  return w;
}

// ---------------------------------------------------------------------------

SyntheticModel SyntheticModel::mixed(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  return {Kind::kMixed, alpha};
}

std::string SyntheticModel::name() const {
  switch (kind) {
    case Kind::kGroundedOracle: return "grounded_oracle";
    case Kind::kBlindPrior: return "blind_prior";
    case Kind::kUniformRandom: return "uniform_random";
    case Kind::kMixed: return "mixed";
  }
  return "?";
}

SyntheticModel SyntheticModel::parse(std::string_view name, double alpha) {
  if (name == "grounded_oracle") return grounded_oracle();
  if (name == "blind_prior") return blind_prior();
  if (name == "uniform_random") return uniform_random();
  if (name == "mixed") return mixed(alpha);
  throw std::invalid_argument("unknown synthetic model '" + std::string(name) + "'");
}

bool mixed_uses_grounded(const SyntheticWorld& world, std::string_view question_id, double alpha) {
  Stream rng(derive_seed(world.config.seed ^ 0x6d69786564ULL, question_id));
  return rng.uniform01() < alpha;
}

std::map<Condition, PredictionRun> run_model(const SyntheticModel& model,
                                             std::span<const Manifest> manifests,
                                             const SyntheticWorld& world) {
  const auto& vocab = world.vocabulary;
  const double floor_prob = (1.0 - kPeakProbability) / static_cast<double>(vocab.size());

  std::map<Condition, PredictionRun> runs;
  for (const Manifest& m : manifests) {
    const std::size_t qi = world.find(m.question_id);
    if (qi == static_cast<std::size_t>(-1)) {
      throw ValidationError("", 0, "question_id",
                            "manifest references unknown question '" + m.question_id + "'");
    }
    const auto& relevant = world.relevant_objects[qi];
    const std::size_t n_objects = world.detections[qi].boxes.size();
    std::vector<std::size_t> present;
    for (std::size_t idx : m.object_indices) {
      if (idx >= n_objects) {
        throw ValidationError("", 0, "object_indices",
                              "index " + std::to_string(idx) + " out of range for question '" +
                                  m.question_id + "'");
      }
      if (std::binary_search(relevant.begin(), relevant.end(), idx)) present.push_back(idx);
    }

    std::string answer;
    switch (model.kind) {
      case SyntheticModel::Kind::kGroundedOracle:
        answer = oracle_answer(vocab, m.question_id, present);
        break;
      case SyntheticModel::Kind::kBlindPrior:
        answer = prior_answer(vocab, m.question_id);
        break;
      case SyntheticModel::Kind::kUniformRandom: {
        Stream rng(derive_seed(derive_seed(world.config.seed, m.question_id),
                               m.condition.to_string()));
        answer = vocab[rng.below(vocab.size())];
        break;
      }
      case SyntheticModel::Kind::kMixed:
        answer = mixed_uses_grounded(world, m.question_id, model.alpha)
                     ? oracle_answer(vocab, m.question_id, present)
                     : prior_answer(vocab, m.question_id);
        break;
    }

    PredictionRecord r;
    r.question_id = m.question_id;
    r.answer = answer;
    std::map<std::string, double> dist;
    for (const auto& v : vocab) dist.emplace(v, floor_prob);
    dist.emplace(std::string(kNoEvidenceAnswer), floor_prob);
    dist[answer] = kPeakProbability;
    r.predicted_class_prob = kPeakProbability;
    r.distribution = std::move(dist);

    auto [it, inserted] = runs.try_emplace(m.condition);
    if (inserted) {
      it->second.condition = m.condition;
      it->second.run_label = model.name() + "/" + m.condition.to_string();
      it->second.source = it->second.run_label;
    }
    it->second.records.insert_or_assign(m.question_id, std::move(r));
  }
  return runs;
}

std::string predictions_jsonl(const PredictionRun& run) {
  std::string out;
  for (const auto& [qid, r] : run.records) out += to_jsonl(r) + "\n";
  return out;
}

}  // namespace fpvg
