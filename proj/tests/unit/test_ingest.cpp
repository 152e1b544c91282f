#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fpvg/answer.hpp"
#include "fpvg/error.hpp"
#include "fpvg/ingest.hpp"
#include "fpvg/synthetic.hpp"

using namespace fpvg;

namespace {

// Runs `fn`, expecting a ValidationError at (line, field).
template <typename Fn>
void expect_validation(Fn fn, std::size_t line, const std::string& field) {
  try {
    fn();
    FAIL() << "expected ValidationError on field " << field;
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.file(), "in.jsonl");
    EXPECT_EQ(e.line(), line);
    EXPECT_EQ(e.field(), field);
    EXPECT_NE(e.to_json().find("\"field\":\"" + field + "\""), std::string::npos);
  }
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace

TEST(IngestQuestions, ParsesOneRecord) {
  const auto qs = parse_questions_text(
      R"({"question_id":"q1","image_id":"i1","answer":"red","relevant_boxes":[[0,0,10,10]]})",
      "in.jsonl");
  ASSERT_EQ(qs.records.size(), 1u);
  EXPECT_EQ(qs.records[0].question_id, "q1");
  EXPECT_EQ(qs.records[0].image_id, "i1");
  EXPECT_EQ(qs.records[0].gold_answer, "red");
  EXPECT_EQ(qs.records[0].relevant_boxes[0], (BoundingBox{0, 0, 10, 10}));
  EXPECT_EQ(qs.skipped_no_annotation, 0u);
}

TEST(IngestQuestions, EmptyAnnotationIsSkippedAndCounted) {
  const auto qs = parse_questions_text(
      "{\"question_id\":\"q1\",\"image_id\":\"i1\",\"answer\":\"red\",\"relevant_boxes\":[]}\n"
      "\n"
      "{\"question_id\":\"q2\",\"image_id\":\"i1\",\"answer\":\"red\",\"relevant_boxes\":[[0,0,1,1]]}\n",
      "in.jsonl");
  EXPECT_EQ(qs.records.size(), 1u);
  EXPECT_EQ(qs.skipped_no_annotation, 1u);
  EXPECT_EQ(qs.find("q1"), nullptr);
  ASSERT_NE(qs.find("q2"), nullptr);
}

TEST(IngestQuestions, DegenerateBoxIsHardError) {
  expect_validation(
      [] {
        parse_questions_text(
            R"({"question_id":"q1","image_id":"i1","answer":"red","relevant_boxes":[[10,0,0,10]]})",
            "in.jsonl");
      },
      1, "relevant_boxes[0]");
}

TEST(IngestQuestions, ErrorsCarryLineAndField) {
  const std::string good =
      R"({"question_id":"q1","image_id":"i1","answer":"a","relevant_boxes":[[0,0,1,1]]})";
  expect_validation([&] { parse_questions_text(good + "\n{not json", "in.jsonl"); }, 2, "");
  expect_validation(
      [&] {
        parse_questions_text(good + "\n\n" + good, "in.jsonl");
      },
      3, "question_id");
  expect_validation(
      [] {
        parse_questions_text(R"({"question_id":"q1","image_id":"i1","relevant_boxes":[]})",
                             "in.jsonl");
      },
      1, "answer");
  expect_validation(
      [] {
        parse_questions_text(
            R"({"question_id":"q1","image_id":7,"answer":"a","relevant_boxes":[]})", "in.jsonl");
      },
      1, "image_id");
}

TEST(IngestDetections, MaxObjectsAndDuplicates) {
  const std::string line = R"({"image_id":"i1","boxes":[[0,0,1,1],[1,1,2,2],[2,2,3,3]]})";
  EXPECT_EQ(parse_detections_text(line, "in.jsonl", 3).at("i1").boxes.size(), 3u);
  expect_validation([&] { parse_detections_text(line, "in.jsonl", 2); }, 1, "boxes");
  expect_validation([&] { parse_detections_text(line + "\n" + line, "in.jsonl"); }, 2, "image_id");
}

TEST(IngestPredictions, ProbOnly) {
  const auto run = parse_predictions_text(R"({"question_id":"q1","answer":"red","prob":0.9})",
                                          "in.jsonl", Condition::all());
  const auto* r = run.find("q1");
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->predicted_class_prob, 0.9);
  EXPECT_FALSE(r->distribution.has_value());
  EXPECT_EQ(run.run_label, "all");
}

TEST(IngestPredictions, AnswerMustBeArgmax) {
  expect_validation(
      [] {
        parse_predictions_text(
            R"({"question_id":"q1","answer":"blue","distribution":{"red":0.7,"blue":0.3}})",
            "in.jsonl", Condition::rel());
      },
      1, "answer");
}

TEST(IngestPredictions, DistributionChecks) {
  expect_validation(
      [] {
        parse_predictions_text(
            R"({"question_id":"q1","answer":"red","distribution":{"red":0.7,"blue":0.2}})",
            "in.jsonl", Condition::all());
      },
      1, "distribution");
  expect_validation(
      [] {
        parse_predictions_text(
            R"({"question_id":"q1","answer":"red","prob":0.5,"distribution":{"red":0.7,"blue":0.3}})",
            "in.jsonl", Condition::all());
      },
      1, "prob");
  expect_validation(
      [] {
        parse_predictions_text(R"({"question_id":"q1","answer":"red","prob":1.5})", "in.jsonl",
                               Condition::all());
      },
      1, "prob");
  // Within the 1e-4 tolerance.
  const auto run = parse_predictions_text(
      R"({"question_id":"q1","answer":"red","distribution":{"red":0.70005,"blue":0.3}})",
      "in.jsonl", Condition::all());
  EXPECT_DOUBLE_EQ(*run.find("q1")->predicted_class_prob, 0.70005);
}

TEST(IngestPredictions, ClassProbability) {
  const AnswerEquality eq;
  PredictionRecord dist{"q", "red", 0.7, std::map<std::string, double>{{"red", 0.7}, {"Blue", 0.3}}};
  EXPECT_EQ(class_probability(dist, "red", eq), 0.7);
  EXPECT_EQ(class_probability(dist, "blue", eq), 0.3);
  EXPECT_EQ(class_probability(dist, "green", eq), 0.0);
  PredictionRecord prob_only{"q", "red", 0.9, std::nullopt};
  EXPECT_EQ(class_probability(prob_only, "RED", eq), 0.9);
  EXPECT_EQ(class_probability(prob_only, "blue", eq), std::nullopt);
}

TEST(IngestImportance, LengthContract) {
  const auto qs = parse_questions_text(
      R"({"question_id":"q1","image_id":"i1","answer":"a","relevant_boxes":[[0,0,1,1]]})",
      "q.jsonl");
  const auto det = parse_detections_text(
      R"({"image_id":"i1","boxes":[[0,0,1,1],[0,0,2,2],[0,0,3,3],[0,0,4,4],[0,0,5,5],[0,0,6,6]]})",
      "d.jsonl");
  const auto imp = parse_importance_text(
      R"({"question_id":"q1","method":"attn","scores":[1,2,3,4,5]})", "in.jsonl");
  expect_validation([&] { check_importance_lengths(imp, qs, det, "in.jsonl"); }, 1, "scores");
  const auto ok = parse_importance_text(
      R"({"question_id":"q1","method":"attn","scores":[1,2,3,4,5,6]})", "in.jsonl");
  EXPECT_NO_THROW(check_importance_lengths(ok, qs, det, "in.jsonl"));
}

TEST(IngestCondition, RoundTrip) {
  for (const auto& c : {Condition::all(), Condition::rel(), Condition::irrel(), Condition::loo(17)}) {
    EXPECT_EQ(Condition::parse(c.to_string()), c);
  }
  EXPECT_THROW(Condition::parse("loo:x"), std::invalid_argument);
  EXPECT_THROW(Condition::parse("none"), std::invalid_argument);
}

TEST(IngestProperty, CanonicalRoundTripIsByteIdentical) {
  SyntheticWorldConfig cfg;
  cfg.n_questions = 60;
  const auto world = generate_world(cfg);
  const std::string q_text = world.questions_jsonl();
  const auto qs = parse_questions_text(q_text, "q");
  std::string q_again;
  for (const auto& q : qs.records) q_again += to_jsonl(q) + "\n";
  EXPECT_EQ(q_again, q_text);

  const std::string d_text = world.detections_jsonl();
  const auto det = parse_detections_text(d_text, "d");
  std::string d_again;
  for (const auto& [id, d] : det) d_again += to_jsonl(d) + "\n";
  EXPECT_EQ(d_again, d_text);

  const std::string p_text = R"({"question_id":"q1","answer":"red","prob":0.25})";
  const auto run = parse_predictions_text(p_text, "p", Condition::all());
  EXPECT_EQ(to_jsonl(run.records.begin()->second), p_text);

  const std::string i_text = R"({"question_id":"q1","method":"loo","scores":[0.5,-0.25,0.0]})";
  const auto imp = parse_importance_text(i_text, "i");
  EXPECT_EQ(to_jsonl(imp.begin()->second), i_text);
}

TEST(IngestProperty, LineOrderDoesNotMatter) {
  SyntheticWorldConfig cfg;
  cfg.n_questions = 40;
  const auto world = generate_world(cfg);
  auto q_lines = split_lines(world.questions_jsonl());
  auto d_lines = split_lines(world.detections_jsonl());
  const auto q_ref = parse_questions_text(join_lines(q_lines), "q");
  const auto d_ref = parse_detections_text(join_lines(d_lines), "d");
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(q_lines.begin(), q_lines.end(), rng);
    std::shuffle(d_lines.begin(), d_lines.end(), rng);
    const auto q = parse_questions_text(join_lines(q_lines), "q");
    const auto d = parse_detections_text(join_lines(d_lines), "d");
    ASSERT_EQ(q.records.size(), q_ref.records.size());
    for (std::size_t i = 0; i < q.records.size(); ++i) {
      ASSERT_EQ(to_jsonl(q.records[i]), to_jsonl(q_ref.records[i]));
    }
    ASSERT_EQ(d.size(), d_ref.size());
    for (auto a = d.begin(), b = d_ref.begin(); a != d.end(); ++a, ++b) {
      ASSERT_EQ(to_jsonl(a->second), to_jsonl(b->second));
    }
  }
}
