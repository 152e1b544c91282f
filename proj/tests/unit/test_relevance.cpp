#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fpvg/error.hpp"
#include "fpvg/relevance.hpp"
#include "oracles.hpp"

using namespace fpvg;
using fpvg::testing::GridBox;

namespace {

using Idx = std::vector<std::size_t>;

QuestionRecord question(std::vector<BoundingBox> annotated) {
  return {"q", "img", "gold", std::move(annotated)};
}

DetectionSet detections(std::vector<BoundingBox> boxes) { return {"img", std::move(boxes)}; }

RelevanceAssignment make(std::string id, Idx rel, Idx irr, Idx nei) {
  RelevanceAssignment a;
  a.question_id = std::move(id);
  a.relevant = std::move(rel);
  a.irrelevant = std::move(irr);
  a.neither = std::move(nei);
  a.eligible = !a.relevant.empty() && !a.irrelevant.empty();
  return a;
}

// Random instance on a small integer grid: 1-3 annotations and 1-12 detections,
// half of them jittered copies of an annotation.
std::pair<std::vector<GridBox>, std::vector<GridBox>> random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_ann(1, 3), n_det(1, 12), coin(0, 1);
  std::vector<GridBox> ann, det;
  const int na = n_ann(rng), nd = n_det(rng);
  for (int i = 0; i < na; ++i) ann.push_back(fpvg::testing::random_grid_box(rng, 40));
  for (int i = 0; i < nd; ++i) {
    if (coin(rng)) {
      det.push_back(fpvg::testing::jittered_grid_box(rng, ann[std::size_t(i) % ann.size()], 4));
    } else {
      det.push_back(fpvg::testing::random_grid_box(rng, 40));
    }
  }
  return {ann, det};
}

std::vector<BoundingBox> to_boxes(const std::vector<GridBox>& g) {
  std::vector<BoundingBox> out;
  for (const auto& b : g) out.push_back(b.to_box());
  return out;
}

}  // namespace

TEST(Relevance, ExactMatchAndDisjoint) {
  const auto a = assign_relevance(question({{0, 0, 10, 10}}),
                                  detections({{0, 0, 10, 10}, {50, 50, 60, 60}}), {});
  EXPECT_EQ(a.relevant, Idx{0});
  EXPECT_EQ(a.irrelevant, Idx{1});
  EXPECT_TRUE(a.neither.empty());
  EXPECT_TRUE(a.eligible);
}

TEST(Relevance, IouJustAboveThreshold) {
  // iou = 60 / 100 = 0.6
  const auto a = assign_relevance(question({{0, 0, 10, 10}}),
                                  detections({{0, 0, 6, 10}, {50, 50, 60, 60}}), {});
  EXPECT_EQ(a.relevant, Idx{0});
  EXPECT_EQ(a.irrelevant, Idx{1});
}

TEST(Relevance, PartialOverlapIsNeither) {
  // iou 0.4 and 0.3, coverage 0.4 and 0.3
  const auto a =
      assign_relevance(question({{0, 0, 10, 10}}), detections({{0, 0, 4, 10}, {0, 0, 3, 10}}), {});
  EXPECT_TRUE(a.relevant.empty());
  EXPECT_TRUE(a.irrelevant.empty());
  EXPECT_EQ(a.neither, (Idx{0, 1}));
  EXPECT_FALSE(a.eligible);
}

TEST(Relevance, ThresholdsAreStrictAndInclusive) {
  // IoU exactly 0.5 is not relevant; coverage exactly 0.25 is irrelevant.
  const auto a = assign_relevance(question({{0, 0, 10, 10}}),
                                  detections({{0, 0, 5, 10}, {0, 0, 10, 2.5}}), {});
  EXPECT_TRUE(a.relevant.empty());
  EXPECT_EQ(a.neither, Idx{0});
  EXPECT_EQ(a.irrelevant, Idx{1});
}

TEST(Relevance, ImageMismatchIsRejected) {
  DetectionSet other{"other", {{0, 0, 1, 1}}};
  EXPECT_THROW(assign_relevance(question({{0, 0, 1, 1}}), other, {}), std::invalid_argument);
}

TEST(Relevance, ConfigValidation) {
  RelevanceConfig c;
  EXPECT_NO_THROW(c.validate());
  c.iou_threshold = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.coverage_threshold = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.max_objects = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(FilterEligible, HandEnumeratedDrops) {
  const std::vector<RelevanceAssignment> as{
      make("q3", {}, {0}, {}),   // no relevant
      make("q1", {0}, {1}, {}),  // eligible
      make("q2", {0}, {}, {1}),  // no irrelevant
  };
  const auto e = filter_eligible(as);
  EXPECT_EQ(e.question_ids, std::vector<std::string>{"q1"});
  EXPECT_EQ(e.drops.no_relevant_detected, 1u);
  EXPECT_EQ(e.drops.no_irrelevant_detected, 1u);
  EXPECT_EQ(e.drops.no_detections, 0u);
  EXPECT_EQ(e.drops.total_eligible, 1u);
}

TEST(FilterEligible, EmptyAndAllEligible) {
  const auto none = filter_eligible({});
  EXPECT_TRUE(none.question_ids.empty());
  EXPECT_EQ(none.drops.total_eligible, 0u);

  const std::vector<RelevanceAssignment> as{make("b", {0}, {1}, {}), make("a", {1}, {0}, {2}),
                                            empty_assignment("c")};
  const auto e = filter_eligible(as);
  EXPECT_EQ(e.question_ids, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(e.drops.no_detections, 1u);
  EXPECT_EQ(e.drops.no_relevant_detected + e.drops.no_irrelevant_detected, 0u);
}

TEST(AssignmentIo, RoundTripAndPartitionChecks) {
  const auto a = make("q1", {2}, {0, 3}, {1});
  const std::string line = to_jsonl(a);
  EXPECT_EQ(line, R"({"question_id":"q1","relevant":[2],"irrelevant":[0,3],"neither":[1],"eligible":true})");
  const auto back = parse_assignments_text(line, "a");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(to_jsonl(back[0]), line);

  EXPECT_THROW(parse_assignments_text(
                   R"({"question_id":"q","relevant":[0],"irrelevant":[0],"neither":[],"eligible":true})", "a"),
               ValidationError);
  EXPECT_THROW(parse_assignments_text(
                   R"({"question_id":"q","relevant":[0],"irrelevant":[2],"neither":[],"eligible":true})", "a"),
               ValidationError);
  EXPECT_THROW(parse_assignments_text(
                   R"({"question_id":"q","relevant":[0],"irrelevant":[],"neither":[1],"eligible":true})", "a"),
               ValidationError);
  EXPECT_THROW(parse_assignments_text(line + "\n" + line, "a"), ValidationError);
}

TEST(RelevanceProperty, MatchesBruteForceOracle) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 2000; ++t) {
    const auto [ann, det] = random_instance(rng);
    const auto a = assign_relevance(question(to_boxes(ann)), detections(to_boxes(det)), {});
    std::set<std::size_t> rel, irr, nei;
    for (std::size_t i = 0; i < det.size(); ++i) {
      bool is_rel = false, all_low = true;
      for (const auto& g : ann) {
        is_rel |= fpvg::testing::oracle_iou(det[i], g) > 0.5;
        all_low &= fpvg::testing::oracle_coverage(det[i], g) <= 0.25;
      }
      (is_rel ? rel : all_low ? irr : nei).insert(i);
    }
    ASSERT_EQ(a.relevant, Idx(rel.begin(), rel.end()));
    ASSERT_EQ(a.irrelevant, Idx(irr.begin(), irr.end()));
    ASSERT_EQ(a.neither, Idx(nei.begin(), nei.end()));
    ASSERT_EQ(a.eligible, !rel.empty() && !irr.empty());
  }
}

TEST(RelevanceProperty, ThresholdMonotonicity) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> thr(0.05, 0.95);
  for (int t = 0; t < 1500; ++t) {
    const auto [ann, det] = random_instance(rng);
    const auto q = question(to_boxes(ann));
    const auto d = detections(to_boxes(det));
    RelevanceConfig lo, hi;
    lo.iou_threshold = thr(rng);
    lo.coverage_threshold = thr(rng);
    hi = lo;
    hi.coverage_threshold = std::min(0.99, lo.coverage_threshold + 0.1);
    const auto base = assign_relevance(q, d, lo);
    const auto more_cov = assign_relevance(q, d, hi);
    ASSERT_TRUE(std::includes(more_cov.irrelevant.begin(), more_cov.irrelevant.end(),
                              base.irrelevant.begin(), base.irrelevant.end()));
    hi = lo;
    hi.iou_threshold = std::min(0.99, lo.iou_threshold + 0.1);
    const auto more_iou = assign_relevance(q, d, hi);
    ASSERT_TRUE(std::includes(base.relevant.begin(), base.relevant.end(),
                              more_iou.relevant.begin(), more_iou.relevant.end()));
  }
}

TEST(RelevanceProperty, AnnotationOrderIrrelevant) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 1000; ++t) {
    auto [ann, det] = random_instance(rng);
    const auto d = detections(to_boxes(det));
    const auto a = assign_relevance(question(to_boxes(ann)), d, {});
    std::shuffle(ann.begin(), ann.end(), rng);
    const auto b = assign_relevance(question(to_boxes(ann)), d, {});
    ASSERT_EQ(to_jsonl(a), to_jsonl(b));
  }
}
