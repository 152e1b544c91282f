#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fpvg/manifest.hpp"

using namespace fpvg;
using Idx = std::vector<std::size_t>;

namespace {

RelevanceAssignment make(Idx rel, Idx irr, Idx nei) {
  RelevanceAssignment a;
  a.question_id = "q";
  a.relevant = std::move(rel);
  a.irrelevant = std::move(irr);
  a.neither = std::move(nei);
  a.eligible = !a.relevant.empty() && !a.irrelevant.empty();
  return a;
}

// Random partition of 0..n-1 into three ascending lists.
RelevanceAssignment random_assignment(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> bucket(0, 2);
  RelevanceAssignment a;
  a.question_id = "q";
  for (std::size_t i = 0; i < n; ++i) {
    switch (bucket(rng)) {
      case 0: a.relevant.push_back(i); break;
      case 1: a.irrelevant.push_back(i); break;
      default: a.neither.push_back(i); break;
    }
  }
  a.eligible = !a.relevant.empty() && !a.irrelevant.empty();
  return a;
}

}  // namespace

TEST(Manifest, TwoObjects) {
  const auto m = build_condition_manifests(make({0}, {1}, {}));
  EXPECT_EQ(m.all.object_indices, (Idx{0, 1}));
  EXPECT_EQ(m.rel.object_indices, Idx{0});
  EXPECT_EQ(m.irrel.object_indices, Idx{1});
  EXPECT_EQ(m.all.condition, Condition::all());
  EXPECT_EQ(m.irrel.condition, Condition::irrel());
}

TEST(Manifest, NeitherObjectsOnlyInAll) {
  const auto m = build_condition_manifests(make({2}, {0, 3}, {1}));
  EXPECT_EQ(m.all.object_indices, (Idx{0, 1, 2, 3}));
  EXPECT_EQ(m.rel.object_indices, Idx{2});
  EXPECT_EQ(m.irrel.object_indices, (Idx{0, 3}));
}

TEST(Manifest, IneligibleIsRejected) {
  EXPECT_THROW(build_condition_manifests(make({}, {0}, {})), std::invalid_argument);
}

TEST(LooManifest, Definition) {
  const auto three = build_loo_manifests(make({0}, {1}, {2}));
  ASSERT_EQ(three.size(), 3u);
  EXPECT_EQ(three[0].object_indices, (Idx{1, 2}));
  EXPECT_EQ(three[1].object_indices, (Idx{0, 2}));
  EXPECT_EQ(three[2].object_indices, (Idx{0, 1}));
  EXPECT_EQ(three[1].condition, Condition::loo(1));

  const auto one = build_loo_manifests(make({0}, {}, {}));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_TRUE(one[0].object_indices.empty());

  EXPECT_TRUE(build_loo_manifests(make({}, {}, {})).empty());
}

TEST(LooManifest, HundredObjects) {
  RelevanceAssignment a;
  for (std::size_t i = 0; i < 100; ++i) (i % 2 ? a.relevant : a.irrelevant).push_back(i);
  const auto loo = build_loo_manifests(a);
  ASSERT_EQ(loo.size(), 100u);
  for (const auto& m : loo) EXPECT_EQ(m.object_indices.size(), 99u);
}

TEST(ManifestIo, RoundTrip) {
  const auto m = build_condition_manifests(make({2}, {0, 3}, {1}));
  const auto loo = build_loo_manifests(make({2}, {0, 3}, {1}));
  std::string text = to_jsonl(m.all) + "\n" + to_jsonl(m.rel) + "\n" + to_jsonl(m.irrel) + "\n";
  for (const auto& l : loo) text += to_jsonl(l) + "\n";
  EXPECT_EQ(to_jsonl(loo[1]),
            R"({"question_id":"q","condition":"loo","loo_index":1,"object_indices":[0,2,3]})");
  const auto parsed = parse_manifests_text(text, "m");
  ASSERT_EQ(parsed.size(), 7u);
  std::string again;
  for (const auto& p : parsed) again += to_jsonl(p) + "\n";
  EXPECT_EQ(again, text);
}

TEST(ManifestProperty, SubsetDisjointAndLooCount) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> size(0, 30);
  for (int t = 0; t < 2000; ++t) {
    const auto a = random_assignment(rng, size(rng));
    const std::size_t n = a.object_count();
    const auto loo = build_loo_manifests(a);
    std::size_t removed = 0;
    for (const auto& m : loo) removed += n - m.object_indices.size();
    ASSERT_EQ(removed, n);
    ASSERT_EQ(loo.size(), n);
    if (!a.eligible) continue;
    const auto c = build_condition_manifests(a);
    Idx rel_irr;
    std::set_union(c.rel.object_indices.begin(), c.rel.object_indices.end(),
                   c.irrel.object_indices.begin(), c.irrel.object_indices.end(),
                   std::back_inserter(rel_irr));
    ASSERT_TRUE(std::includes(c.all.object_indices.begin(), c.all.object_indices.end(),
                              rel_irr.begin(), rel_irr.end()));
    ASSERT_EQ(rel_irr.size(), c.rel.object_indices.size() + c.irrel.object_indices.size());
    // Pure function: a second call serializes identically.
    const auto again = build_condition_manifests(a);
    ASSERT_EQ(to_jsonl(again.all) + to_jsonl(again.rel) + to_jsonl(again.irrel),
              to_jsonl(c.all) + to_jsonl(c.rel) + to_jsonl(c.irrel));
  }
}
