#include <gtest/gtest.h>

#include <array>
#include <random>
#include <string>
#include <vector>

#include "fpvg/error.hpp"
#include "fpvg/metrics.hpp"

using namespace fpvg;

namespace {

struct Row {
  std::string id, gold, all, rel, irrel;
};

struct Runs {
  PredictionRun all, rel, irrel;
  ConditionRuns view() const { return {all, rel, irrel}; }
};

Runs make_runs(const std::vector<Row>& rows) {
  Runs r;
  r.all.run_label = "all";
  r.rel.run_label = "rel";
  r.irrel.run_label = "irrel";
  for (const auto& row : rows) {
    r.all.records[row.id] = {row.id, row.all, std::nullopt, std::nullopt};
    r.rel.records[row.id] = {row.id, row.rel, std::nullopt, std::nullopt};
    r.irrel.records[row.id] = {row.id, row.irrel, std::nullopt, std::nullopt};
  }
  return r;
}

std::vector<QuestionOutcome> evaluate_all(const std::vector<Row>& rows) {
  const Runs runs = make_runs(rows);
  std::vector<QuestionOutcome> out;
  for (const auto& row : rows) out.push_back(evaluate_question(row.id, row.gold, runs.view()));
  return out;
}

}  // namespace

TEST(FpvgQuestion, Examples) {
  EXPECT_TRUE(fpvg_question("red", "red", "blue"));
  EXPECT_FALSE(fpvg_question("red", "red", "red"));
  EXPECT_FALSE(fpvg_question("red", "blue", "blue"));
  EXPECT_TRUE(mod_fpvg_question("red", "red"));
  EXPECT_FALSE(mod_fpvg_question("red", "blue"));
  // The blind model: identical answers everywhere.
  EXPECT_TRUE(mod_fpvg_question("red", "red"));
  EXPECT_FALSE(fpvg_question("red", "red", "red"));
}

TEST(FpvgQuestion, NormalizationApplies) {
  EXPECT_TRUE(fpvg_question("Red", " red", "blue"));
  EXPECT_FALSE(fpvg_question("Red", " red", "blue", AnswerEquality(AnswerMode::kStrict)));
}

TEST(FpvgQuestion, AllFiveEqualityPatterns) {
  // Patterns of (a_all, a_rel, a_irrel) up to renaming.
  struct Case {
    const char *a, *r, *i;
    bool fpvg, mod;
  };
  const std::array<Case, 5> cases{{
      {"x", "x", "x", false, true},
      {"x", "x", "y", true, true},
      {"x", "y", "x", false, false},
      {"x", "y", "y", false, false},
      {"x", "y", "z", false, false},
  }};
  for (const auto& c : cases) {
    EXPECT_EQ(fpvg_question(c.a, c.r, c.i), c.fpvg) << c.a << c.r << c.i;
    EXPECT_EQ(mod_fpvg_question(c.a, c.r), c.mod) << c.a << c.r;
  }
}

TEST(Categorize, FigureCases) {
  const auto runs = make_runs({{"a", "red", "red", "red", "blue"},
                               {"b", "green", "red", "red", "blue"},
                               {"c", "red", "red", "red", "red"},
                               {"d", "green", "red", "blue", "blue"}});
  EXPECT_EQ(categorize("a", "red", runs.view()).label(), "plus_correct");
  EXPECT_EQ(categorize("b", "green", runs.view()).label(), "plus_incorrect");
  EXPECT_EQ(categorize("c", "red", runs.view()).label(), "minus_correct");
  EXPECT_EQ(categorize("d", "green", runs.view()).label(), "minus_incorrect");
}

TEST(Categorize, MissingQuestionNamesRun) {
  auto runs = make_runs({{"a", "red", "red", "red", "blue"}});
  runs.irrel.records.clear();
  try {
    categorize("a", "red", runs.view());
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("irrel"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("'a'"), std::string::npos);
  }
}

TEST(Aggregate, OnePerSubCategory) {
  const auto outcomes = evaluate_all({{"a", "red", "red", "red", "blue"},
                                      {"b", "green", "red", "red", "blue"},
                                      {"c", "red", "red", "red", "red"},
                                      {"d", "green", "red", "blue", "blue"}});
  const auto a = aggregate(outcomes);
  EXPECT_EQ(a.n, 4u);
  for (const Ratio& r : {a.plus_correct, a.plus_incorrect, a.minus_correct, a.minus_incorrect}) {
    EXPECT_EQ(r, (Ratio{1, 4}));
  }
  EXPECT_EQ(a.plus, (Ratio{2, 4}));
  EXPECT_EQ(a.minus, (Ratio{2, 4}));
  EXPECT_EQ(a.mod_plus, (Ratio{3, 4}));
  EXPECT_EQ(a.acc_all, (Ratio{2, 4}));
  // rel answers: red, red, red, blue vs gold red, green, red, green
  EXPECT_EQ(a.acc_rel, (Ratio{2, 4}));
  // irrel answers: blue, blue, red, blue
  EXPECT_EQ(a.acc_irrel, (Ratio{1, 4}));
}

TEST(Aggregate, AllGroundedAndCorrect) {
  const auto a = aggregate(evaluate_all(
      {{"a", "x", "x", "x", "y"}, {"b", "y", "y", "y", "x"}, {"c", "z", "z", "z", "q"}}));
  EXPECT_EQ(a.plus_correct, (Ratio{3, 3}));
  EXPECT_EQ(a.plus_incorrect.numerator + a.minus_correct.numerator + a.minus_incorrect.numerator, 0u);
}

TEST(Aggregate, TwoThirds) {
  const auto a = aggregate(evaluate_all({{"a", "x", "x", "x", "y"},
                                         {"b", "x", "x", "x", "y"},
                                         {"c", "y", "x", "z", "z"}}));
  EXPECT_EQ(a.plus, (Ratio{2, 3}));
  EXPECT_EQ(a.acc_all, (Ratio{2, 3}));
  EXPECT_EQ(a.minus_incorrect, (Ratio{1, 3}));
}

TEST(Aggregate, EmptyIsAnError) {
  EXPECT_THROW(aggregate({}), EmptyReportError);
}

TEST(SuffComp, Examples) {
  EXPECT_DOUBLE_EQ(sufficiency(0.9, 0.9), 0.0);
  EXPECT_NEAR(sufficiency(0.9, 0.85), 0.05, 1e-15);
  EXPECT_NEAR(sufficiency(0.6, 0.9), -0.3, 1e-15);
  EXPECT_NEAR(comprehensiveness(0.9, 0.2), 0.7, 1e-15);
}

TEST(SuffComp, UsesAllConditionClass) {
  Runs r;
  r.all.records["q"] = {"q", "red", 0.8, std::map<std::string, double>{{"red", 0.8}, {"blue", 0.2}}};
  r.rel.records["q"] = {"q", "blue", 0.6, std::map<std::string, double>{{"red", 0.4}, {"blue", 0.6}}};
  r.irrel.records["q"] = {"q", "green", 0.5, std::map<std::string, double>{{"green", 0.5}, {"blue", 0.5}}};
  const auto o = evaluate_question("q", "red", r.view());
  ASSERT_TRUE(o.suff && o.comp);
  EXPECT_NEAR(*o.suff, 0.8 - 0.4, 1e-15);
  EXPECT_NEAR(*o.comp, 0.8 - 0.0, 1e-15);  // red absent from the irrel distribution
  EXPECT_TRUE(o.rel_flipped);
  EXPECT_TRUE(o.irrel_flipped);
}

TEST(SuffComp, ProbOnlyRecordsGiveSuffOnlyWhenClassMatches) {
  Runs r;
  r.all.records["q"] = {"q", "red", 0.9, std::nullopt};
  r.rel.records["q"] = {"q", "red", 0.85, std::nullopt};
  r.irrel.records["q"] = {"q", "blue", 0.7, std::nullopt};
  const auto o = evaluate_question("q", "red", r.view());
  ASSERT_TRUE(o.suff);
  EXPECT_NEAR(*o.suff, 0.05, 1e-15);
  EXPECT_FALSE(o.comp);  // P(red | irrel) is not recoverable
}

TEST(Quadrants, Classification) {
  const SuffCompThresholds t;
  EXPECT_EQ(classify_quadrant(0.005, 0.10, t), Quadrant::kGoodSuffBadComp);
  EXPECT_EQ(classify_quadrant(0.005, 0.60, t), Quadrant::kGoodSuffGoodComp);
  EXPECT_EQ(classify_quadrant(0.5, 0.10, t), Quadrant::kBadSuffBadComp);
  EXPECT_EQ(classify_quadrant(0.5, 0.60, t), Quadrant::kBadSuffGoodComp);
  EXPECT_EQ(suff_comp_quadrants({}).total(), 0u);
}

TEST(Quadrants, Thresholds) {
  SuffCompThresholds t;
  t.bin_edges = {0.2, 0.1};
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t.bin_edges = {};
  EXPECT_NO_THROW(t.validate());
}

TEST(FlipRates, GroundedExtremes) {
  const auto outcomes =
      evaluate_all({{"a", "x", "x", "x", "y"}, {"b", "q", "y", "y", "z"}, {"c", "x", "x", "x", "x"}});
  const auto rows = flip_rate_by_category(outcomes, FlipCategorizer::kFpvgTerms);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].category, "fpvg_plus");
  EXPECT_EQ(rows[0].pairing, "rel");
  EXPECT_EQ(rows[0].flipped, (Ratio{0, 2}));
  EXPECT_EQ(rows[1].pairing, "irrel");
  EXPECT_EQ(rows[1].flipped, (Ratio{2, 2}));
  for (const auto& row : rows) {
    if (!row.flipped.defined()) continue;
    EXPECT_TRUE(row.flipped.numerator == 0 || row.flipped.numerator == row.flipped.denominator)
        << row.category << "/" << row.pairing;
  }
}

TEST(FlipRates, BinsHandCount) {
  std::vector<QuestionOutcome> outcomes(2);
  outcomes[0].suff = 0.3;
  outcomes[0].rel_flipped = true;
  outcomes[1].suff = 0.25;
  outcomes[1].rel_flipped = false;
  const std::vector<double> edges{0.01, 0.2, 0.4};
  const auto rows = flip_rate_by_category(outcomes, FlipCategorizer::kSuffBins, edges);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].category, "suff<0.01");
  EXPECT_EQ(rows[2].category, "0.2<=suff<0.4");
  EXPECT_EQ(rows[3].category, "suff>=0.4");
  EXPECT_EQ(rows[2].flipped, (Ratio{1, 2}));
  EXPECT_DOUBLE_EQ(rows[2].flipped.value(), 0.5);
  EXPECT_FALSE(rows[0].flipped.defined());
}

TEST(FlipRates, EdgeValueFallsInUpperBin) {
  std::vector<QuestionOutcome> outcomes(1);
  outcomes[0].comp = 0.2;
  outcomes[0].irrel_flipped = true;
  const std::vector<double> edges{0.01, 0.2, 0.4};
  const auto rows = flip_rate_by_category(outcomes, FlipCategorizer::kCompBins, edges);
  EXPECT_EQ(rows[2].flipped, (Ratio{1, 1}));
  EXPECT_EQ(rows[2].pairing, "irrel");
}

// ---------------------------------------------------------------- properties

namespace {

std::vector<Row> random_rows(std::mt19937_64& rng, std::size_t n, int vocab) {
  std::uniform_int_distribution<int> pick(0, vocab - 1);
  std::vector<Row> rows;
  for (std::size_t i = 0; i < n; ++i) {
    auto w = [&] { return "w" + std::to_string(pick(rng)); };
    rows.push_back({"q" + std::to_string(i), w(), w(), w(), w()});
  }
  return rows;
}

}  // namespace

TEST(MetricsProperty, PartitionAndIdentities) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 300; ++t) {
    const auto rows = random_rows(rng, 1 + rng() % 60, 1 + int(rng() % 4));
    const auto a = aggregate(evaluate_all(rows));
    ASSERT_EQ(a.plus.numerator + a.minus.numerator, a.n);
    ASSERT_EQ(a.plus_correct.numerator + a.plus_incorrect.numerator + a.minus_correct.numerator +
                  a.minus_incorrect.numerator,
              a.n);
    ASSERT_EQ(a.plus_correct.numerator + a.minus_correct.numerator, a.acc_all.numerator);
    ASSERT_NEAR(a.plus.value() + a.minus.value(), 1.0, 1e-12);
    ASSERT_GE(a.mod_plus.numerator, a.plus.numerator);
  }
}

TEST(MetricsProperty, AnswerRenamingInvariance) {
  std::mt19937_64 rng(32);
  // A bijection on the vocabulary that changes every string.
  auto rename = [](const std::string& s) { return "renamed<" + std::string(s.rbegin(), s.rend()) + ">"; };
  for (int t = 0; t < 200; ++t) {
    const auto rows = random_rows(rng, 30, 3);
    auto renamed = rows;
    for (auto& r : renamed) {
      r.gold = rename(r.gold);
      r.all = rename(r.all);
      r.rel = rename(r.rel);
      r.irrel = rename(r.irrel);
    }
    const auto a = evaluate_all(rows);
    const auto b = evaluate_all(renamed);
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_EQ(a[i].category, b[i].category);
      ASSERT_EQ(a[i].mod_grounded, b[i].mod_grounded);
    }
  }
}

TEST(MetricsProperty, EquationForms) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 2000; ++t) {
    const std::string x = "a" + std::to_string(rng() % 5), y = "b" + std::to_string(rng() % 5),
                      z = std::to_string(rng() % 3);
    ASSERT_TRUE(fpvg_question(x, x, y));
    ASSERT_FALSE(fpvg_question(x, y, z));
    ASSERT_FALSE(fpvg_question(x, y, x));
  }
}

TEST(MetricsProperty, SuffCompLinear) {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  for (int t = 0; t < 5000; ++t) {
    const double a = p(rng), b = p(rng), s = p(rng);
    ASSERT_NEAR(sufficiency(s * a, s * b), s * sufficiency(a, b), 1e-15);
    ASSERT_NEAR(comprehensiveness(s * a, s * b), s * comprehensiveness(a, b), 1e-15);
  }
}

TEST(MetricsProperty, FpvgTermRowsAlwaysAtExtremes) {
  std::mt19937_64 rng(35);
  for (int t = 0; t < 300; ++t) {
    const auto outcomes = evaluate_all(random_rows(rng, 1 + rng() % 40, 1 + int(rng() % 3)));
    for (const auto& row : flip_rate_by_category(outcomes, FlipCategorizer::kFpvgTerms)) {
      if (!row.flipped.defined()) continue;
      ASSERT_TRUE(row.flipped.numerator == 0 || row.flipped.numerator == row.flipped.denominator);
    }
  }
}
