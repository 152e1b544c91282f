#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpvg/metrics.hpp"

namespace fpvg {

inline constexpr const char* kDegradationFormula = "1 - c2i_after / c2i_before";

// Correct-to-incorrect answer ratio over a subset of evaluated questions.
struct C2iRatio {
  enum class State { kFinite, kInfinite, kUndefined };

  std::string subset_label;
  std::uint64_t correct = 0;
  std::uint64_t incorrect = 0;

  State state() const noexcept {
    if (incorrect > 0) return State::kFinite;
    return correct > 0 ? State::kInfinite : State::kUndefined;
  }
  // Present only when finite.
  std::optional<double> ratio() const noexcept {
    if (state() != State::kFinite) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(incorrect);
  }
};

enum class C2iSubset { kAll, kFpvgPlus, kFpvgMinus, kModFpvgPlus, kModFpvgMinus };

const char* subset_name(C2iSubset subset) noexcept;

C2iRatio c2i(const FpvgAggregates& report, C2iSubset subset, std::string label = {});

struct Degradation {
  std::optional<double> value;
  std::string reason;  // set when value is absent
};

// Relative drop 1 − after/before; positive means `after` is worse.
Degradation degradation(std::optional<double> before, std::optional<double> after);
Degradation degradation(const C2iRatio& before, const C2iRatio& after);

struct SeedStats {
  std::size_t count = 0;
  double median = 0.0;
  double max_abs_deviation = 0.0;  // max |x − median|
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

// Requires at least one value (std::invalid_argument).
SeedStats seed_statistics(std::span<const double> values);

// One or more reports (e.g. seeds) for one split label.
struct SplitReports {
  std::string label;
  std::string config_fingerprint;
  std::vector<FpvgAggregates> runs;
};

struct C2iCell {
  std::string split;
  std::string group;
  C2iRatio pooled;                 // counts summed over runs
  std::optional<double> ratio;     // single run: its ratio; several: median of per-run ratios
  bool infinite = false;           // single run with zero incorrect answers
  std::optional<SeedStats> stats;  // only with several runs
  std::string note;                // why ratio is absent
};

struct DegradationRow {
  std::string scope;  // group (across splits) or split (across groups)
  std::string from;
  std::string to;
  Degradation value;
};

struct SplitComparison {
  std::string formula = kDegradationFormula;
  std::vector<C2iCell> cells;                 // split-major, group-minor
  std::vector<DegradationRow> across_splits;  // baseline (first split) → every other split, per group
  std::vector<DegradationRow> across_groups;  // per split: plus → minus
};

// The first entry is the baseline (e.g. ID). Throws std::invalid_argument with
// fewer than two splits or mismatched config fingerprints.
SplitComparison compare_splits(std::span<const SplitReports> splits, bool include_mod = false);

std::string comparison_to_json(const SplitComparison& comparison);
// Columns: split,group,correct,incorrect,ratio,degradation
std::string comparison_to_csv(const SplitComparison& comparison);

}  // namespace fpvg
