#include "fpvg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpvg/io.hpp"
#include "json.hpp"

namespace fpvg {

const char* subset_name(C2iSubset subset) noexcept {
  switch (subset) {
    case C2iSubset::kAll: return "all";
    case C2iSubset::kFpvgPlus: return "fpvg_plus";
    case C2iSubset::kFpvgMinus: return "fpvg_minus";
    case C2iSubset::kModFpvgPlus: return "mod_fpvg_plus";
    case C2iSubset::kModFpvgMinus: return "mod_fpvg_minus";
  }
  return "?";
}

C2iRatio c2i(const FpvgAggregates& report, C2iSubset subset, std::string label) {
  C2iRatio r;
  r.subset_label = label.empty() ? subset_name(subset) : std::move(label);
  switch (subset) {
    case C2iSubset::kAll:
      r.correct = report.acc_all.numerator;
      r.incorrect = report.n - report.acc_all.numerator;
      break;
    case C2iSubset::kFpvgPlus:
      r.correct = report.plus_correct.numerator;
      r.incorrect = report.plus_incorrect.numerator;
      break;
    case C2iSubset::kFpvgMinus:
      r.correct = report.minus_correct.numerator;
      r.incorrect = report.minus_incorrect.numerator;
      break;
    case C2iSubset::kModFpvgPlus:
      r.correct = report.mod_plus_correct.numerator;
      r.incorrect = report.mod_plus_incorrect.numerator;
      break;
    case C2iSubset::kModFpvgMinus:
      r.correct = report.mod_minus_correct.numerator;
      r.incorrect = report.mod_minus_incorrect.numerator;
      break;
  }
  return r;
}

Degradation degradation(std::optional<double> before, std::optional<double> after) {
  if (!before || !after) return {std::nullopt, "ratio not finite"};
  if (!(*before > 0.0)) return {std::nullopt, "baseline ratio is zero"};
  return {1.0 - *after / *before, {}};
}

Degradation degradation(const C2iRatio& before, const C2iRatio& after) {
  if (before.state() == C2iRatio::State::kUndefined || after.state() == C2iRatio::State::kUndefined) {
    return {std::nullopt, "ratio undefined (empty subset)"};
  }
  if (before.state() == C2iRatio::State::kInfinite || after.state() == C2iRatio::State::kInfinite) {
    return {std::nullopt, "ratio infinite (no incorrect answers)"};
  }
  return degradation(before.ratio(), after.ratio());
}

SeedStats seed_statistics(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("seed statistics need at least one value");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  SeedStats s;
  s.count = v.size();
  const std::size_t mid = v.size() / 2;
  s.median = v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  s.min = v.front();
  s.max = v.back();
  s.max_abs_deviation = std::max(s.median - s.min, s.max - s.median);
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  return s;
}

namespace {

C2iCell make_cell(const SplitReports& split, C2iSubset subset) {
  C2iCell cell;
  cell.split = split.label;
  cell.group = subset_name(subset);
  cell.pooled.subset_label = split.label + "/" + cell.group;

  std::vector<double> ratios;
  std::string first_problem;
  for (const auto& run : split.runs) {
    const C2iRatio r = c2i(run, subset);
    cell.pooled.correct += r.correct;
    cell.pooled.incorrect += r.incorrect;
    if (auto v = r.ratio()) {
      ratios.push_back(*v);
    } else if (first_problem.empty()) {
      first_problem = r.state() == C2iRatio::State::kInfinite ? "infinite" : "undefined";
    }
  }
  if (split.runs.size() == 1) {
    const C2iRatio r = c2i(split.runs.front(), subset);
    cell.ratio = r.ratio();
    cell.infinite = r.state() == C2iRatio::State::kInfinite;
    if (!cell.ratio) cell.note = cell.infinite ? "infinite: no incorrect answers" : "empty subset";
    return cell;
  }
  if (!first_problem.empty()) {
    cell.note = "a run has an " + first_problem + " ratio; median not defined";
    return cell;
  }
  cell.stats = seed_statistics(ratios);
  cell.ratio = cell.stats->median;
  return cell;
}

nlohmann::ordered_json optional_number(std::optional<double> v) {
  if (!v) return nullptr;
  return io::round_decimal(*v);
}

nlohmann::ordered_json degradation_json(const DegradationRow& row) {
  nlohmann::ordered_json j;
  j["scope"] = row.scope;
  j["from"] = row.from;
  j["to"] = row.to;
  j["degradation"] = optional_number(row.value.value);
  if (!row.value.value) j["reason"] = row.value.reason;
  return j;
}

}  // namespace

SplitComparison compare_splits(std::span<const SplitReports> splits, bool include_mod) {
  if (splits.size() < 2) {
    throw std::invalid_argument("split comparison needs at least two labeled splits");
  }
  for (const auto& s : splits) {
    if (s.runs.empty()) throw std::invalid_argument("split '" + s.label + "' has no reports");
    if (s.config_fingerprint != splits.front().config_fingerprint) {
      throw std::invalid_argument("config fingerprint mismatch: split '" + s.label + "' has " +
                                  s.config_fingerprint + ", split '" + splits.front().label +
                                  "' has " + splits.front().config_fingerprint);
    }
  }

  std::vector<C2iSubset> groups{C2iSubset::kAll, C2iSubset::kFpvgPlus, C2iSubset::kFpvgMinus};
  if (include_mod) {
    groups.push_back(C2iSubset::kModFpvgPlus);
    groups.push_back(C2iSubset::kModFpvgMinus);
  }

  SplitComparison out;
  for (const auto& s : splits) {
    for (auto g : groups) out.cells.push_back(make_cell(s, g));
  }
  const std::size_t ng = groups.size();
  auto cell_at = [&](std::size_t split, std::size_t group) -> const C2iCell& {
    return out.cells[split * ng + group];
  };

  for (std::size_t g = 0; g < ng; ++g) {
    for (std::size_t s = 1; s < splits.size(); ++s) {
      out.across_splits.push_back({subset_name(groups[g]), splits[0].label, splits[s].label,
                                   degradation(cell_at(0, g).ratio, cell_at(s, g).ratio)});
    }
  }
  for (std::size_t s = 0; s < splits.size(); ++s) {
    out.across_groups.push_back({splits[s].label, "fpvg_plus", "fpvg_minus",
                                 degradation(cell_at(s, 1).ratio, cell_at(s, 2).ratio)});
    if (include_mod) {
      out.across_groups.push_back({splits[s].label, "mod_fpvg_plus", "mod_fpvg_minus",
                                   degradation(cell_at(s, 3).ratio, cell_at(s, 4).ratio)});
    }
  }
  return out;
}

std::string comparison_to_json(const SplitComparison& c) {
  nlohmann::ordered_json j;
  j["degradation_formula"] = c.formula;
  auto& cells = j["c2i"] = nlohmann::ordered_json::array();
  for (const auto& cell : c.cells) {
    nlohmann::ordered_json e;
    e["split"] = cell.split;
    e["group"] = cell.group;
    e["correct"] = cell.pooled.correct;
    e["incorrect"] = cell.pooled.incorrect;
    e["ratio"] = optional_number(cell.ratio);
    e["infinite"] = cell.infinite;
    if (cell.stats) {
      e["runs"] = cell.stats->count;
      e["median"] = io::round_decimal(cell.stats->median);
      e["max_abs_deviation"] = io::round_decimal(cell.stats->max_abs_deviation);
      e["min"] = io::round_decimal(cell.stats->min);
      e["max"] = io::round_decimal(cell.stats->max);
      e["mean"] = io::round_decimal(cell.stats->mean);
    }
    if (!cell.note.empty()) e["note"] = cell.note;
    cells.push_back(std::move(e));
  }
  auto& across_splits = j["across_splits"] = nlohmann::ordered_json::array();
  for (const auto& row : c.across_splits) across_splits.push_back(degradation_json(row));
  auto& across_groups = j["across_groups"] = nlohmann::ordered_json::array();
  for (const auto& row : c.across_groups) across_groups.push_back(degradation_json(row));
  return j.dump(2) + "\n";
}

std::string comparison_to_csv(const SplitComparison& c) {
  std::string out = "split,group,correct,incorrect,ratio,degradation\n";
  auto degradation_for = [&](const C2iCell& cell) -> std::string {
    for (const auto& row : c.across_splits) {
      if (row.scope == cell.group && row.to == cell.split && row.value.value) {
        return io::format_decimal(*row.value.value);
      }
    }
    return {};
  };
  for (const auto& cell : c.cells) {
    std::string ratio;
    if (cell.ratio) {
      ratio = io::format_decimal(*cell.ratio);
    } else if (cell.infinite) {
      ratio = "inf";
    }
    out += cell.split + "," + cell.group + "," + std::to_string(cell.pooled.correct) + "," +
           std::to_string(cell.pooled.incorrect) + "," + ratio + "," + degradation_for(cell) + "\n";
  }
  for (const auto& row : c.across_groups) {
    out += row.scope + "," + row.from + "->" + row.to + ",,,," +
           (row.value.value ? io::format_decimal(*row.value.value) : std::string()) + "\n";
  }
  return out;
}

}  // namespace fpvg
