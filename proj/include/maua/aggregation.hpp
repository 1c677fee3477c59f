#pragma once

#include <span>
#include <string>
#include <vector>

#include "maua/model.hpp"
#include "maua/scaling.hpp"

namespace maua {

// Utilities closer than this are ranked as ties.
inline constexpr double kTieTolerance = 1e-9;

struct OptionResult {
  std::string name;
  double utility = 0.0;          // canonical [0, 1]
  double display_utility = 0.0;  // utility, or 100 * utility on the percent scale
  // w_i * u_i per attribute (probability-weighted across scenarios). Empty in
  // multiplicative mode.
  std::vector<double> contributions;
  // Aggregate utility of each scenario; empty for single-scenario options.
  std::vector<double> scenario_utilities;
};

struct EvaluationResult {
  std::string problem_name;
  DisplayScale display_scale = DisplayScale::unit;
  Aggregation aggregation = Aggregation::additive;
  std::vector<std::string> attribute_names;
  WeightVector weights;
  std::vector<OptionResult> options;
};

struct RankEntry {
  std::string name;
  double utility = 0.0;
  int rank = 0;
  std::size_t option_index = 0;

  bool operator==(const RankEntry&) const = default;
};

// Non-increasing by utility. Options within kTieTolerance share the smallest
// applicable rank and keep their input order.
struct Ranking {
  std::vector<RankEntry> entries;

  const RankEntry& top() const { return entries.front(); }
  // Number of entries sharing `rank`.
  std::size_t count_at(int rank) const;

  bool operator==(const Ranking&) const = default;
};

struct ScenarioUtility {
  double probability = 1.0;
  double utility = 0.0;
};

double additive_utility(const WeightVector& weights, std::span<const double> locations);

// Weighted geometric mean; zero-weight factors contribute 1 even at u = 0.
double multiplicative_utility(const WeightVector& weights, std::span<const double> locations);

// Throws DomainError when probabilities leave [0, 1] or do not sum to 1.
double expected_utility(std::span<const ScenarioUtility> scenarios);

EvaluationResult evaluate_problem(const DecisionProblem& problem);

// Evaluation under explicit weights (same length as the attribute list),
// bypassing importance normalization. Used by the weight sweeps.
EvaluationResult evaluate_with_weights(const DecisionProblem& problem, const WeightVector& weights,
                                       const LocationMatrix& locations);

Ranking rank_options(const EvaluationResult& result);

// Ranking over bare utilities; names and utilities must have equal length.
Ranking rank_utilities(std::span<const std::string> names, std::span<const double> utilities);

double to_display(double utility, DisplayScale scale);

}  // namespace maua
