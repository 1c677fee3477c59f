#include "maua/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace maua {

namespace {

constexpr double kProbabilityTolerance = 1e-9;

void require_same_length(const WeightVector& weights, std::span<const double> locations) {
  if (weights.size() != locations.size()) {
    throw DomainError("length mismatch: " + std::to_string(weights.size()) + " weights, " +
                      std::to_string(locations.size()) + " locations");
  }
  if (locations.empty()) throw DomainError("at least one attribute is required");
}

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::size_t Ranking::count_at(int rank) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [rank](const RankEntry& e) { return e.rank == rank; }));
}

double additive_utility(const WeightVector& weights, std::span<const double> locations) {
  require_same_length(weights, locations);
  double sum = 0.0;
  for (std::size_t i = 0; i < locations.size(); ++i) sum += weights[i] * locations[i];
  return clamp_unit(sum);
}

double multiplicative_utility(const WeightVector& weights, std::span<const double> locations) {
  require_same_length(weights, locations);
  double product = 1.0;
  for (std::size_t i = 0; i < locations.size(); ++i) {
    if (weights[i] == 0.0) continue;
    if (locations[i] < 0.0 || locations[i] > 1.0) {
      throw DomainError("location outside [0, 1]");
    }
    product *= std::pow(locations[i], weights[i]);
  }
  return clamp_unit(product);
}

double expected_utility(std::span<const ScenarioUtility> scenarios) {
  if (scenarios.empty()) throw DomainError("at least one scenario is required");
  double total_p = 0.0;
  double sum = 0.0;
  for (const ScenarioUtility& s : scenarios) {
    if (!(s.probability >= 0.0 && s.probability <= 1.0)) {
      throw DomainError("probability outside [0, 1]");
    }
    total_p += s.probability;
    sum += s.probability * s.utility;
  }
  if (std::abs(total_p - 1.0) > kProbabilityTolerance) {
    throw DomainError("probabilities sum to " + std::to_string(total_p) + ", expected 1");
  }
  // Keep the result inside the scenario hull despite rounding.
  const auto [lo, hi] = std::minmax_element(
      scenarios.begin(), scenarios.end(),
      [](const ScenarioUtility& a, const ScenarioUtility& b) { return a.utility < b.utility; });
  return std::clamp(sum, lo->utility, hi->utility);
}

double to_display(double utility, DisplayScale scale) {
  return scale == DisplayScale::percent ? utility * 100.0 : utility;
}

EvaluationResult evaluate_with_weights(const DecisionProblem& problem, const WeightVector& weights,
                                       const LocationMatrix& locations) {
  const std::size_t n = problem.attributes.size();
  if (weights.size() != n) throw DomainError("weight vector does not match attribute count");

  EvaluationResult result;
  result.problem_name = problem.name;
  result.display_scale = problem.display_scale;
  result.aggregation = problem.aggregation;
  result.weights = weights;
  for (const Attribute& attr : problem.attributes) result.attribute_names.push_back(attr.name);

  result.options.reserve(problem.options.size());
  for (std::size_t j = 0; j < problem.options.size(); ++j) {
    const OptionRecord& option = problem.options[j];
    OptionResult out;
    out.name = option.name;

    std::vector<ScenarioUtility> scenario_utils;
    scenario_utils.reserve(option.scenarios.size());
    if (problem.aggregation == Aggregation::additive) out.contributions.assign(n, 0.0);

    for (std::size_t k = 0; k < option.scenarios.size(); ++k) {
      const std::vector<double>& row = locations.row(j, k);
      const double p = option.scenarios[k].probability;
      double u = 0.0;
      if (problem.aggregation == Aggregation::additive) {
        u = additive_utility(weights, row);
        for (std::size_t i = 0; i < n; ++i) out.contributions[i] += p * weights[i] * row[i];
      } else {
        u = multiplicative_utility(weights, row);
      }
      scenario_utils.push_back({p, u});
    }

    if (scenario_utils.size() == 1) {
      out.utility = scenario_utils.front().utility;
    } else {
      out.utility = expected_utility(scenario_utils);
      for (const ScenarioUtility& s : scenario_utils) out.scenario_utilities.push_back(s.utility);
    }
    out.display_utility = to_display(out.utility, problem.display_scale);
    result.options.push_back(std::move(out));
  }
  return result;
}

EvaluationResult evaluate_problem(const DecisionProblem& problem) {
  LocationMatrix locations = build_location_matrix(problem);
  return evaluate_with_weights(problem, problem_weights(problem), locations);
}

Ranking rank_utilities(std::span<const std::string> names, std::span<const double> utilities) {
  if (names.size() != utilities.size()) throw DomainError("names and utilities differ in length");

  std::vector<std::size_t> order(utilities.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return utilities[a] > utilities[b];
  });

  Ranking ranking;
  ranking.entries.reserve(order.size());
  std::size_t group_begin = 0;
  while (group_begin < order.size()) {
    // Chain neighbours within tolerance into one tie group.
    std::size_t group_end = group_begin + 1;
    while (group_end < order.size() &&
           utilities[order[group_end - 1]] - utilities[order[group_end]] <= kTieTolerance) {
      ++group_end;
    }
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(group_begin),
              order.begin() + static_cast<std::ptrdiff_t>(group_end));
    const int rank = static_cast<int>(group_begin) + 1;
    for (std::size_t g = group_begin; g < group_end; ++g) {
      const std::size_t idx = order[g];
      ranking.entries.push_back({names[idx], utilities[idx], rank, idx});
    }
    group_begin = group_end;
  }
  return ranking;
}

Ranking rank_options(const EvaluationResult& result) {
  std::vector<std::string> names;
  std::vector<double> utilities;
  names.reserve(result.options.size());
  utilities.reserve(result.options.size());
  for (const OptionResult& o : result.options) {
    names.push_back(o.name);
    utilities.push_back(o.utility);
  }
  return rank_utilities(names, utilities);
}

}  // namespace maua
