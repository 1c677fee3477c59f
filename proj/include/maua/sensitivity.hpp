#pragma once

#include <optional>
#include <string>
#include <vector>

#include "maua/aggregation.hpp"
#include "maua/model.hpp"

namespace maua {

struct SweepPoint {
  double t = 0.0;
  WeightVector weights;
  Ranking ranking;
};

struct Breakpoint {
  double t = 0.0;
  std::string before;  // top option just below t
  std::string after;   // top option just above t
};

// Breakpoints of one swept attribute: strictly increasing t in (0, 1), each
// switching the top-ranked option.
struct CriticalWeights {
  std::string attribute;
  double current_weight = 0.0;
  std::string top_at_zero;
  std::string top_at_one;
  std::vector<Breakpoint> breakpoints;
};

struct SensitivityReport {
  std::vector<CriticalWeights> attributes;
};

// Weights with attribute `swept` pinned to t and the others rescaled in
// proportion to sum to 1 - t. When every other weight is zero, 1 - t is
// split uniformly.
WeightVector swept_weights(const WeightVector& base, std::size_t swept, double t);

// Re-evaluates and ranks on a uniform grid of `samples` points over [0, 1].
std::vector<SweepPoint> sweep_weight(const DecisionProblem& problem, const std::string& attribute,
                                     int samples);

// Exact top-option breakpoints from the per-option utility lines. Additive,
// single-scenario problems only; anything else raises UnsupportedError.
CriticalWeights critical_weights(const DecisionProblem& problem, const std::string& attribute);

// critical_weights for every attribute.
SensitivityReport sensitivity_report(const DecisionProblem& problem);

struct Override {
  enum class Kind { importance, value };
  Kind kind = Kind::importance;
  std::string attribute;
  std::string option;                   // value overrides only
  std::optional<std::size_t> scenario;  // value overrides; nullopt = every scenario
  double value = 0.0;

  static Override importance(std::string attribute, double v) {
    return {Kind::importance, std::move(attribute), {}, std::nullopt, v};
  }
  static Override raw_value(std::string option, std::string attribute, double v) {
    return {Kind::value, std::move(attribute), std::move(option), std::nullopt, v};
  }
};

struct OptionDelta {
  std::string name;
  double before = 0.0;
  double after = 0.0;
  double delta = 0.0;
  int rank_before = 0;
  int rank_after = 0;
  // Positive when the option moved up the ranking.
  int rank_movement = 0;
};

struct WhatIfDelta {
  std::vector<Override> overrides;
  EvaluationResult before;
  EvaluationResult after;
  Ranking ranking_before;
  Ranking ranking_after;
  std::vector<OptionDelta> options;
};

// Copy of `problem` with the overrides applied. Throws LookupError for an
// unknown attribute, option or scenario.
DecisionProblem apply_overrides(const DecisionProblem& problem,
                                const std::vector<Override>& overrides);

// Throws ValidationError (with the report) when the overridden problem is
// invalid.
WhatIfDelta what_if(const DecisionProblem& problem, const std::vector<Override>& overrides);

}  // namespace maua
