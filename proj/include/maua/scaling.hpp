#pragma once

#include <span>
#include <vector>

#include "maua/model.hpp"

namespace maua {

// Normalized weights aligned with the problem's attribute order. Each entry
// lies in [0, 1] and the entries sum to 1.
struct WeightVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }

  bool operator==(const WeightVector&) const = default;
};

// Canonical [0, 1] locations indexed [option][scenario][attribute].
struct LocationMatrix {
  std::vector<std::vector<std::vector<double>>> cells;

  const std::vector<double>& row(std::size_t option, std::size_t scenario = 0) const {
    return cells.at(option).at(scenario);
  }
};

// Divides each score by the total. Throws DomainError on an empty list,
// a negative or non-finite score, or a zero sum ("no positive importance").
WeightVector weights_from_importance(std::span<const double> scores);

// Per-respondent weights averaged attribute-wise, then renormalized.
// Errors name the offending respondent (zero-based).
WeightVector group_weights(std::span<const std::vector<double>> respondent_scores);

// Min-max normalization after clamping x into [low, high]. lower_better
// reverses the scale. Throws DomainError unless low < high.
double normalize_value(double x, double low, double high, Direction direction);

// Maps t in [0, 1] through the curve:
//   linear  -> t
//   power   -> t^gamma
//   s_shape -> 3t^2 - 2t^3 (smoothstep)
// Every shape fixes 0 and 1 and is monotone non-decreasing. Throws
// DomainError for t outside [0, 1].
double apply_curve(double t, const CurveSpec& curve);

// Canonical location of a raw value. Direct attributes read a 0-100
// locator score; derived attributes are normalized against their anchors
// and shaped by their curve.
double locate(double raw, const Attribute& attribute);

// locate() applied to every scenario of every option. Throws
// ValidationError for an invalid problem.
LocationMatrix build_location_matrix(const DecisionProblem& problem);

// Weights of a validated problem (importance normalized).
WeightVector problem_weights(const DecisionProblem& problem);

}  // namespace maua
