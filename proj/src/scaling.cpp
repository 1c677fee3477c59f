#include "maua/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace maua {

WeightVector weights_from_importance(std::span<const double> scores) {
  if (scores.empty()) throw DomainError("importance list must not be empty");
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i]) || scores[i] < 0.0) {
      throw DomainError("importance score " + std::to_string(i) +
                        " must be a finite non-negative number");
    }
    total += scores[i];
  }
  if (!(total > 0.0)) throw DomainError("no positive importance");
  if (!std::isfinite(total)) throw DomainError("importance scores overflow when summed");

  WeightVector w;
  w.values.reserve(scores.size());
  for (double s : scores) w.values.push_back(s / total);
  return w;
}

WeightVector group_weights(std::span<const std::vector<double>> respondent_scores) {
  if (respondent_scores.empty()) throw DomainError("at least one respondent is required");
  const std::size_t n = respondent_scores.front().size();
  std::vector<double> mean(n, 0.0);

  for (std::size_t r = 0; r < respondent_scores.size(); ++r) {
    const auto& scores = respondent_scores[r];
    if (scores.size() != n) {
      throw DomainError("respondent " + std::to_string(r) + ": expected " + std::to_string(n) +
                        " scores, got " + std::to_string(scores.size()));
    }
    WeightVector w;
    try {
      w = weights_from_importance(scores);
    } catch (const DomainError& e) {
      throw DomainError("respondent " + std::to_string(r) + ": " + e.what());
    }
    for (std::size_t i = 0; i < n; ++i) mean[i] += w[i];
  }
  const double count = static_cast<double>(respondent_scores.size());
  for (double& m : mean) m /= count;
  return weights_from_importance(mean);
}

double normalize_value(double x, double low, double high, Direction direction) {
  if (!(low < high)) throw DomainError("degenerate range");
  const double clamped = std::clamp(x, low, high);
  const double t = std::clamp((clamped - low) / (high - low), 0.0, 1.0);
  return direction == Direction::higher_better ? t : 1.0 - t;
}

double apply_curve(double t, const CurveSpec& curve) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("curve input outside [0, 1]");
  switch (curve.shape) {
    case CurveShape::linear:
      return t;
    case CurveShape::power:
      if (!(curve.gamma > 0.0)) throw DomainError("power curve requires gamma > 0");
      return std::pow(t, curve.gamma);
    case CurveShape::s_shape:
      return std::clamp(t * t * (3.0 - 2.0 * t), 0.0, 1.0);
  }
  return t;
}

double locate(double raw, const Attribute& attribute) {
  if (attribute.kind == AttributeKind::direct) {
    if (!(raw >= 0.0 && raw <= 100.0)) {
      throw DomainError("direct locator value for '" + attribute.name + "' outside [0, 100]");
    }
    return raw / 100.0;
  }
  if (!attribute.scale) {
    throw DomainError("derived attribute '" + attribute.name + "' has no scale");
  }
  const DerivedScale& s = *attribute.scale;
  return apply_curve(normalize_value(raw, s.range_low, s.range_high, s.direction), s.curve);
}

LocationMatrix build_location_matrix(const DecisionProblem& problem) {
  require_valid(problem);
  LocationMatrix m;
  m.cells.reserve(problem.options.size());
  for (const OptionRecord& option : problem.options) {
    auto& per_option = m.cells.emplace_back();
    per_option.reserve(option.scenarios.size());
    for (const Scenario& sc : option.scenarios) {
      auto& row = per_option.emplace_back();
      row.reserve(problem.attributes.size());
      for (const Attribute& attr : problem.attributes) {
        row.push_back(locate(sc.values.at(attr.name), attr));
      }
    }
  }
  return m;
}

WeightVector problem_weights(const DecisionProblem& problem) {
  std::vector<double> scores;
  scores.reserve(problem.attributes.size());
  for (const Attribute& attr : problem.attributes) scores.push_back(attr.importance);
  return weights_from_importance(scores);
}

}  // namespace maua
