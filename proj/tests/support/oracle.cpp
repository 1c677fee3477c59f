#include "oracle.hpp"

#include <cmath>

namespace maua::testing {

std::vector<double> naive_utilities(const DecisionProblem& problem) {
  const std::size_t n = problem.attributes.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total = total + problem.attributes[i].importance;

  std::vector<double> result;
  for (const OptionRecord& option : problem.options) {
    double expected = 0.0;
    for (const Scenario& scenario : option.scenarios) {
      double additive = 0.0;
      double product = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const Attribute& a = problem.attributes[i];
        const double w = a.importance / total;
        const double x = scenario.values.at(a.name);
        double u;
        if (a.kind == AttributeKind::direct) {
          u = x / 100.0;
        } else {
          const double lo = a.scale->range_low;
          const double hi = a.scale->range_high;
          double v = x;
          if (v < lo) v = lo;
          if (v > hi) v = hi;
          double t = (v - lo) / (hi - lo);
          if (a.scale->direction == Direction::lower_better) t = 1.0 - t;
          if (a.scale->curve.shape == CurveShape::power) {
            u = std::pow(t, a.scale->curve.gamma);
          } else if (a.scale->curve.shape == CurveShape::s_shape) {
            u = 3.0 * t * t - 2.0 * t * t * t;
          } else {
            u = t;
          }
        }
        additive = additive + w * u;
        if (w > 0.0) product = product * std::pow(u, w);
      }
      const double utility =
          problem.aggregation == Aggregation::additive ? additive : product;
      expected = expected + scenario.probability * utility;
    }
    result.push_back(expected);
  }
  return result;
}

}  // namespace maua::testing
