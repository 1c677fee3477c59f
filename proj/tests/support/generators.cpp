#include "generators.hpp"

#include <algorithm>

namespace maua::testing {

std::vector<double> Generator::importances(std::size_t n) {
  std::vector<double> out(n);
  for (double& v : out) {
    const int kind = integer(0, 5);
    if (kind == 0) {
      v = 0.0;
    } else if (kind <= 2) {
      v = integer(1, 100);
    } else {
      v = uniform(0.001, 10.0);
    }
  }
  if (std::all_of(out.begin(), out.end(), [](double v) { return v == 0.0; })) {
    out[static_cast<std::size_t>(integer(0, static_cast<int>(n) - 1))] = uniform(0.1, 5.0);
  }
  return out;
}

std::vector<double> Generator::locations(std::size_t n) {
  std::vector<double> out(n);
  for (double& v : out) {
    const int kind = integer(0, 9);
    v = kind == 0 ? 0.0 : kind == 1 ? 1.0 : uniform(0.0, 1.0);
  }
  return out;
}

std::vector<double> Generator::probabilities(std::size_t n) {
  std::vector<double> raw(n);
  double total = 0.0;
  for (double& v : raw) total += (v = uniform(0.05, 1.0));
  double assigned = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) assigned += (raw[k] /= total);
  raw[n - 1] = 1.0 - assigned;
  return raw;
}

CurveSpec Generator::curve() {
  switch (integer(0, 3)) {
    case 0: return {CurveShape::linear, 1.0};
    case 1: return {CurveShape::s_shape, 1.0};
    case 2: return {CurveShape::power, uniform(0.1, 1.0)};
    default: return {CurveShape::power, uniform(1.0, 6.0)};
  }
}

std::string Generator::name(const char* prefix, int index, bool awkward) {
  std::string base = std::string(prefix) + std::to_string(index);
  if (!awkward) return base;
  static const char* decorations[] = {" x", ".v2", " \"q\"", " caf\xC3\xA9", ",c", ""};
  return base + decorations[integer(0, 5)];
}

DecisionProblem Generator::problem(const ProblemShape& shape) {
  DecisionProblem p;
  p.name = "generated";
  p.display_scale = coin() ? DisplayScale::unit : DisplayScale::percent;
  p.aggregation = shape.multiplicative && coin(0.3) ? Aggregation::multiplicative
                                                    : Aggregation::additive;

  const int n = integer(shape.min_attributes, shape.max_attributes);
  const int m = integer(shape.min_options, shape.max_options);
  const auto scores = importances(static_cast<std::size_t>(n));

  for (int i = 0; i < n; ++i) {
    Attribute a;
    a.name = name("attr", i, shape.awkward_names);
    a.importance = scores[static_cast<std::size_t>(i)];
    if (shape.derived && coin()) {
      a.kind = AttributeKind::derived;
      DerivedScale s;
      s.direction = coin() ? Direction::higher_better : Direction::lower_better;
      s.range_low = coin() ? static_cast<double>(integer(-1000, 1000)) : uniform(-1e4, 1e4);
      s.range_high = s.range_low + (coin() ? static_cast<double>(integer(1, 5000)) : uniform(0.01, 1e4));
      s.curve = curve();
      a.scale = s;
    }
    p.attributes.push_back(std::move(a));
  }

  for (int j = 0; j < m; ++j) {
    OptionRecord o;
    o.name = name("option", j, shape.awkward_names);
    const int scenario_count = shape.scenarios && coin(0.25) ? integer(2, 3) : 1;
    const auto probs = scenario_count == 1 ? std::vector<double>{1.0}
                                           : probabilities(static_cast<std::size_t>(scenario_count));
    for (int k = 0; k < scenario_count; ++k) {
      Scenario sc;
      sc.probability = probs[static_cast<std::size_t>(k)];
      for (const Attribute& a : p.attributes) {
        double v;
        if (a.kind == AttributeKind::direct) {
          v = coin(0.3) ? static_cast<double>(integer(0, 100)) : uniform(0.0, 100.0);
        } else {
          const double lo = a.scale->range_low;
          const double width = a.scale->range_high - lo;
          v = uniform(lo - 0.2 * width, lo + 1.2 * width);
        }
        sc.values[a.name] = v;
      }
      o.scenarios.push_back(std::move(sc));
    }
    p.options.push_back(std::move(o));
  }
  return p;
}

}  // namespace maua::testing
