#include "maua/sensitivity.hpp"

#include <algorithm>
#include <cmath>

namespace maua {

namespace {

constexpr double kEdgeTolerance = 1e-9;

std::size_t require_sweepable(const DecisionProblem& problem, const std::string& attribute) {
  require_valid(problem);
  auto idx = problem.attribute_index(attribute);
  if (!idx) throw LookupError("attribute", "unknown attribute '" + attribute + "'");
  if (problem.attributes.size() < 2) {
    throw DomainError("nothing to rescale: sweeping needs at least two attributes");
  }
  return *idx;
}

std::vector<std::string> option_names(const DecisionProblem& problem) {
  std::vector<std::string> names;
  names.reserve(problem.options.size());
  for (const OptionRecord& o : problem.options) names.push_back(o.name);
  return names;
}

// Utility of each option as a line U(t) = at_zero + (at_one - at_zero) t.
struct UtilityLine {
  double at_zero = 0.0;
  double at_one = 0.0;

  double slope() const { return at_one - at_zero; }
  double at(double t) const { return at_zero + slope() * t; }
};

}  // namespace

WeightVector swept_weights(const WeightVector& base, std::size_t swept, double t) {
  if (swept >= base.size()) throw DomainError("swept attribute out of range");
  if (base.size() < 2) throw DomainError("nothing to rescale: sweeping needs at least two attributes");
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("swept weight outside [0, 1]");

  double rest = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (i != swept) rest += base[i];
  }
  const double remaining = 1.0 - t;
  const double uniform = remaining / static_cast<double>(base.size() - 1);

  WeightVector w;
  w.values.resize(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (i == swept) {
      w.values[i] = t;
    } else if (rest > 0.0) {
      w.values[i] = base[i] / rest * remaining;
    } else {
      w.values[i] = uniform;
    }
  }
  return w;
}

std::vector<SweepPoint> sweep_weight(const DecisionProblem& problem, const std::string& attribute,
                                     int samples) {
  const std::size_t idx = require_sweepable(problem, attribute);
  if (samples < 2) throw DomainError("samples must be at least 2");

  const WeightVector base = problem_weights(problem);
  const LocationMatrix locations = build_location_matrix(problem);

  std::vector<SweepPoint> points;
  points.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    const double t = static_cast<double>(s) / static_cast<double>(samples - 1);
    SweepPoint p;
    p.t = t;
    p.weights = swept_weights(base, idx, t);
    p.ranking = rank_options(evaluate_with_weights(problem, p.weights, locations));
    points.push_back(std::move(p));
  }
  return points;
}

CriticalWeights critical_weights(const DecisionProblem& problem, const std::string& attribute) {
  const std::size_t idx = require_sweepable(problem, attribute);
  if (problem.aggregation != Aggregation::additive) {
    throw UnsupportedError("unsupported: exact breakpoints need additive aggregation; use sweep_weight");
  }
  for (const OptionRecord& o : problem.options) {
    if (o.scenarios.size() != 1) {
      throw UnsupportedError(
          "unsupported: exact breakpoints need single-scenario options; use sweep_weight");
    }
  }

  const WeightVector base = problem_weights(problem);
  const LocationMatrix locations = build_location_matrix(problem);
  const std::vector<std::string> names = option_names(problem);

  const WeightVector w0 = swept_weights(base, idx, 0.0);
  const WeightVector w1 = swept_weights(base, idx, 1.0);
  std::vector<UtilityLine> lines;
  lines.reserve(problem.options.size());
  for (std::size_t j = 0; j < problem.options.size(); ++j) {
    lines.push_back({additive_utility(w0, locations.row(j)), additive_utility(w1, locations.row(j))});
  }

  auto ranked_top = [&](double t) {
    std::vector<double> u;
    u.reserve(lines.size());
    for (const UtilityLine& l : lines) u.push_back(l.at(t));
    return rank_utilities(names, u).top().option_index;
  };
  // Strict argmax (first index on exact ties) so breakpoints sit on the exact
  // line crossings rather than where the gap shrinks below kTieTolerance.
  auto argmax_at = [&](double t) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < lines.size(); ++j) {
      if (lines[j].at(t) > lines[best].at(t)) best = j;
    }
    return best;
  };

  // Candidate crossings, then the top option on each segment between them.
  std::vector<double> cuts{0.0, 1.0};
  for (std::size_t a = 0; a < lines.size(); ++a) {
    for (std::size_t b = a + 1; b < lines.size(); ++b) {
      const double denom = lines[a].slope() - lines[b].slope();
      if (denom == 0.0) continue;
      const double t = (lines[b].at_zero - lines[a].at_zero) / denom;
      if (t > 0.0 && t < 1.0) cuts.push_back(t);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  CriticalWeights out;
  out.attribute = attribute;
  out.current_weight = base[idx];
  out.top_at_zero = names[ranked_top(0.0)];
  out.top_at_one = names[ranked_top(1.0)];

  std::size_t previous_top = argmax_at(0.5 * (cuts[0] + cuts[1]));
  for (std::size_t c = 1; c + 1 < cuts.size(); ++c) {
    const std::size_t next_top = argmax_at(0.5 * (cuts[c] + cuts[c + 1]));
    if (next_top == previous_top) continue;
    const double t = cuts[c];
    if (t > kEdgeTolerance && t < 1.0 - kEdgeTolerance) {
      out.breakpoints.push_back({t, names[previous_top], names[next_top]});
    }
    previous_top = next_top;
  }
  return out;
}

SensitivityReport sensitivity_report(const DecisionProblem& problem) {
  SensitivityReport report;
  for (const Attribute& attr : problem.attributes) {
    report.attributes.push_back(critical_weights(problem, attr.name));
  }
  return report;
}

DecisionProblem apply_overrides(const DecisionProblem& problem,
                                const std::vector<Override>& overrides) {
  DecisionProblem modified = problem;
  for (std::size_t k = 0; k < overrides.size(); ++k) {
    const Override& o = overrides[k];
    const std::string path = "overrides[" + std::to_string(k) + "]";
    auto attr = modified.attribute_index(o.attribute);
    if (!attr) throw LookupError(path + ".attribute", "unknown attribute '" + o.attribute + "'");

    if (o.kind == Override::Kind::importance) {
      modified.attributes[*attr].importance = o.value;
      continue;
    }
    auto opt = modified.option_index(o.option);
    if (!opt) throw LookupError(path + ".option", "unknown option '" + o.option + "'");
    auto& scenarios = modified.options[*opt].scenarios;
    if (o.scenario) {
      if (*o.scenario >= scenarios.size()) {
        throw LookupError(path + ".scenario", "option '" + o.option + "' has no scenario " +
                                                  std::to_string(*o.scenario));
      }
      scenarios[*o.scenario].values[o.attribute] = o.value;
    } else {
      for (Scenario& sc : scenarios) sc.values[o.attribute] = o.value;
    }
  }
  return modified;
}

WhatIfDelta what_if(const DecisionProblem& problem, const std::vector<Override>& overrides) {
  WhatIfDelta delta;
  delta.overrides = overrides;
  delta.before = evaluate_problem(problem);
  delta.ranking_before = rank_options(delta.before);

  const DecisionProblem modified = apply_overrides(problem, overrides);
  delta.after = evaluate_problem(modified);
  delta.ranking_after = rank_options(delta.after);

  std::vector<int> rank_before(problem.options.size());
  std::vector<int> rank_after(problem.options.size());
  for (const RankEntry& e : delta.ranking_before.entries) rank_before[e.option_index] = e.rank;
  for (const RankEntry& e : delta.ranking_after.entries) rank_after[e.option_index] = e.rank;

  for (std::size_t j = 0; j < problem.options.size(); ++j) {
    OptionDelta d;
    d.name = problem.options[j].name;
    d.before = delta.before.options[j].utility;
    d.after = delta.after.options[j].utility;
    d.delta = d.after - d.before;
    d.rank_before = rank_before[j];
    d.rank_after = rank_after[j];
    d.rank_movement = d.rank_before - d.rank_after;
    delta.options.push_back(std::move(d));
  }
  return delta;
}

}  // namespace maua
