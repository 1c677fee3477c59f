#include "maua/model.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace maua {

namespace {

constexpr double kProbabilityTolerance = 1e-9;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string index_path(std::string_view base, std::size_t i) {
  return std::string(base) + "[" + std::to_string(i) + "]";
}

class Collector {
 public:
  void error(std::string path, std::string message) {
    report_.issues.push_back({Severity::error, std::move(path), std::move(message)});
    report_.ok = false;
  }
  void warning(std::string path, std::string message) {
    report_.issues.push_back({Severity::warning, std::move(path), std::move(message)});
  }
  ValidationReport take() { return std::move(report_); }

 private:
  ValidationReport report_;
};

void check_attribute(const Attribute& attr, const std::string& path, Collector& out) {
  if (attr.name.empty()) out.error(path + ".name", "attribute name must not be empty");
  if (!std::isfinite(attr.importance)) {
    out.error(path + ".importance", "importance must be a finite number");
  } else if (attr.importance < 0.0) {
    out.error(path + ".importance",
              "importance must be non-negative, got " + format_number(attr.importance));
  }

  if (attr.kind == AttributeKind::direct) {
    if (attr.scale) {
      out.error(path, "direct attribute must not carry direction, range or curve");
    }
    return;
  }
  if (!attr.scale) {
    out.error(path, "derived attribute requires direction, range and curve");
    return;
  }
  const DerivedScale& s = *attr.scale;
  if (!std::isfinite(s.range_low) || !std::isfinite(s.range_high)) {
    out.error(path + ".range", "range anchors must be finite numbers");
  } else if (!(s.range_low < s.range_high)) {
    out.error(path + ".range", "degenerate range: low " + format_number(s.range_low) +
                                   " must be strictly below high " +
                                   format_number(s.range_high));
  } else if (!std::isfinite(s.range_high - s.range_low)) {
    out.error(path + ".range", "range width overflows");
  }
  if (s.curve.shape == CurveShape::power &&
      !(std::isfinite(s.curve.gamma) && s.curve.gamma > 0.0)) {
    out.error(path + ".curve.gamma", "power curve requires gamma > 0");
  }
}

void check_value(const Attribute& attr, double v, const std::string& path, Collector& out) {
  if (!std::isfinite(v)) {
    out.error(path, "value must be a finite number");
    return;
  }
  if (attr.kind == AttributeKind::direct) {
    if (v < 0.0 || v > 100.0) {
      out.error(path, "direct locator value " + format_number(v) + " outside [0, 100]");
    }
    return;
  }
  if (attr.scale && attr.scale->range_low < attr.scale->range_high &&
      (v < attr.scale->range_low || v > attr.scale->range_high)) {
    out.warning(path, "value " + format_number(v) + " outside range [" +
                          format_number(attr.scale->range_low) + ", " +
                          format_number(attr.scale->range_high) + "]; it will be clamped");
  }
}

void check_option(const DecisionProblem& problem, const OptionRecord& option,
                  const std::string& path, Collector& out) {
  if (option.name.empty()) out.error(path + ".name", "option name must not be empty");
  if (option.scenarios.empty()) {
    out.error(path + ".scenarios", "option requires at least one scenario");
    return;
  }

  double total = 0.0;
  bool probabilities_finite = true;
  for (std::size_t k = 0; k < option.scenarios.size(); ++k) {
    const Scenario& sc = option.scenarios[k];
    const std::string sp = index_path(path + ".scenarios", k);
    if (!std::isfinite(sc.probability) || sc.probability < 0.0 || sc.probability > 1.0) {
      out.error(sp + ".probability", "probability must lie in [0, 1]");
      probabilities_finite = false;
    } else {
      total += sc.probability;
    }

    for (const Attribute& attr : problem.attributes) {
      auto it = sc.values.find(attr.name);
      if (it == sc.values.end()) {
        out.error(sp + ".values." + attr.name, "missing value for attribute '" + attr.name + "'");
      } else {
        check_value(attr, it->second, sp + ".values." + attr.name, out);
      }
    }
    for (const auto& [key, value] : sc.values) {
      if (!problem.attribute_index(key)) {
        out.error(sp + ".values." + key, "value for unknown attribute '" + key + "'");
      }
    }
  }

  if (!probabilities_finite) return;
  if (option.scenarios.size() == 1) {
    if (option.scenarios.front().probability != 1.0) {
      out.error(path + ".scenarios[0].probability",
                "single-scenario option must have probability exactly 1");
    }
  } else if (std::abs(total - 1.0) > kProbabilityTolerance) {
    out.error(path + ".scenarios",
              "scenario probabilities sum to " + format_number(total) + ", expected 1");
  }
}

}  // namespace

std::optional<std::size_t> DecisionProblem::attribute_index(std::string_view attribute) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i].name == attribute) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> DecisionProblem::option_index(std::string_view option) const {
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (options[i].name == option) return i;
  }
  return std::nullopt;
}

namespace {
std::string summarize(const ValidationReport& report) {
  for (const Issue& issue : report.issues) {
    if (issue.severity == Severity::error) {
      return "invalid problem: " + issue.path + ": " + issue.message;
    }
  }
  return "invalid problem";
}
}  // namespace

ValidationError::ValidationError(ValidationReport report)
    : Error(summarize(report)), report_(std::move(report)) {}

std::string_view to_string(DisplayScale v) {
  return v == DisplayScale::unit ? "unit" : "percent";
}
std::string_view to_string(Aggregation v) {
  return v == Aggregation::additive ? "additive" : "multiplicative";
}
std::string_view to_string(AttributeKind v) {
  return v == AttributeKind::direct ? "direct" : "derived";
}
std::string_view to_string(Direction v) {
  return v == Direction::higher_better ? "higher_better" : "lower_better";
}
std::string_view to_string(CurveShape v) {
  switch (v) {
    case CurveShape::linear: return "linear";
    case CurveShape::power: return "power";
    case CurveShape::s_shape: return "s_shape";
  }
  return "linear";
}
std::string_view to_string(Severity v) { return v == Severity::error ? "error" : "warning"; }

ValidationReport validate_problem(const DecisionProblem& problem) {
  Collector out;

  if (problem.schema_version != kSchemaVersion) {
    out.error("schema_version", "unsupported schema_version '" + problem.schema_version +
                                    "', expected '" + std::string(kSchemaVersion) + "'");
  }
  if (problem.attributes.empty()) out.error("attributes", "at least one attribute is required");
  if (problem.options.empty()) out.error("options", "at least one option is required");

  std::set<std::string> seen;
  bool any_positive = false;
  double importance_sum = 0.0;
  for (std::size_t i = 0; i < problem.attributes.size(); ++i) {
    const Attribute& attr = problem.attributes[i];
    const std::string path = index_path("attributes", i);
    if (!attr.name.empty() && !seen.insert(attr.name).second) {
      out.error(path + ".name", "duplicate attribute name '" + attr.name + "'");
    }
    check_attribute(attr, path, out);
    if (std::isfinite(attr.importance) && attr.importance > 0.0) {
      any_positive = true;
      importance_sum += attr.importance;
    }
  }
  if (!problem.attributes.empty() && !any_positive) {
    out.error("attributes", "no positive importance: at least one attribute needs importance > 0");
  } else if (!std::isfinite(importance_sum)) {
    out.error("attributes", "importance scores overflow when summed");
  }

  seen.clear();
  for (std::size_t j = 0; j < problem.options.size(); ++j) {
    const OptionRecord& option = problem.options[j];
    const std::string path = index_path("options", j);
    if (!option.name.empty() && !seen.insert(option.name).second) {
      out.error(path + ".name", "duplicate option name '" + option.name + "'");
    }
    check_option(problem, option, path, out);
  }
  return out.take();
}

void require_valid(const DecisionProblem& problem) {
  ValidationReport report = validate_problem(problem);
  if (!report.ok) throw ValidationError(std::move(report));
}

}  // namespace maua
