#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace maua {

inline constexpr std::string_view kSchemaVersion = "1";

enum class DisplayScale { unit, percent };
enum class Aggregation { additive, multiplicative };
enum class AttributeKind { direct, derived };
enum class Direction { higher_better, lower_better };
enum class CurveShape { linear, power, s_shape };

// gamma is only meaningful for CurveShape::power (< 1 concave, > 1 convex).
struct CurveSpec {
  CurveShape shape = CurveShape::linear;
  double gamma = 1.0;

  bool operator==(const CurveSpec&) const = default;
};

// Anchors and shape for attributes measured in their own units.
struct DerivedScale {
  Direction direction = Direction::higher_better;
  double range_low = 0.0;
  double range_high = 1.0;
  CurveSpec curve;

  bool operator==(const DerivedScale&) const = default;
};

struct Attribute {
  std::string name;
  double importance = 0.0;
  AttributeKind kind = AttributeKind::direct;
  // Present exactly when kind == derived (checked by validate_problem).
  std::optional<DerivedScale> scale;

  static Attribute direct(std::string name, double importance) {
    return {std::move(name), importance, AttributeKind::direct, std::nullopt};
  }
  static Attribute derived(std::string name, double importance, DerivedScale scale) {
    return {std::move(name), importance, AttributeKind::derived, scale};
  }

  bool operator==(const Attribute&) const = default;
};

struct Scenario {
  double probability = 1.0;
  std::map<std::string, double> values;

  bool operator==(const Scenario&) const = default;
};

struct OptionRecord {
  std::string name;
  std::vector<Scenario> scenarios;

  static OptionRecord single(std::string name, std::map<std::string, double> values) {
    return {std::move(name), {Scenario{1.0, std::move(values)}}};
  }

  bool operator==(const OptionRecord&) const = default;
};

struct DecisionProblem {
  std::string schema_version{kSchemaVersion};
  std::string name;
  DisplayScale display_scale = DisplayScale::unit;
  Aggregation aggregation = Aggregation::additive;
  std::vector<Attribute> attributes;
  std::vector<OptionRecord> options;

  // Index into attributes, or nullopt.
  std::optional<std::size_t> attribute_index(std::string_view attribute) const;
  std::optional<std::size_t> option_index(std::string_view option) const;

  bool operator==(const DecisionProblem&) const = default;
};

enum class Severity { error, warning };

struct Issue {
  Severity severity = Severity::error;
  std::string path;
  std::string message;

  bool operator==(const Issue&) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Issue> issues;

  bool operator==(const ValidationReport&) const = default;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-domain numeric input: degenerate ranges, values off the canonical
// scale, empty or zero-sum importance vectors, length mismatches.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operation not defined for this problem shape (e.g. exact breakpoints in
// multiplicative mode).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Reference to an attribute or option that does not exist.
class LookupError : public Error {
 public:
  LookupError(std::string path, const std::string& message)
      : Error(message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

std::string_view to_string(DisplayScale v);
std::string_view to_string(Aggregation v);
std::string_view to_string(AttributeKind v);
std::string_view to_string(Direction v);
std::string_view to_string(CurveShape v);
std::string_view to_string(Severity v);

// Returns every violated invariant; never throws.
ValidationReport validate_problem(const DecisionProblem& problem);

// Throws ValidationError when the report carries an error.
void require_valid(const DecisionProblem& problem);

}  // namespace maua
