#include <doctest.h>

#include <algorithm>

#include "maua/model.hpp"
#include "support/fixtures.hpp"

using namespace maua;

namespace {

bool has_issue(const ValidationReport& r, const std::string& path, Severity severity,
               const std::string& fragment = {}) {
  return std::any_of(r.issues.begin(), r.issues.end(), [&](const Issue& i) {
    return i.path == path && i.severity == severity &&
           i.message.find(fragment) != std::string::npos;
  });
}

DecisionProblem two_by_two() {
  DecisionProblem p;
  p.name = "toy";
  p.attributes = {Attribute::direct("x", 1.0), Attribute::direct("y", 1.0)};
  p.options = {OptionRecord::single("A", {{"x", 100}, {"y", 0}}),
               OptionRecord::single("B", {{"x", 0}, {"y", 100}})};
  return p;
}

}  // namespace

TEST_CASE("table 1 problem validates") {
  const ValidationReport r = validate_problem(testing::load_fixture("table1.json"));
  CHECK(r.ok);
  CHECK(r.issues.empty());
}

TEST_CASE("negative importance is reported at its path") {
  DecisionProblem p = two_by_two();
  p.attributes[0].importance = -1;
  const ValidationReport r = validate_problem(p);
  CHECK_FALSE(r.ok);
  CHECK(has_issue(r, "attributes[0].importance", Severity::error, "non-negative"));
}

TEST_CASE("degenerate derived range") {
  DecisionProblem p = two_by_two();
  p.attributes[0] = Attribute::derived("x", 1.0, {Direction::higher_better, 50, 50, {}});
  const ValidationReport r = validate_problem(p);
  CHECK_FALSE(r.ok);
  CHECK(has_issue(r, "attributes[0].range", Severity::error, "degenerate range"));
}

TEST_CASE("all importances zero") {
  DecisionProblem p = two_by_two();
  for (Attribute& a : p.attributes) a.importance = 0;
  const ValidationReport r = validate_problem(p);
  CHECK_FALSE(r.ok);
  CHECK(has_issue(r, "attributes", Severity::error, "no positive importance"));
}

TEST_CASE("empty problem needs attributes and options") {
  const ValidationReport r = validate_problem(DecisionProblem{});
  CHECK(has_issue(r, "attributes", Severity::error));
  CHECK(has_issue(r, "options", Severity::error));
}

TEST_CASE("duplicate names") {
  DecisionProblem p = two_by_two();
  p.attributes[1].name = "x";
  p.options[1].name = "A";
  const ValidationReport r = validate_problem(p);
  CHECK(has_issue(r, "attributes[1].name", Severity::error, "duplicate"));
  CHECK(has_issue(r, "options[1].name", Severity::error, "duplicate"));
}

TEST_CASE("attribute names are case-sensitive") {
  DecisionProblem p = two_by_two();
  p.attributes[1].name = "X";
  p.options[0].scenarios[0].values = {{"x", 1}, {"X", 2}};
  p.options[1].scenarios[0].values = {{"x", 3}, {"X", 4}};
  CHECK(validate_problem(p).ok);
}

TEST_CASE("missing and unknown values") {
  DecisionProblem p = two_by_two();
  p.options[0].scenarios[0].values.erase("y");
  p.options[1].scenarios[0].values["z"] = 1;
  const ValidationReport r = validate_problem(p);
  CHECK(has_issue(r, "options[0].scenarios[0].values.y", Severity::error, "missing"));
  CHECK(has_issue(r, "options[1].scenarios[0].values.z", Severity::error, "unknown"));
}

TEST_CASE("direct values must lie on the 0-100 scale") {
  DecisionProblem p = two_by_two();
  p.options[0].scenarios[0].values["x"] = 100.5;
  p.options[1].scenarios[0].values["y"] = -0.1;
  const ValidationReport r = validate_problem(p);
  CHECK(has_issue(r, "options[0].scenarios[0].values.x", Severity::error));
  CHECK(has_issue(r, "options[1].scenarios[0].values.y", Severity::error));
}

TEST_CASE("derived values outside the anchors only warn") {
  DecisionProblem p = two_by_two();
  p.attributes[0] = Attribute::derived("x", 1.0, {Direction::higher_better, 0, 50, {}});
  p.options[0].scenarios[0].values["x"] = 60;
  const ValidationReport r = validate_problem(p);
  CHECK(r.ok);
  CHECK(has_issue(r, "options[0].scenarios[0].values.x", Severity::warning, "clamped"));
}

TEST_CASE("kind and scale must agree") {
  DecisionProblem p = two_by_two();
  p.attributes[0].scale = DerivedScale{};
  p.attributes[1].kind = AttributeKind::derived;
  const ValidationReport r = validate_problem(p);
  CHECK(has_issue(r, "attributes[0]", Severity::error, "direct attribute"));
  CHECK(has_issue(r, "attributes[1]", Severity::error, "derived attribute"));
}

TEST_CASE("power curve gamma must be positive") {
  DecisionProblem p = two_by_two();
  p.attributes[0] = Attribute::derived(
      "x", 1.0, {Direction::higher_better, 0, 100, {CurveShape::power, 0.0}});
  CHECK(has_issue(validate_problem(p), "attributes[0].curve.gamma", Severity::error));
}

TEST_CASE("scenario probabilities") {
  DecisionProblem p = two_by_two();
  const auto values = p.options[0].scenarios[0].values;

  SUBCASE("single scenario must be certain") {
    p.options[0].scenarios[0].probability = 0.999;
    CHECK(has_issue(validate_problem(p), "options[0].scenarios[0].probability", Severity::error));
  }
  SUBCASE("sum within tolerance") {
    p.options[0].scenarios = {{0.3, values}, {0.7 + 5e-10, values}};
    CHECK(validate_problem(p).ok);
  }
  SUBCASE("sum outside tolerance") {
    p.options[0].scenarios = {{0.3, values}, {0.6, values}};
    CHECK(has_issue(validate_problem(p), "options[0].scenarios", Severity::error, "sum"));
  }
  SUBCASE("probability outside [0,1]") {
    p.options[0].scenarios = {{-0.5, values}, {1.5, values}};
    CHECK(has_issue(validate_problem(p), "options[0].scenarios[0].probability", Severity::error));
  }
  SUBCASE("no scenarios") {
    p.options[0].scenarios.clear();
    CHECK(has_issue(validate_problem(p), "options[0].scenarios", Severity::error));
  }
}

TEST_CASE("unsupported schema version") {
  DecisionProblem p = two_by_two();
  p.schema_version = "2";
  CHECK(has_issue(validate_problem(p), "schema_version", Severity::error));
}

TEST_CASE("validation is pure") {
  DecisionProblem p = two_by_two();
  p.attributes[0].importance = -3;
  CHECK(validate_problem(p) == validate_problem(p));
}

TEST_CASE("require_valid carries the report") {
  DecisionProblem p = two_by_two();
  p.attributes[0].importance = -1;
  try {
    require_valid(p);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK_FALSE(e.report().ok);
    CHECK(std::string(e.what()).find("attributes[0].importance") != std::string::npos);
  }
}
