#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "maua/aggregation.hpp"
#include "maua/model.hpp"
#include "maua/sensitivity.hpp"

namespace maua {

using Json = nlohmann::ordered_json;

// Default exponents for curve keywords that omit gamma.
inline constexpr double kDefaultConcaveGamma = 0.5;
inline constexpr double kDefaultConvexGamma = 2.0;

class ParseError : public Error {
 public:
  enum class Kind { syntax, schema, unsupported_version };

  ParseError(Kind kind, std::string path, const std::string& message, int line = 0,
             int column = 0);

  Kind kind() const noexcept { return kind_; }
  // JSON path of the offending node ("$.options"); empty for syntax errors.
  const std::string& path() const noexcept { return path_; }
  // 1-based position of a syntax error; 0 otherwise.
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  Kind kind_;
  std::string path_;
  int line_;
  int column_;
};

class CsvError : public Error {
 public:
  // row is the 1-based record number in the file (the header is row 1);
  // column is the header name of the offending cell, when there is one.
  CsvError(const std::string& message, int row = 0, std::string column = {});

  int row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  int row_;
  std::string column_;
};

// Checks document shape only; call validate_problem for semantics.
DecisionProblem parse_problem(std::string_view text);
DecisionProblem problem_from_json(const nlohmann::json& doc);

// Canonical form: fixed key order, two-space indentation, trailing newline.
std::string serialize_problem(const DecisionProblem& problem);
Json problem_to_json(const DecisionProblem& problem);

// Parses CSV text whose header is "option" followed by the attribute names
// in order. Accepts LF or CRLF line endings and RFC 4180 quoting.
std::vector<OptionRecord> import_csv(std::string_view text, std::span<const Attribute> attributes);

// Splits CSV text into records. Exposed for tests.
std::vector<std::vector<std::string>> read_csv_records(std::string_view text);

// Machine-readable results. Utilities carry full double precision.
Json report_to_json(const ValidationReport& report);
Json evaluation_to_json(const EvaluationResult& result, const Ranking& ranking);
Json sweep_to_json(const std::string& attribute, const EvaluationResult& shape,
                   const std::vector<SweepPoint>& points);
Json critical_to_json(const CriticalWeights& critical);
Json sensitivity_report_to_json(const SensitivityReport& report);
Json what_if_to_json(const WhatIfDelta& delta);

Json overrides_to_json(const std::vector<Override>& overrides);
// Throws ParseError (schema) on malformed entries.
std::vector<Override> overrides_from_json(const nlohmann::json& overrides);

// Evaluation JSON body shared by the CLI (--json) and the HTTP service.
std::string render_evaluation(const EvaluationResult& result, const Ranking& ranking);

// One row per option in ranking order: option, utility (display scale),
// rank, then one contribution column per attribute. LF line endings.
std::string results_to_csv(const EvaluationResult& result, const Ranking& ranking);

// Fixed-point text with `digits` fractional digits ("0.588889").
std::string format_fixed(double value, int digits);

// Fixed 4-digit display form; the percent scale drops trailing zeros so
// 76 prints as "76" and 77.5 as "77.5".
std::string format_display(double display_value, DisplayScale scale);

}  // namespace maua
