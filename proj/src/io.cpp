#include "maua/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

namespace maua {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
  throw ParseError(ParseError::Kind::schema, path, path + ": " + message);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<std::string_view> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (std::string_view k : allowed) known = known || item.key() == k;
    if (!known) schema_error(path + "." + item.key(), "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "required field missing");
  return *it;
}

const json* optional_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) schema_error(path, "expected a string");
  return v.get<std::string>();
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  return v.get<double>();
}

const json& as_object(const json& v, const std::string& path) {
  if (!v.is_object()) schema_error(path, "expected an object");
  return v;
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array");
  return v;
}

std::string indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

DisplayScale parse_display_scale(const json& v, const std::string& path) {
  const std::string s = as_string(v, path);
  if (s == "unit") return DisplayScale::unit;
  if (s == "percent") return DisplayScale::percent;
  schema_error(path, "expected \"unit\" or \"percent\", got \"" + s + "\"");
}

Aggregation parse_aggregation(const json& v, const std::string& path) {
  const std::string s = as_string(v, path);
  if (s == "additive") return Aggregation::additive;
  if (s == "multiplicative") return Aggregation::multiplicative;
  schema_error(path, "expected \"additive\" or \"multiplicative\", got \"" + s + "\"");
}

CurveSpec parse_curve(const json& v, const std::string& path) {
  as_object(v, path);
  reject_unknown_keys(v, path, {"shape", "gamma"});
  const std::string shape = as_string(require(v, path, "shape"), path + ".shape");
  const json* gamma = optional_field(v, "gamma");
  const std::string gamma_path = path + ".gamma";

  if (shape == "linear" || shape == "s_shape") {
    if (gamma) schema_error(gamma_path, "gamma only applies to power curves");
    return {shape == "linear" ? CurveShape::linear : CurveShape::s_shape, 1.0};
  }
  if (shape == "power") {
    return {CurveShape::power, gamma ? as_number(*gamma, gamma_path) : kDefaultConcaveGamma};
  }
  if (shape == "concave") {
    const double g = gamma ? as_number(*gamma, gamma_path) : kDefaultConcaveGamma;
    if (!(g > 0.0 && g < 1.0)) schema_error(gamma_path, "concave curve requires 0 < gamma < 1");
    return {CurveShape::power, g};
  }
  if (shape == "convex") {
    const double g = gamma ? as_number(*gamma, gamma_path) : kDefaultConvexGamma;
    if (!(g > 1.0)) schema_error(gamma_path, "convex curve requires gamma > 1");
    return {CurveShape::power, g};
  }
  schema_error(path + ".shape", "unknown curve shape \"" + shape +
                                    "\" (expected linear, power, concave, convex or s_shape)");
}

Attribute parse_attribute(const json& v, const std::string& path) {
  as_object(v, path);
  reject_unknown_keys(v, path, {"name", "importance", "kind", "direction", "range", "curve"});

  Attribute attr;
  attr.name = as_string(require(v, path, "name"), path + ".name");
  attr.importance = as_number(require(v, path, "importance"), path + ".importance");
  const std::string kind = as_string(require(v, path, "kind"), path + ".kind");

  const json* direction = optional_field(v, "direction");
  const json* range = optional_field(v, "range");
  const json* curve = optional_field(v, "curve");

  if (kind == "direct") {
    attr.kind = AttributeKind::direct;
    if (direction) schema_error(path + ".direction", "not allowed on a direct attribute");
    if (range) schema_error(path + ".range", "not allowed on a direct attribute");
    if (curve) schema_error(path + ".curve", "not allowed on a direct attribute");
    return attr;
  }
  if (kind != "derived") {
    schema_error(path + ".kind", "expected \"direct\" or \"derived\", got \"" + kind + "\"");
  }

  attr.kind = AttributeKind::derived;
  DerivedScale scale;
  if (!direction) schema_error(path + ".direction", "required field missing");
  const std::string dir = as_string(*direction, path + ".direction");
  if (dir == "higher_better") {
    scale.direction = Direction::higher_better;
  } else if (dir == "lower_better") {
    scale.direction = Direction::lower_better;
  } else {
    schema_error(path + ".direction",
                 "expected \"higher_better\" or \"lower_better\", got \"" + dir + "\"");
  }
  if (!range) schema_error(path + ".range", "required field missing");
  as_array(*range, path + ".range");
  if (range->size() != 2) schema_error(path + ".range", "expected [low, high]");
  scale.range_low = as_number((*range)[0], path + ".range[0]");
  scale.range_high = as_number((*range)[1], path + ".range[1]");
  if (curve) scale.curve = parse_curve(*curve, path + ".curve");
  attr.scale = scale;
  return attr;
}

std::map<std::string, double> parse_values(const json& v, const std::string& path) {
  as_object(v, path);
  std::map<std::string, double> values;
  for (const auto& item : v.items()) {
    values[item.key()] = as_number(item.value(), path + "." + item.key());
  }
  return values;
}

OptionRecord parse_option(const json& v, const std::string& path) {
  as_object(v, path);
  reject_unknown_keys(v, path, {"name", "values", "scenarios"});

  OptionRecord option;
  option.name = as_string(require(v, path, "name"), path + ".name");
  const json* values = optional_field(v, "values");
  const json* scenarios = optional_field(v, "scenarios");
  if (values && scenarios) schema_error(path, "give either \"values\" or \"scenarios\", not both");
  if (!values && !scenarios) schema_error(path + ".values", "required field missing");

  if (values) {
    option.scenarios.push_back({1.0, parse_values(*values, path + ".values")});
    return option;
  }
  as_array(*scenarios, path + ".scenarios");
  for (std::size_t k = 0; k < scenarios->size(); ++k) {
    const std::string sp = indexed(path + ".scenarios", k);
    const json& sc = as_object((*scenarios)[k], sp);
    reject_unknown_keys(sc, sp, {"probability", "values"});
    Scenario scenario;
    scenario.probability = as_number(require(sc, sp, "probability"), sp + ".probability");
    scenario.values = parse_values(require(sc, sp, "values"), sp + ".values");
    option.scenarios.push_back(std::move(scenario));
  }
  return option;
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

Json values_to_json(const DecisionProblem& problem, const std::map<std::string, double>& values) {
  Json out = Json::object();
  for (const Attribute& attr : problem.attributes) {
    if (auto it = values.find(attr.name); it != values.end()) out[attr.name] = it->second;
  }
  for (const auto& [key, value] : values) {
    if (!out.contains(key)) out[key] = value;
  }
  return out;
}

Json ranking_to_json(const Ranking& ranking, DisplayScale scale) {
  Json out = Json::array();
  for (const RankEntry& e : ranking.entries) {
    Json entry;
    entry["name"] = e.name;
    entry["utility"] = e.utility;
    entry["display_utility"] = to_display(e.utility, scale);
    entry["rank"] = e.rank;
    entry["tied"] = ranking.count_at(e.rank) > 1;
    out.push_back(std::move(entry));
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_number(std::string_view cell) {
  const std::string s = trim(cell);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out;
}

}  // namespace

ParseError::ParseError(Kind kind, std::string path, const std::string& message, int line,
                       int column)
    : Error(message), kind_(kind), path_(std::move(path)), line_(line), column_(column) {}

CsvError::CsvError(const std::string& message, int row, std::string column)
    : Error(message), row_(row), column_(std::move(column)) {}

DecisionProblem problem_from_json(const json& doc) {
  const std::string root = "$";
  as_object(doc, root);
  reject_unknown_keys(doc, root,
                      {"schema_version", "name", "display_scale", "aggregation", "attributes",
                       "options"});

  DecisionProblem problem;
  const json& version = require(doc, root, "schema_version");
  problem.schema_version = as_string(version, "$.schema_version");
  if (problem.schema_version != kSchemaVersion) {
    throw ParseError(ParseError::Kind::unsupported_version, "$.schema_version",
                     "unsupported schema_version \"" + problem.schema_version + "\", expected \"" +
                         std::string(kSchemaVersion) + "\"");
  }
  problem.name = as_string(require(doc, root, "name"), "$.name");
  if (const json* v = optional_field(doc, "display_scale")) {
    problem.display_scale = parse_display_scale(*v, "$.display_scale");
  }
  if (const json* v = optional_field(doc, "aggregation")) {
    problem.aggregation = parse_aggregation(*v, "$.aggregation");
  }

  const json& attributes = as_array(require(doc, root, "attributes"), "$.attributes");
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    problem.attributes.push_back(parse_attribute(attributes[i], indexed("$.attributes", i)));
  }
  const json& options = as_array(require(doc, root, "options"), "$.options");
  for (std::size_t j = 0; j < options.size(); ++j) {
    problem.options.push_back(parse_option(options[j], indexed("$.options", j)));
  }
  return problem;
}

DecisionProblem parse_problem(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    throw ParseError(ParseError::Kind::syntax, "",
                     "malformed JSON at line " + std::to_string(line) + ", column " +
                         std::to_string(column),
                     line, column);
  }
  return problem_from_json(doc);
}

Json problem_to_json(const DecisionProblem& problem) {
  Json doc;
  doc["schema_version"] = problem.schema_version;
  doc["name"] = problem.name;
  doc["display_scale"] = to_string(problem.display_scale);
  doc["aggregation"] = to_string(problem.aggregation);

  Json attributes = Json::array();
  for (const Attribute& attr : problem.attributes) {
    Json a;
    a["name"] = attr.name;
    a["importance"] = attr.importance;
    a["kind"] = to_string(attr.kind);
    if (attr.scale) {
      a["direction"] = to_string(attr.scale->direction);
      a["range"] = Json::array({attr.scale->range_low, attr.scale->range_high});
      Json curve;
      curve["shape"] = to_string(attr.scale->curve.shape);
      if (attr.scale->curve.shape == CurveShape::power) curve["gamma"] = attr.scale->curve.gamma;
      a["curve"] = std::move(curve);
    }
    attributes.push_back(std::move(a));
  }
  doc["attributes"] = std::move(attributes);

  Json options = Json::array();
  for (const OptionRecord& option : problem.options) {
    Json o;
    o["name"] = option.name;
    if (option.scenarios.size() == 1 && option.scenarios.front().probability == 1.0) {
      o["values"] = values_to_json(problem, option.scenarios.front().values);
    } else {
      Json scenarios = Json::array();
      for (const Scenario& sc : option.scenarios) {
        Json s;
        s["probability"] = sc.probability;
        s["values"] = values_to_json(problem, sc.values);
        scenarios.push_back(std::move(s));
      }
      o["scenarios"] = std::move(scenarios);
    }
    options.push_back(std::move(o));
  }
  doc["options"] = std::move(options);
  return doc;
}

std::string serialize_problem(const DecisionProblem& problem) {
  return problem_to_json(problem).dump(2) + "\n";
}

std::vector<std::vector<std::string>> read_csv_records(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      // CRLF: handled on the '\n'.
    } else if (c == '\n') {
      end_record();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) throw CsvError("unterminated quoted field", static_cast<int>(records.size()) + 1);
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

std::vector<OptionRecord> import_csv(std::string_view text, std::span<const Attribute> attributes) {
  const auto records = read_csv_records(text);

  std::vector<std::string> expected{"option"};
  for (const Attribute& a : attributes) expected.push_back(a.name);

  auto is_blank = [](const std::vector<std::string>& r) {
    return r.size() == 1 && trim(r.front()).empty();
  };

  std::size_t header_at = 0;
  while (header_at < records.size() && is_blank(records[header_at])) ++header_at;
  if (header_at == records.size()) throw CsvError("missing header row");

  std::vector<std::string> found;
  for (const std::string& h : records[header_at]) found.push_back(trim(h));
  if (found != expected) {
    throw CsvError("header mismatch: expected [" + join(expected) + "], found [" + join(found) +
                       "]",
                   static_cast<int>(header_at) + 1);
  }

  std::vector<OptionRecord> options;
  std::set<std::string> seen;
  for (std::size_t r = header_at + 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (is_blank(rec)) continue;
    const int row = static_cast<int>(r) + 1;
    if (rec.size() != expected.size()) {
      throw CsvError("row " + std::to_string(row) + ": expected " +
                         std::to_string(expected.size()) + " fields, found " +
                         std::to_string(rec.size()),
                     row);
    }
    const std::string name = trim(rec[0]);
    if (name.empty()) throw CsvError("row " + std::to_string(row) + ": empty option name", row, "option");
    if (!seen.insert(name).second) {
      throw CsvError("row " + std::to_string(row) + ": duplicate option name \"" + name + "\"", row,
                     "option");
    }
    std::map<std::string, double> values;
    for (std::size_t c = 0; c < attributes.size(); ++c) {
      const auto v = parse_number(rec[c + 1]);
      if (!v) {
        throw CsvError("row " + std::to_string(row) + ", column \"" + attributes[c].name +
                           "\": not a number: \"" + rec[c + 1] + "\"",
                       row, attributes[c].name);
      }
      values[attributes[c].name] = *v;
    }
    options.push_back(OptionRecord::single(name, std::move(values)));
  }
  if (options.empty()) throw CsvError("no options: the CSV has no data rows");
  return options;
}

Json report_to_json(const ValidationReport& report) {
  Json out;
  out["ok"] = report.ok;
  Json issues = Json::array();
  for (const Issue& issue : report.issues) {
    Json i;
    i["severity"] = to_string(issue.severity);
    i["path"] = issue.path;
    i["message"] = issue.message;
    issues.push_back(std::move(i));
  }
  out["issues"] = std::move(issues);
  return out;
}

Json evaluation_to_json(const EvaluationResult& result, const Ranking& ranking) {
  Json out;
  out["name"] = result.problem_name;
  out["aggregation"] = to_string(result.aggregation);
  out["display_scale"] = to_string(result.display_scale);

  Json attributes = Json::array();
  for (std::size_t i = 0; i < result.attribute_names.size(); ++i) {
    Json a;
    a["name"] = result.attribute_names[i];
    a["weight"] = result.weights[i];
    attributes.push_back(std::move(a));
  }
  out["attributes"] = std::move(attributes);

  Json options = Json::array();
  for (const OptionResult& o : result.options) {
    Json j;
    j["name"] = o.name;
    j["utility"] = o.utility;
    j["display_utility"] = o.display_utility;
    if (!o.contributions.empty()) {
      Json contributions = Json::object();
      for (std::size_t i = 0; i < o.contributions.size(); ++i) {
        contributions[result.attribute_names[i]] = o.contributions[i];
      }
      j["contributions"] = std::move(contributions);
    }
    if (!o.scenario_utilities.empty()) j["scenario_utilities"] = o.scenario_utilities;
    options.push_back(std::move(j));
  }
  out["options"] = std::move(options);
  out["ranking"] = ranking_to_json(ranking, result.display_scale);
  return out;
}

Json sweep_to_json(const std::string& attribute, const EvaluationResult& shape,
                   const std::vector<SweepPoint>& points) {
  Json out;
  out["attribute"] = attribute;
  out["mode"] = "sweep";
  out["samples"] = points.size();
  Json names = Json::array();
  for (const OptionResult& o : shape.options) names.push_back(o.name);
  out["options"] = std::move(names);

  Json pts = Json::array();
  for (const SweepPoint& p : points) {
    Json j;
    j["t"] = p.t;
    j["weights"] = p.weights.values;
    std::vector<double> utilities(shape.options.size(), 0.0);
    for (const RankEntry& e : p.ranking.entries) utilities[e.option_index] = e.utility;
    j["utilities"] = utilities;
    j["ranking"] = ranking_to_json(p.ranking, shape.display_scale);
    pts.push_back(std::move(j));
  }
  out["points"] = std::move(pts);
  return out;
}

Json critical_to_json(const CriticalWeights& critical) {
  Json out;
  out["attribute"] = critical.attribute;
  out["mode"] = "critical";
  out["current_weight"] = critical.current_weight;
  out["top_at_0"] = critical.top_at_zero;
  out["top_at_1"] = critical.top_at_one;
  Json bps = Json::array();
  for (const Breakpoint& b : critical.breakpoints) {
    Json j;
    j["t"] = b.t;
    j["before"] = b.before;
    j["after"] = b.after;
    bps.push_back(std::move(j));
  }
  out["breakpoints"] = std::move(bps);
  return out;
}

Json sensitivity_report_to_json(const SensitivityReport& report) {
  Json out = Json::array();
  for (const CriticalWeights& c : report.attributes) out.push_back(critical_to_json(c));
  return out;
}

Json overrides_to_json(const std::vector<Override>& overrides) {
  Json out = Json::array();
  for (const Override& o : overrides) {
    Json j;
    if (o.kind == Override::Kind::importance) {
      j["attribute"] = o.attribute;
      j["importance"] = o.value;
    } else {
      j["option"] = o.option;
      j["attribute"] = o.attribute;
      if (o.scenario) j["scenario"] = *o.scenario;
      j["value"] = o.value;
    }
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<Override> overrides_from_json(const json& overrides) {
  const std::string root = "$.overrides";
  as_array(overrides, root);
  std::vector<Override> out;
  for (std::size_t k = 0; k < overrides.size(); ++k) {
    const std::string path = indexed(root, k);
    const json& o = as_object(overrides[k], path);
    reject_unknown_keys(o, path, {"attribute", "importance", "option", "value", "scenario"});
    Override ov;
    ov.attribute = as_string(require(o, path, "attribute"), path + ".attribute");
    const json* importance = optional_field(o, "importance");
    const json* value = optional_field(o, "value");
    if (importance && value) schema_error(path, "give either \"importance\" or \"value\", not both");
    if (importance) {
      ov.kind = Override::Kind::importance;
      ov.value = as_number(*importance, path + ".importance");
      if (optional_field(o, "option") || optional_field(o, "scenario")) {
        schema_error(path, "importance overrides take no option or scenario");
      }
    } else {
      if (!value) schema_error(path + ".value", "required field missing");
      ov.kind = Override::Kind::value;
      ov.value = as_number(*value, path + ".value");
      ov.option = as_string(require(o, path, "option"), path + ".option");
      if (const json* sc = optional_field(o, "scenario")) {
        if (!sc->is_number_unsigned() && !(sc->is_number_integer() && sc->get<long long>() >= 0)) {
          schema_error(path + ".scenario", "expected a non-negative integer");
        }
        ov.scenario = sc->get<std::size_t>();
      }
    }
    out.push_back(std::move(ov));
  }
  return out;
}

Json what_if_to_json(const WhatIfDelta& delta) {
  Json out;
  out["overrides"] = overrides_to_json(delta.overrides);
  Json options = Json::array();
  for (const OptionDelta& d : delta.options) {
    Json j;
    j["name"] = d.name;
    j["before"] = d.before;
    j["after"] = d.after;
    j["delta"] = d.delta;
    j["rank_before"] = d.rank_before;
    j["rank_after"] = d.rank_after;
    j["rank_movement"] = d.rank_movement;
    options.push_back(std::move(j));
  }
  out["options"] = std::move(options);
  out["before"] = evaluation_to_json(delta.before, delta.ranking_before);
  out["after"] = evaluation_to_json(delta.after, delta.ranking_after);
  return out;
}

std::string render_evaluation(const EvaluationResult& result, const Ranking& ranking) {
  return evaluation_to_json(result, ranking).dump(2) + "\n";
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  std::string s = buf;
  if (s == "-0" || s.rfind("-0.", 0) == 0) {
    // Avoid printing negative zero for tiny negative deltas.
    bool all_zero = s.find_first_not_of("-0.") == std::string::npos;
    if (all_zero) s.erase(0, 1);
  }
  return s;
}

std::string format_display(double display_value, DisplayScale scale) {
  std::string s = format_fixed(display_value, 4);
  if (scale == DisplayScale::percent && s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

std::string results_to_csv(const EvaluationResult& result, const Ranking& ranking) {
  std::string out = "option,utility,rank";
  for (const std::string& name : result.attribute_names) out += "," + csv_field(name);
  out += "\n";
  for (const RankEntry& e : ranking.entries) {
    const OptionResult& o = result.options[e.option_index];
    out += csv_field(o.name) + "," + format_fixed(o.display_utility, 6) + "," +
           std::to_string(e.rank);
    for (std::size_t i = 0; i < result.attribute_names.size(); ++i) {
      out += ",";
      if (!o.contributions.empty()) {
        out += format_fixed(to_display(o.contributions[i], result.display_scale), 6);
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace maua
