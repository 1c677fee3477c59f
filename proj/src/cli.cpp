#include "maua/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "maua/aggregation.hpp"
#include "maua/io.hpp"
#include "maua/sensitivity.hpp"
#include "maua/service.hpp"

namespace maua {

namespace {

struct IoFailure {
  std::string message;
};

std::string read_input(const std::string& path, std::istream& in) {
  std::ostringstream ss;
  if (path == "-") {
    ss << in.rdbuf();
    return ss.str();
  }
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoFailure{"cannot read " + path};
  ss << file.rdbuf();
  return ss.str();
}

void print_issues(const ValidationReport& report, std::ostream& os) {
  for (const Issue& issue : report.issues) {
    os << to_string(issue.severity) << ' ' << issue.path << ": " << issue.message << '\n';
  }
}

// Renders rows as left-aligned columns separated by two spaces.
void print_table(const std::vector<std::vector<std::string>>& rows, std::ostream& os) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    os << line << '\n';
  }
}

std::string rank_label(const Ranking& ranking, int rank) {
  return std::to_string(rank) + (ranking.count_at(rank) > 1 ? "=" : "");
}

void print_evaluation(const EvaluationResult& result, const Ranking& ranking, std::ostream& os) {
  os << (result.problem_name.empty() ? "Evaluation" : result.problem_name) << " ("
     << to_string(result.aggregation) << ", " << to_string(result.display_scale) << " scale)\n";
  os << "Weights:";
  for (std::size_t i = 0; i < result.attribute_names.size(); ++i) {
    os << (i ? ", " : " ") << result.attribute_names[i] << ' ' << format_fixed(result.weights[i], 4);
  }
  os << "\n\n";

  std::vector<std::vector<std::string>> rows{{"Rank", "Option", "Utility"}};
  for (const RankEntry& e : ranking.entries) {
    rows.push_back({rank_label(ranking, e.rank), e.name,
                    format_display(to_display(e.utility, result.display_scale),
                                   result.display_scale)});
  }
  print_table(rows, os);

  for (std::size_t i = 0; i < ranking.entries.size();) {
    const int rank = ranking.entries[i].rank;
    std::size_t j = i;
    std::string names;
    while (j < ranking.entries.size() && ranking.entries[j].rank == rank) {
      names += (j > i ? ", " : "") + ranking.entries[j].name;
      ++j;
    }
    if (j - i > 1) os << "Tie at rank " << rank << ": " << names << '\n';
    i = j;
  }
}

std::optional<double> parse_double(const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end || begin == end) return std::nullopt;
  return v;
}

// "attr.importance=V" or "option.attr=V"; names may contain dots.
std::optional<Override> parse_assignment(const std::string& text, const DecisionProblem& problem,
                                         std::string& error) {
  const auto eq = text.rfind('=');
  if (eq == std::string::npos) {
    error = "expected KEY=VALUE, got \"" + text + "\"";
    return std::nullopt;
  }
  const std::string key = text.substr(0, eq);
  const auto value = parse_double(text.substr(eq + 1));
  if (!value) {
    error = "not a number in \"" + text + "\"";
    return std::nullopt;
  }
  const std::string suffix = ".importance";
  if (key.size() > suffix.size() && key.ends_with(suffix)) {
    const std::string attr = key.substr(0, key.size() - suffix.size());
    if (problem.attribute_index(attr)) return Override::importance(attr, *value);
  }
  for (std::size_t dot = key.find('.'); dot != std::string::npos; dot = key.find('.', dot + 1)) {
    const std::string option = key.substr(0, dot);
    const std::string attr = key.substr(dot + 1);
    if (problem.option_index(option) && problem.attribute_index(attr)) {
      return Override::raw_value(option, attr, *value);
    }
  }
  error = "\"" + key + "\" names neither ATTRIBUTE.importance nor OPTION.ATTRIBUTE";
  return std::nullopt;
}

std::string signed_fixed(double v, int digits) {
  std::string s = format_fixed(v, digits);
  return s.front() == '-' ? s : "+" + s;
}

class Runner {
 public:
  Runner(std::istream& in, std::ostream& out, std::ostream& err) : in_(in), out_(out), err_(err) {}

  // Loads a document; prints the problem and returns nullopt with the exit
  // status in `status` on failure.
  std::optional<DecisionProblem> load(const std::string& path, int& status, bool validate = true) {
    std::string text;
    try {
      text = read_input(path, in_);
    } catch (const IoFailure& e) {
      err_ << "error: " << e.message << '\n';
      status = kExitIo;
      return std::nullopt;
    }
    DecisionProblem problem;
    try {
      problem = parse_problem(text);
    } catch (const ParseError& e) {
      err_ << "error: " << path << ": " << e.what() << '\n';
      status = kExitValidation;
      return std::nullopt;
    }
    if (validate) {
      const ValidationReport report = validate_problem(problem);
      if (!report.ok) {
        err_ << "error: " << path << " is not a valid problem\n";
        print_issues(report, err_);
        status = kExitValidation;
        return std::nullopt;
      }
    }
    return problem;
  }

  int validate(const std::string& path, bool json) {
    int status = kExitOk;
    std::string text;
    try {
      text = read_input(path, in_);
    } catch (const IoFailure& e) {
      err_ << "error: " << e.message << '\n';
      return kExitIo;
    }
    ValidationReport report;
    try {
      report = validate_problem(parse_problem(text));
    } catch (const ParseError& e) {
      report.ok = false;
      report.issues.push_back({Severity::error, e.path().empty() ? "$" : e.path(), e.what()});
    }
    if (json) {
      out_ << report_to_json(report).dump(2) << '\n';
    } else {
      if (report.ok) out_ << "OK: " << path << " is valid\n";
      print_issues(report, out_);
    }
    status = report.ok ? kExitOk : kExitValidation;
    return status;
  }

  int evaluate(const std::string& path, bool json, bool csv) {
    int status = kExitOk;
    auto problem = load(path, status);
    if (!problem) return status;
    const EvaluationResult result = evaluate_problem(*problem);
    const Ranking ranking = rank_options(result);
    if (json) {
      out_ << render_evaluation(result, ranking);
    } else if (csv) {
      out_ << results_to_csv(result, ranking);
    } else {
      print_evaluation(result, ranking, out_);
    }
    return kExitOk;
  }

  int sensitivity(const std::string& path, const std::string& attribute, const std::string& mode,
                  int samples, bool json) {
    int status = kExitOk;
    auto problem = load(path, status);
    if (!problem) return status;
    if (!problem->attribute_index(attribute)) {
      err_ << "error: unknown attribute \"" << attribute << "\"\n";
      return kExitUsage;
    }
    try {
      if (mode == "sweep") {
        const auto points = sweep_weight(*problem, attribute, samples);
        const EvaluationResult shape = evaluate_problem(*problem);
        if (json) {
          out_ << sweep_to_json(attribute, shape, points).dump(2) << '\n';
        } else {
          print_sweep(attribute, shape, points);
        }
      } else {
        const CriticalWeights critical = critical_weights(*problem, attribute);
        if (json) {
          out_ << critical_to_json(critical).dump(2) << '\n';
        } else {
          print_critical(critical);
        }
      }
    } catch (const UnsupportedError& e) {
      err_ << "error: " << e.what() << '\n';
      return kExitValidation;
    } catch (const DomainError& e) {
      err_ << "error: " << e.what() << '\n';
      return kExitUsage;
    }
    return kExitOk;
  }

  int whatif(const std::string& path, const std::vector<std::string>& sets, bool json) {
    int status = kExitOk;
    auto problem = load(path, status);
    if (!problem) return status;
    std::vector<Override> overrides;
    for (const std::string& s : sets) {
      std::string error;
      auto o = parse_assignment(s, *problem, error);
      if (!o) {
        err_ << "error: --set " << error << '\n';
        return kExitUsage;
      }
      overrides.push_back(*o);
    }
    WhatIfDelta delta;
    try {
      delta = what_if(*problem, overrides);
    } catch (const ValidationError& e) {
      err_ << "error: the overridden problem is invalid\n";
      print_issues(e.report(), err_);
      return kExitValidation;
    }
    if (json) {
      out_ << what_if_to_json(delta).dump(2) << '\n';
      return kExitOk;
    }
    const DisplayScale scale = delta.after.display_scale;
    std::vector<std::vector<std::string>> rows{{"Option", "Before", "After", "Delta", "Rank"}};
    for (const OptionDelta& d : delta.options) {
      std::string rank = rank_label(delta.ranking_before, d.rank_before) + " -> " +
                         rank_label(delta.ranking_after, d.rank_after);
      if (d.rank_movement != 0) rank += " (" + signed_fixed(d.rank_movement, 0) + ")";
      rows.push_back({d.name, format_display(to_display(d.before, scale), scale),
                      format_display(to_display(d.after, scale), scale),
                      signed_fixed(to_display(d.delta, scale), 4), rank});
    }
    print_table(rows, out_);
    return kExitOk;
  }

  int import_csv_file(const std::string& skeleton_path, const std::string& csv_path,
                      const std::string& out_path) {
    if (skeleton_path == "-" && csv_path == "-") {
      err_ << "error: only one input may be read from standard input\n";
      return kExitUsage;
    }
    int status = kExitOk;
    auto problem = load(skeleton_path, status, false);
    if (!problem) return status;
    std::string text;
    try {
      text = read_input(csv_path, in_);
    } catch (const IoFailure& e) {
      err_ << "error: " << e.message << '\n';
      return kExitIo;
    }
    try {
      problem->options = import_csv(text, problem->attributes);
    } catch (const CsvError& e) {
      err_ << "error: " << csv_path << ": " << e.what() << '\n';
      return kExitValidation;
    }
    const ValidationReport report = validate_problem(*problem);
    if (!report.ok) {
      err_ << "error: imported problem is invalid\n";
      print_issues(report, err_);
      return kExitValidation;
    }
    print_issues(report, err_);
    const std::string doc = serialize_problem(*problem);
    if (out_path == "-") {
      out_ << doc;
      return kExitOk;
    }
    try {
      write_file_atomically(out_path, doc);
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << '\n';
      return kExitIo;
    }
    err_ << "wrote " << problem->options.size() << " options to " << out_path << '\n';
    return kExitOk;
  }

  int serve(const std::string& store, const std::string& bind, const std::string& cors,
            const std::string& static_dir) {
    ServiceConfig config;
    config.store_root = store;
    config.cors_origin = cors;
    if (!static_dir.empty()) config.static_dir = static_dir;
    if (!parse_bind_address(bind, config.host, config.port)) {
      err_ << "error: --bind expects HOST:PORT, got \"" << bind << "\"\n";
      return kExitUsage;
    }
    try {
      Service service(config);
      const int port = service.bind();
      if (port < 0) {
        err_ << "error: cannot bind " << bind << '\n';
        return kExitIo;
      }
      err_ << "serving " << store << " on " << config.host << ':' << port << '\n';
      return service.listen() ? kExitOk : kExitIo;
    } catch (const StoreIoError& e) {
      err_ << "error: " << e.what() << '\n';
      return kExitIo;
    }
  }

 private:
  void print_sweep(const std::string& attribute, const EvaluationResult& shape,
                   const std::vector<SweepPoint>& points) {
    out_ << "Sweep of " << attribute << " weight\n";
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"t", "Top"};
    for (const OptionResult& o : shape.options) header.push_back(o.name);
    rows.push_back(std::move(header));
    for (const SweepPoint& p : points) {
      std::vector<double> u(shape.options.size());
      for (const RankEntry& e : p.ranking.entries) u[e.option_index] = e.utility;
      std::vector<std::string> row{format_fixed(p.t, 4), p.ranking.top().name};
      for (double v : u) {
        row.push_back(format_display(to_display(v, shape.display_scale), shape.display_scale));
      }
      rows.push_back(std::move(row));
    }
    print_table(rows, out_);
  }

  void print_critical(const CriticalWeights& c) {
    out_ << "Critical weights for " << c.attribute << " (current weight "
         << format_fixed(c.current_weight, 4) << ")\n";
    out_ << "Top at weight 0: " << c.top_at_zero << '\n';
    out_ << "Top at weight 1: " << c.top_at_one << '\n';
    if (c.breakpoints.empty()) {
      out_ << "No breakpoints: the top option never changes\n";
      return;
    }
    std::vector<std::vector<std::string>> rows{{"Weight", "Before", "After"}};
    for (const Breakpoint& b : c.breakpoints) rows.push_back({format_fixed(b.t, 6), b.before, b.after});
    print_table(rows, out_);
  }

  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;
};

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Multi-attribute utility analysis: evaluate, rank and probe decision problems"};
  app.name(args.empty() ? "maua" : args.front());
  app.require_subcommand(1);

  bool json = false;
  bool csv = false;
  std::string file;
  std::string attribute;
  std::string mode = "sweep";
  int samples = 101;
  std::vector<std::string> sets;
  std::string skeleton;
  std::string csv_path;
  std::string out_path;
  std::string store = env_or("MAUA_STORE", "");
  std::string bind = env_or("MAUA_BIND", "127.0.0.1:8080");
  std::string cors = "*";
  std::string static_dir;

  auto* validate = app.add_subcommand("validate", "Check a problem document and list issues");
  validate->add_option("file", file, "Problem document (- for stdin)")->required();
  validate->add_flag("--json", json, "Print the report as JSON");

  auto* evaluate = app.add_subcommand("evaluate", "Compute utilities and the ranking");
  evaluate->add_option("file", file, "Problem document (- for stdin)")->required();
  auto* json_flag = evaluate->add_flag("--json", json, "Print results as JSON");
  evaluate->add_flag("--csv", csv, "Print results as CSV")->excludes(json_flag);

  auto* sensitivity = app.add_subcommand("sensitivity", "Sweep one attribute's weight");
  sensitivity->add_option("file", file, "Problem document (- for stdin)")->required();
  sensitivity->add_option("--attribute", attribute, "Attribute to sweep")->required();
  sensitivity->add_option("--mode", mode, "sweep or critical")
      ->check(CLI::IsMember({"sweep", "critical"}));
  sensitivity->add_option("--samples", samples, "Grid points for sweep mode")
      ->check(CLI::Range(2, 100001));
  sensitivity->add_flag("--json", json, "Print results as JSON");

  auto* whatif = app.add_subcommand("whatif", "Re-evaluate with overridden inputs");
  whatif->add_option("file", file, "Problem document (- for stdin)")->required();
  whatif->add_option("--set", sets, "ATTRIBUTE.importance=V or OPTION.ATTRIBUTE=V")
      ->allow_extra_args(false);
  whatif->add_flag("--json", json, "Print the delta as JSON");

  auto* import = app.add_subcommand("import-csv", "Fill a problem skeleton's options from CSV");
  import->add_option("skeleton", skeleton, "Problem document supplying the attributes")->required();
  import->add_option("csv", csv_path, "CSV with header option,<attributes...>")->required();
  import->add_option("-o,--output", out_path, "Output document (- for stdout)")->required();

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--store", store, "Store directory (env MAUA_STORE)");
  serve->add_option("--bind", bind, "HOST:PORT to listen on (env MAUA_BIND)");
  serve->add_option("--cors-origin", cors, "Access-Control-Allow-Origin value");
  serve->add_option("--static", static_dir, "Directory of web assets served at /");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back("maua");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  Runner runner(in, out, err);
  if (*validate) return runner.validate(file, json);
  if (*evaluate) return runner.evaluate(file, json, csv);
  if (*sensitivity) return runner.sensitivity(file, attribute, mode, samples, json);
  if (*whatif) return runner.whatif(file, sets, json);
  if (*import) return runner.import_csv_file(skeleton, csv_path, out_path);
  if (*serve) {
    if (store.empty()) {
      err << "error: serve needs --store or MAUA_STORE\n";
      return kExitUsage;
    }
    return runner.serve(store, bind, cors, static_dir);
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace maua
