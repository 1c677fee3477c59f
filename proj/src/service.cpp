#include "maua/service.hpp"

#include <charconv>
#include <iostream>
#include <mutex>

#include <httplib.h>

#include "maua/aggregation.hpp"
#include "maua/io.hpp"
#include "maua/sensitivity.hpp"

namespace maua {

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kIdPattern = "([A-Za-z0-9_-]+)";
constexpr int kDefaultSweepSamples = 101;
constexpr int kMaxSweepSamples = 100001;

using nlohmann::json;

void send(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, kJson);
}

void send(httplib::Response& res, int status, const Json& body) {
  send(res, status, body.dump(2) + "\n");
}

Json error_body(const std::string& message) {
  Json j;
  j["error"] = message;
  return j;
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send(res, status, error_body(message));
}

void send_invalid(httplib::Response& res, const ValidationReport& report) {
  Json j = error_body("validation failed");
  j["report"] = report_to_json(report);
  send(res, 422, j);
}

void send_parse_error(httplib::Response& res, const ParseError& e) {
  Json j = error_body(e.what());
  if (!e.path().empty()) j["path"] = e.path();
  if (e.line() > 0) {
    j["line"] = e.line();
    j["column"] = e.column();
  }
  send(res, 400, j);
}

// Parses the request body as JSON or answers 400.
std::optional<json> read_json(const httplib::Request& req, httplib::Response& res) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error&) {
    try {
      parse_problem(req.body);  // reuse line/column reporting
    } catch (const ParseError& e) {
      send_parse_error(res, e);
      return std::nullopt;
    }
    send_error(res, 400, "malformed JSON");
    return std::nullopt;
  }
}

// Builds and validates a document, answering 400/422 on failure.
std::optional<DecisionProblem> read_document(const json& doc, httplib::Response& res) {
  DecisionProblem problem;
  try {
    problem = problem_from_json(doc);
  } catch (const ParseError& e) {
    send_parse_error(res, e);
    return std::nullopt;
  }
  ValidationReport report = validate_problem(problem);
  if (!report.ok) {
    send_invalid(res, report);
    return std::nullopt;
  }
  return problem;
}

std::string evaluation_body(const DecisionProblem& problem) {
  const EvaluationResult result = evaluate_problem(problem);
  return render_evaluation(result, rank_options(result));
}

Json summary_json(const StoredProblem& p) {
  Json j;
  j["id"] = p.id;
  j["revision"] = p.revision;
  return j;
}

}  // namespace

bool parse_bind_address(const std::string& text, std::string& host, int& port) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) return false;
  const std::string port_text = text.substr(colon + 1);
  int value = -1;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || value < 0 ||
      value > 65535) {
    return false;
  }
  host = text.substr(0, colon);
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  if (host.empty()) host = "0.0.0.0";
  port = value;
  return true;
}

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      store_(std::make_unique<ProblemStore>(config_.store_root)),
      server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

Service::~Service() { stop(); }

int Service::bind() {
  if (config_.port == 0) return server_->bind_to_any_port(config_.host);
  return server_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
}

bool Service::listen() { return server_->listen_after_bind(); }

void Service::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

void Service::wait_until_ready() const { server_->wait_until_ready(); }

void Service::install_routes() {
  httplib::Server& srv = *server_;
  const std::string cors_origin = config_.cors_origin;

  srv.set_post_routing_handler([cors_origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", cors_origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });

  if (config_.log_requests) {
    srv.set_logger([](const httplib::Request& req, const httplib::Response& res) {
      static std::mutex log_mutex;
      Json line;
      line["ts"] = utc_timestamp();
      line["method"] = req.method;
      line["path"] = req.path;
      line["status"] = res.status;
      line["remote"] = req.remote_addr;
      std::lock_guard lock(log_mutex);
      std::cerr << line.dump() << '\n';
    });
  }

  srv.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          send_error(res, 500, e.what());
        } catch (...) {
          send_error(res, 500, "internal error");
        }
      });

  ProblemStore& store = *store_;
  const std::string item = std::string("/api/problems/") + kIdPattern;

  srv.Post("/api/problems", [&store](const httplib::Request& req, httplib::Response& res) {
    auto body = read_json(req, res);
    if (!body) return;
    auto problem = read_document(*body, res);
    if (!problem) return;
    send(res, 201, summary_json(*store.create(std::move(*problem))));
  });

  srv.Get("/api/problems", [&store](const httplib::Request&, httplib::Response& res) {
    Json list = Json::array();
    for (const ProblemSummary& s : store.list()) {
      Json j;
      j["id"] = s.id;
      j["name"] = s.name;
      j["revision"] = s.revision;
      j["updated"] = s.updated;
      list.push_back(std::move(j));
    }
    send(res, 200, list);
  });

  srv.Get(item, [&store](const httplib::Request& req, httplib::Response& res) {
    auto p = store.get(req.matches[1]);
    if (!p) return send_error(res, 404, "unknown problem id");
    Json j;
    j["id"] = p->id;
    j["revision"] = p->revision;
    j["created"] = p->created;
    j["updated"] = p->updated;
    j["document"] = problem_to_json(p->document);
    send(res, 200, j);
  });

  srv.Put(item, [&store](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    auto body = read_json(req, res);
    if (!body) return;
    if (!body->is_object() || !body->contains("document") || !body->contains("expected_revision") ||
        !(*body)["expected_revision"].is_number_integer()) {
      return send_error(res, 400, "body must be {\"document\": {...}, \"expected_revision\": <int>}");
    }
    if (!store.get(id)) return send_error(res, 404, "unknown problem id");
    auto problem = read_document((*body)["document"], res);
    if (!problem) return;
    try {
      auto p = store.update(id, std::move(*problem), (*body)["expected_revision"].get<std::int64_t>());
      if (!p) return send_error(res, 404, "unknown problem id");
      send(res, 200, summary_json(*p));
    } catch (const RevisionConflict& e) {
      Json j = error_body(e.what());
      j["current_revision"] = e.current();
      send(res, 409, j);
    }
  });

  srv.Delete(item, [&store](const httplib::Request& req, httplib::Response& res) {
    if (!store.remove(req.matches[1])) return send_error(res, 404, "unknown problem id");
    res.status = 204;
  });

  srv.Post(item + "/evaluate", [&store](const httplib::Request& req, httplib::Response& res) {
    auto p = store.get(req.matches[1]);
    if (!p) return send_error(res, 404, "unknown problem id");
    send(res, 200, evaluation_body(p->document));
  });

  srv.Post(item + "/sensitivity", [&store](const httplib::Request& req, httplib::Response& res) {
    auto p = store.get(req.matches[1]);
    if (!p) return send_error(res, 404, "unknown problem id");
    auto body = read_json(req, res);
    if (!body) return;
    if (!body->is_object()) return send_error(res, 400, "body must be a JSON object");
    for (const auto& entry : body->items()) {
      if (entry.key() != "attribute" && entry.key() != "mode" && entry.key() != "samples") {
        return send_error(res, 400, "unknown field \"" + entry.key() + "\"");
      }
    }
    if (!body->contains("attribute") || !(*body)["attribute"].is_string()) {
      return send_error(res, 400, "\"attribute\" (string) is required");
    }
    const std::string attribute = (*body)["attribute"];
    const std::string mode = body->value("mode", std::string("sweep"));
    int samples = kDefaultSweepSamples;
    if (body->contains("samples")) {
      const json& s = (*body)["samples"];
      if (!s.is_number_integer()) return send_error(res, 400, "\"samples\" must be an integer");
      const auto n = s.get<long long>();
      if (n < 2 || n > kMaxSweepSamples) {
        return send_error(res, 422,
                          "samples must lie in [2, " + std::to_string(kMaxSweepSamples) + "]");
      }
      samples = static_cast<int>(n);
    }
    try {
      if (mode == "sweep") {
        const auto points = sweep_weight(p->document, attribute, samples);
        send(res, 200, sweep_to_json(attribute, evaluate_problem(p->document), points));
      } else if (mode == "critical") {
        send(res, 200, critical_to_json(critical_weights(p->document, attribute)));
      } else {
        send_error(res, 400, "mode must be \"sweep\" or \"critical\"");
      }
    } catch (const LookupError& e) {
      send_error(res, 422, e.what());
    } catch (const UnsupportedError& e) {
      send_error(res, 422, e.what());
    } catch (const DomainError& e) {
      send_error(res, 422, e.what());
    }
  });

  srv.Post(item + "/whatif", [&store](const httplib::Request& req, httplib::Response& res) {
    auto p = store.get(req.matches[1]);
    if (!p) return send_error(res, 404, "unknown problem id");
    auto body = read_json(req, res);
    if (!body) return;
    const json& list = body->is_object() && body->contains("overrides") ? (*body)["overrides"] : *body;
    std::vector<Override> overrides;
    try {
      overrides = overrides_from_json(list);
    } catch (const ParseError& e) {
      return send_parse_error(res, e);
    }
    try {
      send(res, 200, what_if_to_json(what_if(p->document, overrides)));
    } catch (const LookupError& e) {
      Json j = error_body(e.what());
      j["path"] = e.path();
      send(res, 422, j);
    } catch (const ValidationError& e) {
      send_invalid(res, e.report());
    }
  });

  srv.Post("/api/evaluate", [](const httplib::Request& req, httplib::Response& res) {
    auto body = read_json(req, res);
    if (!body) return;
    auto problem = read_document(*body, res);
    if (!problem) return;
    send(res, 200, evaluation_body(*problem));
  });

  if (config_.static_dir && std::filesystem::is_directory(*config_.static_dir)) {
    srv.set_mount_point("/", config_.static_dir->string());
  }
}

}  // namespace maua
