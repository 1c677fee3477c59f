#include <doctest.h>

#include <atomic>
#include <sstream>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "maua/cli.hpp"
#include "maua/service.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

using namespace maua;
using nlohmann::json;

namespace {

// Service on a free loopback port, torn down with the fixture.
class RunningService {
 public:
  RunningService() : service_(config(dir_)) {
    port_ = service_.bind();
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { service_.listen(); });
    service_.wait_until_ready();
  }
  ~RunningService() {
    service_.stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_connection_timeout(5);
    c.set_read_timeout(30);
    return c;
  }
  Service& service() { return service_; }

 private:
  static ServiceConfig config(const testing::TempDir& dir) {
    ServiceConfig c;
    c.store_root = dir.path();
    c.host = "127.0.0.1";
    c.port = 0;
    c.log_requests = false;
    return c;
  }

  testing::TempDir dir_;
  Service service_;
  int port_ = -1;
  std::thread thread_;
};

std::string fixture_text(const char* name) {
  return testing::read_text(testing::fixture_path(name));
}

std::string create(httplib::Client& c, const char* fixture) {
  auto res = c.Post("/api/problems", fixture_text(fixture), "application/json");
  REQUIRE(res);
  REQUIRE(res->status == 201);
  return json::parse(res->body)["id"];
}

std::string cli_json(const char* fixture) {
  std::istringstream in;
  std::ostringstream out, err;
  const int code = run_cli({"maua", "evaluate", testing::fixture_path(fixture), "--json"}, in, out, err);
  REQUIRE(code == 0);
  return out.str();
}

json put_body(const std::string& document, std::int64_t revision) {
  json body;
  body["document"] = json::parse(document);
  body["expected_revision"] = revision;
  return body;
}

}  // namespace

TEST_CASE("create, fetch and evaluate") {
  RunningService s;
  auto c = s.client();
  const std::string id = create(c, "table1.json");

  auto got = c.Get("/api/problems/" + id);
  REQUIRE(got);
  CHECK(got->status == 200);
  const json doc = json::parse(got->body);
  CHECK(doc["revision"] == 1);
  CHECK(doc["document"]["name"] == "Treatment plan selection");

  auto list = c.Get("/api/problems");
  REQUIRE(list);
  CHECK(json::parse(list->body).size() == 1);

  auto eval = c.Post("/api/problems/" + id + "/evaluate", "", "application/json");
  REQUIRE(eval);
  CHECK(eval->status == 200);
  const json r = json::parse(eval->body);
  CHECK(r["options"][0]["display_utility"].get<double>() == doctest::Approx(76));
  CHECK(r["ranking"][0]["rank"] == 1);
  CHECK(r["ranking"][1]["rank"] == 1);
}

TEST_CASE("stateless evaluation matches the CLI byte for byte") {
  RunningService s;
  auto c = s.client();
  for (const char* f : {"table1.json", "table2.json", "table3.json", "table4.json"}) {
    CAPTURE(f);
    auto res = c.Post("/api/evaluate", fixture_text(f), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == cli_json(f));
  }
}

TEST_CASE("stale revision is rejected and leaves state unchanged") {
  RunningService s;
  auto c = s.client();
  const std::string id = create(c, "table1.json");

  auto ok = c.Put("/api/problems/" + id, put_body(fixture_text("table2.json"), 1).dump(),
                  "application/json");
  REQUIRE(ok);
  CHECK(ok->status == 200);
  CHECK(json::parse(ok->body)["revision"] == 2);
  const std::string before = c.Get("/api/problems/" + id)->body;

  auto stale = c.Put("/api/problems/" + id, put_body(fixture_text("table3.json"), 1).dump(),
                     "application/json");
  REQUIRE(stale);
  CHECK(stale->status == 409);
  CHECK(json::parse(stale->body)["current_revision"] == 2);
  CHECK(c.Get("/api/problems/" + id)->body == before);
}

TEST_CASE("concurrent PUTs: exactly one wins") {
  RunningService s;
  auto c = s.client();
  const std::string id = create(c, "table1.json");
  const std::string body = put_body(fixture_text("table2.json"), 1).dump();

  std::atomic<int> ok{0}, conflict{0}, other{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      auto client = s.client();
      auto res = client.Put("/api/problems/" + id, body, "application/json");
      if (res && res->status == 200) ++ok;
      else if (res && res->status == 409) ++conflict;
      else ++other;
    });
  }
  for (auto& t : threads) t.join();
  CHECK(ok == 1);
  CHECK(conflict == 7);
  CHECK(other == 0);
}

TEST_CASE("error statuses") {
  RunningService s;
  auto c = s.client();

  SUBCASE("unknown id") {
    CHECK(c.Get("/api/problems/0000000000000000")->status == 404);
    CHECK(c.Delete("/api/problems/0000000000000000")->status == 404);
    CHECK(c.Post("/api/problems/0000000000000000/evaluate", "", "application/json")->status == 404);
  }
  SUBCASE("malformed JSON") {
    auto res = c.Post("/api/problems", "{not json", "application/json");
    CHECK(res->status == 400);
    CHECK(json::parse(res->body).contains("line"));
  }
  SUBCASE("schema violation") {
    auto res = c.Post("/api/evaluate", R"({"schema_version": "1", "name": "m", "attributes": [], "options": {}})",
                      "application/json");
    CHECK(res->status == 400);
    CHECK(json::parse(res->body)["path"] == "$.options");
  }
  SUBCASE("invalid document") {
    auto res = c.Post("/api/problems", fixture_text("broken.json"), "application/json");
    CHECK(res->status == 422);
    const json body = json::parse(res->body);
    CHECK(body["report"]["ok"] == false);
  }
  SUBCASE("PUT with a bad body") {
    const std::string id = create(c, "table1.json");
    CHECK(c.Put("/api/problems/" + id, "{}", "application/json")->status == 400);
    CHECK(c.Put("/api/problems/" + id,
                put_body(fixture_text("broken.json"), 1).dump(), "application/json")
              ->status == 422);
    CHECK(c.Put("/api/problems/0000000000000000",
                put_body(fixture_text("table1.json"), 1).dump(), "application/json")
              ->status == 404);
  }
}

TEST_CASE("delete") {
  RunningService s;
  auto c = s.client();
  const std::string id = create(c, "table1.json");
  CHECK(c.Delete("/api/problems/" + id)->status == 204);
  CHECK(c.Get("/api/problems/" + id)->status == 404);
}

TEST_CASE("sensitivity endpoint") {
  RunningService s;
  auto c = s.client();
  const std::string id = create(c, "table2.json");
  const std::string path = "/api/problems/" + id + "/sensitivity";

  auto sweep = c.Post(path, R"({"attribute": "ER", "samples": 11})", "application/json");
  REQUIRE(sweep);
  CHECK(sweep->status == 200);
  const json sj = json::parse(sweep->body);
  CHECK(sj["points"].size() == 11);
  CHECK(sj["points"][0]["ranking"][0]["name"] == "Option 2");

  auto def = c.Post(path, R"({"attribute": "ER"})", "application/json");
  CHECK(json::parse(def->body)["points"].size() == 101);

  auto crit = c.Post(path, R"({"attribute": "ER", "mode": "critical"})", "application/json");
  CHECK(crit->status == 200);
  CHECK(json::parse(crit->body)["top_at_0"] == "Option 2");

  CHECK(c.Post(path, R"({"attribute": "nope"})", "application/json")->status == 422);
  CHECK(c.Post(path, R"({"attribute": "ER", "samples": 1})", "application/json")->status == 422);
  CHECK(c.Post(path, R"({"attribute": "ER", "mode": "other"})", "application/json")->status == 400);
  CHECK(c.Post(path, R"({"samples": 3})", "application/json")->status == 400);

  const std::string vid = create(c, "vehicle.json");
  CHECK(c.Post("/api/problems/" + vid + "/sensitivity", R"({"attribute": "Cost", "mode": "critical"})",
               "application/json")
            ->status == 422);
}

TEST_CASE("what-if endpoint") {
  RunningService s;
  auto c = s.client();
  const std::string id = create(c, "table1.json");
  const std::string path = "/api/problems/" + id + "/whatif";

  auto res = c.Post(path, R"({"overrides": [{"option": "Plan B", "attribute": "E", "value": 95}]})",
                    "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  const json j = json::parse(res->body);
  bool found = false;
  for (const auto& o : j["options"]) {
    if (o["name"] == "Plan B") {
      found = true;
      CHECK(o["after"].get<double>() == doctest::Approx(0.77).epsilon(1e-12));
      CHECK(o["rank_after"] == 1);
    }
  }
  CHECK(found);

  CHECK(c.Post(path, "[]", "application/json")->status == 200);
  CHECK(c.Post(path, R"([{"attribute": "Q", "importance": 1}])", "application/json")->status == 422);
  CHECK(c.Post(path, R"([{"option": "Plan A", "attribute": "E", "value": 400}])", "application/json")
            ->status == 422);
  CHECK(c.Post(path, R"([{"attribute": 5}])", "application/json")->status == 400);
  // The stored problem is unchanged.
  CHECK(json::parse(c.Get("/api/problems/" + id)->body)["revision"] == 1);
}

TEST_CASE("CORS headers") {
  RunningService s;
  auto c = s.client();
  auto res = c.Get("/api/problems");
  REQUIRE(res);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
  auto pre = c.Options("/api/problems");
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK(pre->get_header_value("Access-Control-Allow-Methods").find("PUT") != std::string::npos);
}

TEST_CASE("bind address parsing") {
  std::string host;
  int port = 0;
  CHECK(parse_bind_address("127.0.0.1:9000", host, port));
  CHECK(host == "127.0.0.1");
  CHECK(port == 9000);
  CHECK(parse_bind_address(":8081", host, port));
  CHECK(host == "0.0.0.0");
  CHECK_FALSE(parse_bind_address("localhost", host, port));
  CHECK_FALSE(parse_bind_address("h:99999", host, port));
}
