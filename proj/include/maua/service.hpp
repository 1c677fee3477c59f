#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "maua/store.hpp"

namespace httplib {
class Server;
}

namespace maua {

struct ServiceConfig {
  std::filesystem::path store_root;
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string cors_origin = "*";
  // Directory of built web assets served at "/"; ignored when absent.
  std::optional<std::filesystem::path> static_dir;
  // One JSON line per request on standard error.
  bool log_requests = true;
};

// HTTP facade over the engine and a ProblemStore.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the listening socket; returns the bound port or -1.
  int bind();
  // Serves until stop(); requires bind().
  bool listen();
  void stop();
  void wait_until_ready() const;

  ProblemStore& store() { return *store_; }

 private:
  void install_routes();

  ServiceConfig config_;
  std::unique_ptr<ProblemStore> store_;
  std::unique_ptr<httplib::Server> server_;
};

// Parses "host:port" (host may be empty, meaning 0.0.0.0).
bool parse_bind_address(const std::string& text, std::string& host, int& port);

}  // namespace maua
