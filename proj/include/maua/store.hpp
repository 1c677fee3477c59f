#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "maua/model.hpp"

namespace maua {

struct StoredProblem {
  std::string id;
  std::int64_t revision = 0;
  DecisionProblem document;
  std::string created;  // ISO-8601 UTC
  std::string updated;
};

struct ProblemSummary {
  std::string id;
  std::string name;
  std::int64_t revision = 0;
  std::string updated;
};

class RevisionConflict : public Error {
 public:
  RevisionConflict(std::int64_t expected, std::int64_t current);
  std::int64_t current() const noexcept { return current_; }

 private:
  std::int64_t current_;
};

class StoreIoError : public Error {
 public:
  using Error::Error;
};

// One canonical JSON file per problem under the store root plus an index
// file. Every write goes to a temporary file that is then renamed over the
// target. Mutations are serialized; reads share immutable snapshots.
class ProblemStore {
 public:
  using Snapshot = std::shared_ptr<const StoredProblem>;

  // Creates the directory if needed and loads every stored problem.
  explicit ProblemStore(std::filesystem::path root);

  ProblemStore(const ProblemStore&) = delete;
  ProblemStore& operator=(const ProblemStore&) = delete;

  const std::filesystem::path& root() const noexcept { return root_; }

  // The document must already be valid.
  Snapshot create(DecisionProblem document);
  Snapshot get(const std::string& id) const;
  std::vector<ProblemSummary> list() const;

  // Throws RevisionConflict when expected_revision is stale; returns nullptr
  // for an unknown id.
  Snapshot update(const std::string& id, DecisionProblem document, std::int64_t expected_revision);

  // False when the id is unknown.
  bool remove(const std::string& id);

  static bool is_valid_id(const std::string& id);

 private:
  std::filesystem::path problem_path(const std::string& id) const;
  void write_problem(const StoredProblem& p) const;
  void write_index() const;
  std::string new_id();

  std::filesystem::path root_;
  mutable std::shared_mutex snapshot_mutex_;
  std::mutex write_mutex_;
  std::map<std::string, Snapshot> problems_;
  std::uint64_t id_state_;
};

// Writes `content` to a sibling temporary file and renames it over `target`.
void write_file_atomically(const std::filesystem::path& target, const std::string& content);

std::string utc_timestamp();

}  // namespace maua
