#include "maua/store.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

#include "maua/io.hpp"

namespace maua {

namespace fs = std::filesystem;

namespace {

constexpr const char* kIndexFile = "index.json";
constexpr const char* kProblemSuffix = ".problem.json";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreIoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json stored_to_json(const StoredProblem& p) {
  Json j;
  j["id"] = p.id;
  j["revision"] = p.revision;
  j["created"] = p.created;
  j["updated"] = p.updated;
  j["document"] = problem_to_json(p.document);
  return j;
}

StoredProblem stored_from_json(const nlohmann::json& j) {
  StoredProblem p;
  p.id = j.at("id").get<std::string>();
  p.revision = j.at("revision").get<std::int64_t>();
  p.created = j.at("created").get<std::string>();
  p.updated = j.at("updated").get<std::string>();
  p.document = problem_from_json(j.at("document"));
  return p;
}

}  // namespace

RevisionConflict::RevisionConflict(std::int64_t expected, std::int64_t current)
    : Error("revision conflict: expected " + std::to_string(expected) + ", current " +
            std::to_string(current)),
      current_(current) {}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t secs = std::chrono::system_clock::to_time_t(now);
  const auto millis =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(millis));
  return out;
}

void write_file_atomically(const fs::path& target, const std::string& content) {
  fs::path tmp = target;
  tmp += ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) throw StoreIoError("cannot open " + tmp.string());
  std::size_t written = 0;
  while (written < content.size()) {
    const ssize_t n = ::write(fd, content.data() + written, content.size() - written);
    if (n < 0) {
      ::close(fd);
      throw StoreIoError("cannot write " + tmp.string());
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) throw StoreIoError("cannot flush " + tmp.string());
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw StoreIoError("cannot rename " + tmp.string() + ": " + ec.message());
}

bool ProblemStore::is_valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

ProblemStore::ProblemStore(fs::path root) : root_(std::move(root)) {
  std::random_device rd;
  id_state_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();

  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw StoreIoError("cannot create store directory " + root_.string());

  for (const auto& entry : fs::directory_iterator(root_)) {
    const std::string file = entry.path().filename().string();
    if (!entry.is_regular_file() || !file.ends_with(kProblemSuffix)) continue;
    try {
      StoredProblem p = stored_from_json(nlohmann::json::parse(read_file(entry.path())));
      const std::string id = p.id;
      problems_[id] = std::make_shared<const StoredProblem>(std::move(p));
    } catch (const std::exception& e) {
      throw StoreIoError("corrupt store file " + entry.path().string() + ": " + e.what());
    }
  }
  write_index();
}

fs::path ProblemStore::problem_path(const std::string& id) const {
  return root_ / (id + kProblemSuffix);
}

void ProblemStore::write_problem(const StoredProblem& p) const {
  write_file_atomically(problem_path(p.id), stored_to_json(p).dump(2) + "\n");
}

void ProblemStore::write_index() const {
  Json index = Json::array();
  for (const ProblemSummary& s : list()) {
    Json j;
    j["id"] = s.id;
    j["name"] = s.name;
    j["revision"] = s.revision;
    j["updated"] = s.updated;
    index.push_back(std::move(j));
  }
  write_file_atomically(root_ / kIndexFile, index.dump(2) + "\n");
}

std::string ProblemStore::new_id() {
  // splitmix64 over a random seed; collisions are re-drawn.
  for (;;) {
    std::uint64_t z = (id_state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(z));
    std::string id = buf;
    std::shared_lock lock(snapshot_mutex_);
    if (!problems_.contains(id)) return id;
  }
}

ProblemStore::Snapshot ProblemStore::create(DecisionProblem document) {
  std::lock_guard write_lock(write_mutex_);
  auto p = std::make_shared<StoredProblem>();
  p->id = new_id();
  p->revision = 1;
  p->document = std::move(document);
  p->created = utc_timestamp();
  p->updated = p->created;
  write_problem(*p);
  {
    std::unique_lock lock(snapshot_mutex_);
    problems_[p->id] = p;
  }
  write_index();
  return p;
}

ProblemStore::Snapshot ProblemStore::get(const std::string& id) const {
  std::shared_lock lock(snapshot_mutex_);
  auto it = problems_.find(id);
  return it == problems_.end() ? nullptr : it->second;
}

std::vector<ProblemSummary> ProblemStore::list() const {
  std::shared_lock lock(snapshot_mutex_);
  std::vector<ProblemSummary> out;
  out.reserve(problems_.size());
  for (const auto& [id, p] : problems_) {
    out.push_back({p->id, p->document.name, p->revision, p->updated});
  }
  return out;
}

ProblemStore::Snapshot ProblemStore::update(const std::string& id, DecisionProblem document,
                                            std::int64_t expected_revision) {
  std::lock_guard write_lock(write_mutex_);
  Snapshot current = get(id);
  if (!current) return nullptr;
  if (current->revision != expected_revision) {
    throw RevisionConflict(expected_revision, current->revision);
  }
  auto next = std::make_shared<StoredProblem>(*current);
  next->revision = current->revision + 1;
  next->document = std::move(document);
  next->updated = utc_timestamp();
  write_problem(*next);
  {
    std::unique_lock lock(snapshot_mutex_);
    problems_[id] = next;
  }
  write_index();
  return next;
}

bool ProblemStore::remove(const std::string& id) {
  std::lock_guard write_lock(write_mutex_);
  if (!get(id)) return false;
  std::error_code ec;
  fs::remove(problem_path(id), ec);
  if (ec) throw StoreIoError("cannot remove " + problem_path(id).string() + ": " + ec.message());
  {
    std::unique_lock lock(snapshot_mutex_);
    problems_.erase(id);
  }
  write_index();
  return true;
}

}  // namespace maua
