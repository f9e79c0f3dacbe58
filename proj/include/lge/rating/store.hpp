#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "lge/error.hpp"
#include "lge/rating/session.hpp"

namespace lge::rating {

using Clock = std::function<std::string()>;

// ISO-8601 UTC with millisecond precision.
std::string utc_timestamp();

// Sessions keyed by id. With a data directory every session lives in
// <data_dir>/sessions/<id>/ as plan.json plus an append-only events.jsonl;
// an empty path keeps everything in memory.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path data_dir = {}, Clock clock = utc_timestamp);

  // Idempotent for an identical plan; a different plan under an existing id
  // is rejected.
  std::string create(const SessionPlan& plan);

  bool contains(const std::string& session_id) const;
  std::vector<std::string> session_ids() const;

  // Validates under the session's writer lock, stamps session id, sequence
  // number and timestamp, persists, then applies. Returns the stored event.
  RatingEvent submit(const std::string& session_id, RatingEvent event);

  // Runs `fn` against the session state under a shared lock.
  template <typename Fn>
  auto read(const std::string& session_id, Fn&& fn) const {
    const auto entry = find(session_id);
    std::shared_lock lock(entry->mutex);
    return fn(static_cast<const SessionState&>(entry->state));
  }

  const std::filesystem::path& data_dir() const { return data_dir_; }

 private:
  struct Entry {
    SessionState state;
    mutable std::shared_mutex mutex;
  };

  std::shared_ptr<Entry> find(const std::string& session_id) const;
  void load_all();
  std::filesystem::path session_dir(const std::string& session_id) const;

  std::filesystem::path data_dir_;
  Clock clock_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

// Thrown for unknown sessions; the HTTP layer maps it to 404.
class NotFoundError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace lge::rating
