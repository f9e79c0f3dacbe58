#include "lge/rating/store.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "lge/error.hpp"

namespace lge::rating {

namespace fs = std::filesystem;

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const std::time_t secs = system_clock::to_time_t(now);
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(ms));
  return buf;
}

SessionStore::SessionStore(fs::path data_dir, Clock clock)
    : data_dir_(std::move(data_dir)), clock_(std::move(clock)) {
  if (!data_dir_.empty()) {
    std::error_code ec;
    fs::create_directories(data_dir_ / "sessions", ec);
    if (ec) throw IoError("cannot create data directory " + data_dir_.string() + ": " + ec.message());
    load_all();
  }
}

fs::path SessionStore::session_dir(const std::string& session_id) const {
  return data_dir_ / "sessions" / session_id;
}

void SessionStore::load_all() {
  for (const auto& dir : fs::directory_iterator(data_dir_ / "sessions")) {
    if (!dir.is_directory()) continue;
    std::ifstream plan_in(dir.path() / "plan.json");
    if (!plan_in) continue;
    nlohmann::json plan_json;
    try {
      plan_in >> plan_json;
    } catch (const nlohmann::json::exception& e) {
      throw IoError("corrupt plan in " + dir.path().string() + ": " + e.what());
    }
    auto entry = std::make_shared<Entry>();
    entry->state = SessionState(plan_from_json(plan_json));

    std::ifstream events_in(dir.path() / "events.jsonl");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(events_in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        const EventKind kind = j.at("kind").get<std::string>() == "comparison"
                                   ? EventKind::comparison
                                   : EventKind::rating;
        entry->state.append(event_from_json(j, kind));
      } catch (const std::exception& e) {
        // A torn final line from an interrupted write is dropped; anything
        // earlier means the log is damaged.
        if (events_in.peek() == std::char_traits<char>::eof()) break;
        throw IoError("corrupt event log " + (dir.path() / "events.jsonl").string() + " line " +
                      std::to_string(line_no) + ": " + e.what());
      }
    }
    sessions_[entry->state.plan().session_id] = std::move(entry);
  }
}

std::string SessionStore::create(const SessionPlan& plan) {
  std::unique_lock lock(sessions_mutex_);
  const auto it = sessions_.find(plan.session_id);
  if (it != sessions_.end()) {
    if (plan_to_json(it->second->state.plan()) != plan_to_json(plan)) {
      throw ValidationError("session id collision with a different plan");
    }
    return plan.session_id;
  }
  if (!data_dir_.empty()) {
    const fs::path dir = session_dir(plan.session_id);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    const fs::path tmp = dir / "plan.json.tmp";
    {
      std::ofstream out(tmp);
      out << plan_to_json(plan).dump(2) << "\n";
      if (!out) throw IoError("cannot write " + tmp.string());
    }
    fs::rename(tmp, dir / "plan.json");
    std::ofstream(dir / "events.jsonl", std::ios::app);
  }
  auto entry = std::make_shared<Entry>();
  entry->state = SessionState(plan);
  sessions_[plan.session_id] = std::move(entry);
  return plan.session_id;
}

bool SessionStore::contains(const std::string& session_id) const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.count(session_id) != 0;
}

std::vector<std::string> SessionStore::session_ids() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, entry] : sessions_) out.push_back(id);
  return out;
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& session_id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + session_id + "'");
  return it->second;
}

RatingEvent SessionStore::submit(const std::string& session_id, RatingEvent event) {
  const auto entry = find(session_id);
  std::unique_lock lock(entry->mutex);
  event.session_id = session_id;
  entry->state.validate(event);
  event.seq = entry->state.next_seq();
  event.timestamp = clock_();
  if (!data_dir_.empty()) {
    std::ofstream out(session_dir(session_id) / "events.jsonl", std::ios::app);
    out << event_to_json(event).dump() << "\n";
    out.flush();
    if (!out) throw IoError("cannot append to the event log of " + session_id);
  }
  entry->state.append(event);
  return event;
}

}  // namespace lge::rating
