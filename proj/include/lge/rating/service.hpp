#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "lge/rating/render.hpp"
#include "lge/rating/store.hpp"
#include "lge/volume.hpp"

namespace lge::rating {

struct Response {
  int status = 200;
  nlohmann::json body;
};

struct ServiceOptions {
  OverlayStyle style;
  std::size_t volume_cache_size = 32;
};

// Transport-independent request handlers. Every handler returns a JSON body;
// failures come back as {"error": message} with a 4xx/5xx status.
class RatingService {
 public:
  explicit RatingService(SessionStore& store, ServiceOptions options = {});

  // body: {manifest, raters, overlap_n, seed}. The manifest is either an
  // array of {patient_id, manual_path, auto_path} objects or the path of a
  // CSV with those columns (relative paths resolve against the CSV folder).
  Response create_session(const nlohmann::json& body);
  Response get_task(const std::string& session_id, const std::string& rater_id,
                    const std::string& cursor);
  Response submit(const std::string& session_id, const std::string& body, EventKind kind);
  Response progress(const std::string& session_id, const std::string& rater_id);

  // Admin-only views; these unblind.
  Response summary(const std::string& session_id, const std::string& target);
  Response agreement(const std::string& session_id, const std::string& target,
                     const std::string& kind);
  Response export_bundle(const std::string& session_id);
  Response history(const std::string& session_id);

  SessionStore& store() { return store_; }

 private:
  std::shared_ptr<const MaskVolume> volume(const std::string& path);

  SessionStore& store_;
  ServiceOptions options_;
  std::mutex cache_mutex_;
  std::map<std::string, std::shared_ptr<const MaskVolume>> cache_;
};

std::vector<CaseEntry> read_manifest(const nlohmann::json& manifest);

nlohmann::json to_json(const ProportionSummary& summary);
nlohmann::json to_json(const PreferenceSummary& summary);
nlohmann::json to_json(const AgreementResult& result);
nlohmann::json to_json(const Contingency& table);
nlohmann::json to_json(const ExportBundle& bundle);
ExportBundle bundle_from_json(const nlohmann::json& j);

}  // namespace lge::rating
