#include "lge/rating/service.hpp"

#include <charconv>

#include "lge/csv.hpp"
#include "lge/error.hpp"

namespace lge::rating {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename Fn>
Response guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const NotFoundError& e) {
    return {404, {{"error", e.what()}}};
  } catch (const ValidationError& e) {
    return {400, {{"error", e.what()}}};
  } catch (const IoError& e) {
    return {500, {{"error", e.what()}}};
  } catch (const json::exception& e) {
    return {400, {{"error", std::string("malformed JSON: ") + e.what()}}};
  }
}

TargetClass parse_class_param(const std::string& text) {
  if (text.empty()) throw ValidationError("query parameter 'class' (scar|mvo) is required");
  return parse_target_class(text);
}

json optional_ci(const std::optional<ProportionCI>& ci) {
  if (!ci) return nullptr;
  return {{"estimate", ci->estimate}, {"lower", ci->lower}, {"upper", ci->upper}};
}

json method_json(const MethodProportions& p) {
  json detailed = json::object();
  for (RatingCategory c : kAllCategories) {
    detailed[std::string(to_string(c))] = {
        {"count", p.detailed[static_cast<std::size_t>(c)]}, {"fraction", p.detailed_fraction(c)}};
  }
  json coarse = json::object();
  for (Outcome o : {Outcome::true_negative, Outcome::true_positive, Outcome::false_negative,
                    Outcome::false_positive}) {
    coarse[std::string(to_string(o))] = {{"count", p.coarse[static_cast<std::size_t>(o)]},
                                         {"fraction", p.coarse_fraction(o)}};
  }
  return {{"total", p.total}, {"detailed", detailed}, {"coarse", coarse}};
}

}  // namespace

json to_json(const ProportionSummary& s) {
  return {{"class", to_string(s.target)},
          {"empty", s.empty()},
          {"manual", method_json(s.manual)},
          {"automatic", method_json(s.automatic)}};
}

json to_json(const PreferenceSummary& s) {
  const double total = static_cast<double>(s.total());
  auto fraction = [&](std::uint64_t n) -> json {
    if (s.total() == 0) return nullptr;
    return static_cast<double>(n) / total;
  };
  json chi = nullptr;
  if (s.chi_square) {
    chi = {{"statistic", s.chi_square->statistic},
           {"df", s.chi_square->df},
           {"p_value", s.chi_square->p_value}};
  }
  return {{"ai_preferred", s.ai_preferred},
          {"human_preferred", s.human_preferred},
          {"equal", s.equal},
          {"excluded_both_true_negative", s.excluded},
          {"total", s.total()},
          {"fractions",
           {{"ai_preferred", fraction(s.ai_preferred)},
            {"human_preferred", fraction(s.human_preferred)},
            {"equal", fraction(s.equal)}}},
          {"chi_square", chi}};
}

json to_json(const AgreementResult& r) {
  json rows = json::array();
  for (std::size_t i = 0; i < r.matrix.k(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < r.matrix.k(); ++j) row.push_back(r.matrix(i, j));
    rows.push_back(std::move(row));
  }
  return {{"rater_1", r.rater_1},
          {"rater_2", r.rater_2},
          {"categories", r.matrix.categories()},
          {"matrix", rows},
          {"total", r.matrix.total()},
          {"kappa", r.kappa},
          {"weighting", r.weighting == KappaWeighting::linear ? "linear" : "none"}};
}

json to_json(const Contingency& t) {
  const DiagnosticPerformance perf = sens_spec_ci(t);
  return {{"tp", t.tp},
          {"fp", t.fp},
          {"fn", t.fn},
          {"tn", t.tn},
          {"sensitivity", optional_ci(perf.sensitivity)},
          {"specificity", optional_ci(perf.specificity)}};
}

json to_json(const ExportBundle& b) {
  return {{"files",
           {{"ratings.csv", b.ratings_csv},
            {"comparisons.csv", b.comparisons_csv},
            {"mapping.csv", b.mapping_csv},
            {"session.json", b.session_json}}}};
}

ExportBundle bundle_from_json(const json& j) {
  try {
    const json& files = j.at("files");
    return {files.at("ratings.csv").get<std::string>(),
            files.at("comparisons.csv").get<std::string>(),
            files.at("mapping.csv").get<std::string>(),
            files.at("session.json").get<std::string>()};
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed export bundle: ") + e.what());
  }
}

std::vector<CaseEntry> read_manifest(const json& manifest) {
  std::vector<CaseEntry> cases;
  if (manifest.is_string()) {
    const fs::path path = manifest.get<std::string>();
    const CsvTable table = read_csv(path);
    const std::size_t pid = table.column("patient_id");
    const std::size_t manual = table.column("manual_path");
    const std::size_t automatic = table.column("auto_path");
    auto resolve = [&](const std::string& p) {
      const fs::path candidate(p);
      return (candidate.is_absolute() ? candidate : path.parent_path() / candidate).string();
    };
    for (const auto& row : table.rows) {
      cases.push_back({row[pid], resolve(row[manual]), resolve(row[automatic]), 0});
    }
    return cases;
  }
  if (!manifest.is_array()) throw ValidationError("manifest must be an array or a CSV path");
  auto field = [](const json& item, const char* key) {
    if (!item.is_object() || !item.contains(key) || !item[key].is_string()) {
      throw ValidationError(std::string("manifest entry lacks string field '") + key + "'");
    }
    return item[key].get<std::string>();
  };
  for (const auto& item : manifest) {
    cases.push_back({field(item, "patient_id"), field(item, "manual_path"),
                     field(item, "auto_path"), 0});
  }
  return cases;
}

RatingService::RatingService(SessionStore& store, ServiceOptions options)
    : store_(store), options_(std::move(options)) {}

std::shared_ptr<const MaskVolume> RatingService::volume(const std::string& path) {
  {
    std::lock_guard lock(cache_mutex_);
    const auto it = cache_.find(path);
    if (it != cache_.end()) return it->second;
  }
  auto loaded = std::make_shared<const MaskVolume>(load_volume(path));
  std::lock_guard lock(cache_mutex_);
  if (cache_.size() >= options_.volume_cache_size) cache_.clear();
  cache_[path] = loaded;
  return loaded;
}

Response RatingService::create_session(const json& body) {
  return guarded([&]() -> Response {
    if (!body.is_object()) throw ValidationError("request body must be a JSON object");
    std::vector<CaseEntry> cases = read_manifest(body.at("manifest"));
    const auto raters = body.at("raters").get<std::vector<std::string>>();
    const auto overlap_n = body.at("overlap_n").get<std::size_t>();
    if (!body.contains("seed") || !body["seed"].is_number_unsigned()) {
      throw ValidationError("'seed' must be a non-negative integer");
    }
    const auto seed = body["seed"].get<std::uint64_t>();

    for (auto& c : cases) {
      MaskVolume manual, automatic;
      try {
        manual = load_volume(c.manual_path);
        automatic = load_volume(c.auto_path);
      } catch (const IoError& e) {
        throw ValidationError("unreadable volume for '" + c.patient_id + "': " + e.what());
      }
      if (manual.dims != automatic.dims) {
        throw ValidationError("manual and automatic volumes of '" + c.patient_id +
                              "' differ in shape");
      }
      c.slice_count = manual.dims.nz;
    }
    const SessionPlan plan = create_plan(std::move(cases), raters, overlap_n, seed);
    const std::string id = store_.create(plan);
    return {201, {{"session_id", id}}};
  });
}

Response RatingService::get_task(const std::string& session_id, const std::string& rater_id,
                                 const std::string& cursor_text) {
  return guarded([&]() -> Response {
    long long cursor = -1;
    const auto [end, ec] =
        std::from_chars(cursor_text.data(), cursor_text.data() + cursor_text.size(), cursor);
    if (ec != std::errc() || end != cursor_text.data() + cursor_text.size() || cursor < 0) {
      throw ValidationError("cursor must be a non-negative integer");
    }

    struct Snapshot {
      std::vector<TaskRef> tasks;
      CaseEntry entry;
      CaseAssignment assignment;
      json prior;
    };
    const Snapshot snap = store_.read(session_id, [&](const SessionState& state) {
      const SessionPlan& plan = state.plan();
      if (!plan.has_rater(rater_id)) throw NotFoundError("unknown rater '" + rater_id + "'");
      Snapshot s;
      s.tasks = tasks_for(plan, rater_id);
      if (static_cast<std::size_t>(cursor) >= s.tasks.size()) return s;
      const TaskRef& task = s.tasks[static_cast<std::size_t>(cursor)];
      s.entry = plan.case_of(task.patient_id);
      s.assignment = plan.assignment_of(task.patient_id);
      json ratings = json::array();
      json comparisons = json::array();
      for (TargetClass t : {TargetClass::scar, TargetClass::mvo}) {
        for (Arm arm : {Arm::a, Arm::b}) {
          if (auto c = state.rating_by(rater_id, task.patient_id, task.slice, t, arm)) {
            ratings.push_back(
                {{"class", to_string(t)}, {"arm", to_string(arm)}, {"category", to_string(*c)}});
          }
        }
        if (auto c = state.comparison_by(rater_id, task.patient_id, task.slice, t)) {
          comparisons.push_back({{"class", to_string(t)}, {"choice", to_string(*c)}});
        }
      }
      s.prior = {{"ratings", ratings}, {"comparisons", comparisons}};
      return s;
    });

    const std::size_t total = snap.tasks.size();
    if (static_cast<std::size_t>(cursor) >= total) {
      return {200, {{"session_id", session_id},
                    {"rater_id", rater_id},
                    {"cursor", cursor},
                    {"total", total},
                    {"done", true}}};
    }
    const TaskRef& task = snap.tasks[static_cast<std::size_t>(cursor)];
    const auto manual = volume(snap.entry.manual_path);
    const auto automatic = volume(snap.entry.auto_path);
    const MaskVolume& arm_a = snap.assignment.method_of_a == Method::manual ? *manual : *automatic;
    const MaskVolume& arm_b = snap.assignment.method_of_a == Method::manual ? *automatic : *manual;

    const std::string image = encode_png(grayscale_window(manual->image_slice(task.slice)));
    const std::string overlay_a =
        encode_png(label_overlay(arm_a.label_slice(task.slice), options_.style));
    const std::string overlay_b =
        encode_png(label_overlay(arm_b.label_slice(task.slice), options_.style));

    return {200, {{"session_id", session_id},
                  {"rater_id", rater_id},
                  {"cursor", cursor},
                  {"total", total},
                  {"done", false},
                  {"patient_id", task.patient_id},
                  {"slice", task.slice},
                  {"slice_count", snap.entry.slice_count},
                  {"classes", {"scar", "mvo"}},
                  {"image_png", base64_encode(image)},
                  {"overlay_a_png", base64_encode(overlay_a)},
                  {"overlay_b_png", base64_encode(overlay_b)},
                  {"submitted", snap.prior}}};
  });
}

Response RatingService::submit(const std::string& session_id, const std::string& body,
                               EventKind kind) {
  return guarded([&]() -> Response {
    const json j = json::parse(body);
    RatingEvent event = event_from_json(j, kind);
    if (!event.session_id.empty() && event.session_id != session_id) {
      throw ValidationError("event session_id does not match the URL");
    }
    const RatingEvent stored = store_.submit(session_id, std::move(event));
    json ack = event_to_json(stored);
    ack["accepted"] = true;
    return {201, ack};
  });
}

Response RatingService::progress(const std::string& session_id, const std::string& rater_id) {
  return guarded([&]() -> Response {
    return store_.read(session_id, [&](const SessionState& state) -> Response {
      if (!state.plan().has_rater(rater_id)) {
        throw NotFoundError("unknown rater '" + rater_id + "'");
      }
      const auto tasks = tasks_for(state.plan(), rater_id);
      std::size_t completed = 0;
      std::size_t next_cursor = tasks.size();
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        bool complete = true;
        for (TargetClass t : {TargetClass::scar, TargetClass::mvo}) {
          for (Arm arm : {Arm::a, Arm::b}) {
            complete = complete &&
                       state.rating_by(rater_id, tasks[i].patient_id, tasks[i].slice, t, arm);
          }
        }
        if (complete) {
          ++completed;
        } else if (next_cursor == tasks.size()) {
          next_cursor = i;
        }
      }
      std::size_t ratings = 0, comparisons = 0;
      for (const auto& e : state.latest_events()) {
        if (e.rater_id != rater_id) continue;
        ++(e.kind == EventKind::rating ? ratings : comparisons);
      }
      return {200, {{"session_id", session_id},
                    {"rater_id", rater_id},
                    {"total", tasks.size()},
                    {"completed", completed},
                    {"ratings", ratings},
                    {"comparisons", comparisons},
                    {"next_cursor", next_cursor}}};
    });
  });
}

Response RatingService::summary(const std::string& session_id, const std::string& target_text) {
  return guarded([&]() -> Response {
    const TargetClass target = parse_class_param(target_text);
    return store_.read(session_id, [&](const SessionState& state) -> Response {
      json detection = nullptr;
      std::string detection_note;
      try {
        const MethodContingency t = patient_contingency_from_ratings(state, target);
        detection = {{"manual", to_json(t.manual)}, {"automatic", to_json(t.automatic)}};
      } catch (const ValidationError& e) {
        detection_note = e.what();
      }
      json body = {{"session_id", session_id},
                   {"class", to_string(target)},
                   {"proportions", to_json(aggregate_proportions(state, target))},
                   {"preference", to_json(preference_summary(state, target))},
                   {"patient_detection", detection}};
      if (!detection_note.empty()) body["patient_detection_unavailable"] = detection_note;
      return {200, body};
    });
  });
}

Response RatingService::agreement(const std::string& session_id, const std::string& target_text,
                                  const std::string& kind_text) {
  return guarded([&]() -> Response {
    const TargetClass target = parse_class_param(target_text);
    AgreementKind kind = AgreementKind::categories;
    if (kind_text == "comparison") {
      kind = AgreementKind::comparison;
    } else if (!kind_text.empty() && kind_text != "categories") {
      throw ValidationError("kind must be categories or comparison");
    }
    return store_.read(session_id, [&](const SessionState& state) -> Response {
      json body = to_json(rater_agreement(state, target, kind));
      body["session_id"] = session_id;
      body["class"] = to_string(target);
      body["kind"] = kind == AgreementKind::categories ? "categories" : "comparison";
      return {200, body};
    });
  });
}

Response RatingService::export_bundle(const std::string& session_id) {
  return guarded([&]() -> Response {
    return store_.read(session_id, [&](const SessionState& state) -> Response {
      json body = to_json(export_session(state));
      body["session_id"] = session_id;
      return {200, body};
    });
  });
}

Response RatingService::history(const std::string& session_id) {
  return guarded([&]() -> Response {
    return store_.read(session_id, [&](const SessionState& state) -> Response {
      json events = json::array();
      for (const auto& e : state.history()) events.push_back(event_to_json(e));
      return {200, {{"session_id", session_id}, {"events", events}}};
    });
  });
}

}  // namespace lge::rating
