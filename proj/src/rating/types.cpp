#include "lge/rating/types.hpp"

#include <algorithm>

#include "lge/error.hpp"

namespace lge::rating {

namespace {

constexpr std::array<std::string_view, 7> kCategoryNames = {
    "optimal",        "too_big",        "too_small",    "wrong_organ",
    "false_negative", "false_positive", "true_negative"};
constexpr std::array<std::string_view, 4> kOutcomeNames = {"true_negative", "true_positive",
                                                           "false_negative", "false_positive"};
constexpr std::array<std::string_view, 3> kChoiceNames = {"A", "B", "equal"};
constexpr std::array<std::string_view, 2> kMethodNames = {"manual", "automatic"};
constexpr std::array<std::string_view, 2> kClassNames = {"scar", "mvo"};
constexpr std::array<std::string_view, 2> kArmNames = {"A", "B"};
constexpr std::array<std::string_view, 2> kKindNames = {"rating", "comparison"};

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::string_view, N>& names,
             std::string_view what) {
  const auto it = std::find(names.begin(), names.end(), s);
  if (it == names.end()) {
    throw ValidationError("invalid " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return static_cast<E>(it - names.begin());
}

std::string required_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ValidationError(std::string("missing string field '") + key + "'");
  }
  return j[key].get<std::string>();
}

}  // namespace

std::string_view to_string(RatingCategory v) { return kCategoryNames[static_cast<int>(v)]; }
std::string_view to_string(Outcome v) { return kOutcomeNames[static_cast<int>(v)]; }
std::string_view to_string(ComparisonChoice v) { return kChoiceNames[static_cast<int>(v)]; }
std::string_view to_string(Method v) { return kMethodNames[static_cast<int>(v)]; }
std::string_view to_string(TargetClass v) { return kClassNames[static_cast<int>(v)]; }
std::string_view to_string(Arm v) { return kArmNames[static_cast<int>(v)]; }
std::string_view to_string(EventKind v) { return kKindNames[static_cast<int>(v)]; }

RatingCategory parse_category(std::string_view s) {
  return parse_enum<RatingCategory>(s, kCategoryNames, "rating category");
}
ComparisonChoice parse_choice(std::string_view s) {
  return parse_enum<ComparisonChoice>(s, kChoiceNames, "comparison choice");
}
Method parse_method(std::string_view s) { return parse_enum<Method>(s, kMethodNames, "method"); }
TargetClass parse_target_class(std::string_view s) {
  return parse_enum<TargetClass>(s, kClassNames, "class");
}
Arm parse_arm(std::string_view s) { return parse_enum<Arm>(s, kArmNames, "arm"); }

Outcome coarse_outcome(RatingCategory c) {
  switch (c) {
    case RatingCategory::optimal:
    case RatingCategory::too_big:
    case RatingCategory::too_small:
      return Outcome::true_positive;
    case RatingCategory::wrong_organ:
    case RatingCategory::false_positive:
      return Outcome::false_positive;
    case RatingCategory::false_negative:
      return Outcome::false_negative;
    case RatingCategory::true_negative:
      return Outcome::true_negative;
  }
  return Outcome::true_negative;
}

bool implies_presence(RatingCategory c) {
  return c == RatingCategory::optimal || c == RatingCategory::too_big ||
         c == RatingCategory::too_small || c == RatingCategory::false_negative;
}

bool implies_marking(RatingCategory c) {
  return c == RatingCategory::optimal || c == RatingCategory::too_big ||
         c == RatingCategory::too_small || c == RatingCategory::false_positive ||
         c == RatingCategory::wrong_organ;
}

const CaseEntry& SessionPlan::case_of(std::string_view patient_id) const {
  for (const auto& c : cases) {
    if (c.patient_id == patient_id) return c;
  }
  throw ValidationError("unknown patient: " + std::string(patient_id));
}

const CaseAssignment& SessionPlan::assignment_of(std::string_view patient_id) const {
  for (const auto& a : assignments) {
    if (a.patient_id == patient_id) return a;
  }
  throw ValidationError("unknown patient: " + std::string(patient_id));
}

bool SessionPlan::has_patient(std::string_view patient_id) const {
  return std::any_of(cases.begin(), cases.end(),
                     [&](const CaseEntry& c) { return c.patient_id == patient_id; });
}

bool SessionPlan::has_rater(std::string_view rater_id) const {
  return rater_id == kConsensusRater ||
         std::find(raters.begin(), raters.end(), rater_id) != raters.end();
}

std::vector<std::string> SessionPlan::patients_for(std::string_view rater_id) const {
  std::vector<std::string> out;
  if (rater_id == kConsensusRater) {
    for (const auto& c : cases) out.push_back(c.patient_id);
    return out;
  }
  const auto it = partitions.find(std::string(rater_id));
  if (it == partitions.end()) throw ValidationError("unknown rater: " + std::string(rater_id));
  for (const auto& c : cases) {
    const bool shared = std::find(overlap.begin(), overlap.end(), c.patient_id) != overlap.end();
    const bool own =
        std::find(it->second.begin(), it->second.end(), c.patient_id) != it->second.end();
    if (shared || own) out.push_back(c.patient_id);
  }
  return out;
}

nlohmann::json plan_to_json(const SessionPlan& plan) {
  nlohmann::ordered_json j;
  j["session_id"] = plan.session_id;
  j["seed"] = plan.seed;
  j["raters"] = plan.raters;
  nlohmann::ordered_json cases = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < plan.cases.size(); ++i) {
    const auto& c = plan.cases[i];
    const auto& a = plan.assignments[i];
    cases.push_back({{"patient_id", c.patient_id},
                     {"manual_path", c.manual_path},
                     {"auto_path", c.auto_path},
                     {"slice_count", c.slice_count},
                     {"method_of_A", to_string(a.method_of_a)},
                     {"method_of_B", to_string(a.method_of_b)}});
  }
  j["cases"] = std::move(cases);
  j["overlap"] = plan.overlap;
  nlohmann::ordered_json parts = nlohmann::ordered_json::object();
  for (const auto& rater : plan.raters) parts[rater] = plan.partitions.at(rater);
  j["partitions"] = std::move(parts);
  return nlohmann::json::parse(j.dump());
}

SessionPlan plan_from_json(const nlohmann::json& j) {
  SessionPlan plan;
  try {
    plan.session_id = j.at("session_id").get<std::string>();
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.raters = j.at("raters").get<std::vector<std::string>>();
    for (const auto& c : j.at("cases")) {
      CaseEntry entry{c.at("patient_id").get<std::string>(), c.at("manual_path").get<std::string>(),
                      c.at("auto_path").get<std::string>(), c.at("slice_count").get<int>()};
      CaseAssignment assignment{entry.patient_id,
                                parse_method(c.at("method_of_A").get<std::string>()),
                                parse_method(c.at("method_of_B").get<std::string>())};
      plan.cases.push_back(std::move(entry));
      plan.assignments.push_back(std::move(assignment));
    }
    plan.overlap = j.at("overlap").get<std::vector<std::string>>();
    for (const auto& [rater, ids] : j.at("partitions").items()) {
      plan.partitions[rater] = ids.get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed session plan: ") + e.what());
  }
  return plan;
}

nlohmann::json event_to_json(const RatingEvent& e) {
  nlohmann::json j;
  j["seq"] = e.seq;
  j["session_id"] = e.session_id;
  j["rater_id"] = e.rater_id;
  j["patient_id"] = e.patient_id;
  j["slice"] = e.slice;
  j["class"] = to_string(e.target);
  j["kind"] = to_string(e.kind);
  if (e.kind == EventKind::rating) {
    j["arm"] = e.arm ? nlohmann::json(to_string(*e.arm)) : nlohmann::json();
    j["category"] = e.category ? nlohmann::json(to_string(*e.category)) : nlohmann::json();
  } else {
    j["choice"] = e.choice ? nlohmann::json(to_string(*e.choice)) : nlohmann::json();
  }
  j["timestamp"] = e.timestamp;
  return j;
}

RatingEvent event_from_json(const nlohmann::json& j, EventKind kind) {
  if (!j.is_object()) throw ValidationError("event must be a JSON object");
  RatingEvent e;
  e.kind = kind;
  e.session_id = j.value("session_id", "");
  e.rater_id = required_string(j, "rater_id");
  e.patient_id = required_string(j, "patient_id");
  if (!j.contains("slice") || !j["slice"].is_number_integer()) {
    throw ValidationError("missing integer field 'slice'");
  }
  e.slice = j["slice"].get<int>();
  e.target = parse_target_class(required_string(j, "class"));
  if (j.contains("seq") && j["seq"].is_number_unsigned()) e.seq = j["seq"].get<std::uint64_t>();
  if (j.contains("timestamp") && j["timestamp"].is_string()) {
    e.timestamp = j["timestamp"].get<std::string>();
  }

  const bool has_arm = j.contains("arm") && !j["arm"].is_null();
  if (kind == EventKind::rating) {
    if (!has_arm) throw ValidationError("category ratings require an arm (A or B)");
    if (j.contains("choice") && !j["choice"].is_null()) {
      throw ValidationError("category ratings cannot carry a comparison choice");
    }
    e.arm = parse_arm(required_string(j, "arm"));
    e.category = parse_category(required_string(j, "category"));
  } else {
    if (has_arm) throw ValidationError("comparisons must not name an arm");
    if (j.contains("category") && !j["category"].is_null()) {
      throw ValidationError("comparisons cannot carry a rating category");
    }
    e.choice = parse_choice(required_string(j, "choice"));
  }
  return e;
}

}  // namespace lge::rating
