#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace lge::rating {

enum class RatingCategory {
  optimal,
  too_big,
  too_small,
  wrong_organ,
  false_negative,
  false_positive,
  true_negative,
};
inline constexpr std::size_t kCategoryCount = 7;
inline constexpr std::array<RatingCategory, kCategoryCount> kAllCategories = {
    RatingCategory::optimal,        RatingCategory::too_big,        RatingCategory::too_small,
    RatingCategory::wrong_organ,    RatingCategory::false_negative, RatingCategory::false_positive,
    RatingCategory::true_negative};

// Coarse four-way view of a category.
enum class Outcome { true_negative, true_positive, false_negative, false_positive };
inline constexpr std::size_t kOutcomeCount = 4;

enum class ComparisonChoice { a, b, equal };
enum class Method { manual, automatic };
enum class TargetClass { scar, mvo };
enum class Arm { a, b };
enum class EventKind { rating, comparison };

inline constexpr std::string_view kConsensusRater = "consensus";

std::string_view to_string(RatingCategory v);
std::string_view to_string(Outcome v);
std::string_view to_string(ComparisonChoice v);
std::string_view to_string(Method v);
std::string_view to_string(TargetClass v);
std::string_view to_string(Arm v);
std::string_view to_string(EventKind v);

// Parsers throw ValidationError on values outside the closed enumerations.
RatingCategory parse_category(std::string_view s);
ComparisonChoice parse_choice(std::string_view s);
Method parse_method(std::string_view s);
TargetClass parse_target_class(std::string_view s);
Arm parse_arm(std::string_view s);

Outcome coarse_outcome(RatingCategory c);

// Rating implies the infarct/MVO is present on the slice.
bool implies_presence(RatingCategory c);
// Rating implies the rated method marked something on the slice.
bool implies_marking(RatingCategory c);

struct CaseEntry {
  std::string patient_id;
  std::string manual_path;
  std::string auto_path;
  int slice_count = 0;
};

// Which method is shown as "segmentation A". Admin-side only.
struct CaseAssignment {
  std::string patient_id;
  Method method_of_a = Method::manual;
  Method method_of_b = Method::automatic;

  Method method_of(Arm arm) const { return arm == Arm::a ? method_of_a : method_of_b; }
  Arm arm_of(Method m) const { return method_of_a == m ? Arm::a : Arm::b; }
};

struct SessionPlan {
  std::string session_id;
  std::uint64_t seed = 0;
  std::vector<std::string> raters;
  std::vector<CaseEntry> cases;              // plan order
  std::vector<std::string> overlap;          // rated by every rater
  std::map<std::string, std::vector<std::string>> partitions;  // rater -> own cases
  std::vector<CaseAssignment> assignments;   // parallel to cases

  const CaseEntry& case_of(std::string_view patient_id) const;
  const CaseAssignment& assignment_of(std::string_view patient_id) const;
  bool has_patient(std::string_view patient_id) const;
  bool has_rater(std::string_view rater_id) const;
  // Patients assigned to a rater in plan order; the consensus rater sees all.
  std::vector<std::string> patients_for(std::string_view rater_id) const;
};

nlohmann::json plan_to_json(const SessionPlan& plan);
SessionPlan plan_from_json(const nlohmann::json& j);

struct RatingEvent {
  std::uint64_t seq = 0;
  std::string session_id;
  std::string rater_id;
  std::string patient_id;
  int slice = 0;
  TargetClass target = TargetClass::scar;
  EventKind kind = EventKind::rating;
  std::optional<Arm> arm;                    // ratings only
  std::optional<RatingCategory> category;    // ratings only
  std::optional<ComparisonChoice> choice;    // comparisons only
  std::string timestamp;
};

nlohmann::json event_to_json(const RatingEvent& e);
// Parses a stored or submitted event; `kind` selects the expected payload.
RatingEvent event_from_json(const nlohmann::json& j, EventKind kind);

}  // namespace lge::rating
