#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "lge/metrics.hpp"
#include "lge/rating/types.hpp"
#include "lge/stats.hpp"

namespace lge::rating {

// Deterministic in (seed, patient_id).
CaseAssignment blind_assignment(std::uint64_t seed, const std::string& patient_id);

// Shuffles the cases with `seed`, takes the first `overlap_n` as the shared
// subset and splits the rest into contiguous, near-equal rater partitions.
SessionPlan create_plan(std::vector<CaseEntry> cases, std::vector<std::string> raters,
                        std::size_t overlap_n, std::uint64_t seed);

struct TaskRef {
  std::string patient_id;
  int slice = 0;
};

// Patient-then-slice order over the rater's assignment.
std::vector<TaskRef> tasks_for(const SessionPlan& plan, const std::string& rater_id);

// (rater, patient, slice, class, kind, arm)
using EventKey = std::tuple<std::string, std::string, int, TargetClass, EventKind, int>;
EventKey key_of(const RatingEvent& e);

class SessionState {
 public:
  SessionState() = default;
  explicit SessionState(SessionPlan plan) : plan_(std::move(plan)) {}

  const SessionPlan& plan() const { return plan_; }
  const std::vector<RatingEvent>& history() const { return events_; }

  // Throws ValidationError when the event does not reference a task of its
  // rater or breaks the payload schema (including comparison eligibility).
  void validate(const RatingEvent& event) const;

  // Appends without validation; supersedes earlier events with the same key.
  void append(RatingEvent event);

  std::uint64_t next_seq() const { return events_.empty() ? 1 : events_.back().seq + 1; }

  // Latest event per key, ordered by sequence number.
  std::vector<RatingEvent> latest_events() const;

  std::optional<RatingCategory> rating_by(const std::string& rater, const std::string& patient,
                                          int slice, TargetClass target, Arm arm) const;
  std::optional<ComparisonChoice> comparison_by(const std::string& rater,
                                                const std::string& patient, int slice,
                                                TargetClass target) const;

  // Consensus first, then raters in roster order.
  std::optional<RatingCategory> effective_rating(const std::string& patient, int slice,
                                                 TargetClass target, Method method) const;
  std::optional<ComparisonChoice> effective_comparison(const std::string& patient, int slice,
                                                       TargetClass target) const;

 private:
  SessionPlan plan_;
  std::vector<RatingEvent> events_;
  std::map<EventKey, std::size_t> latest_;  // index into events_
};

// False iff both arms were rated true negative.
bool comparison_eligible(RatingCategory arm_a, RatingCategory arm_b);

struct MethodProportions {
  std::uint64_t total = 0;
  std::array<std::uint64_t, kCategoryCount> detailed{};
  std::array<std::uint64_t, kOutcomeCount> coarse{};

  double detailed_fraction(RatingCategory c) const;
  double coarse_fraction(Outcome o) const;
};

struct ProportionSummary {
  TargetClass target = TargetClass::scar;
  MethodProportions manual;
  MethodProportions automatic;
  bool empty() const { return manual.total == 0 && automatic.total == 0; }
};

ProportionSummary aggregate_proportions(const SessionState& state, TargetClass target);

struct PreferenceSummary {
  std::uint64_t ai_preferred = 0;
  std::uint64_t human_preferred = 0;
  std::uint64_t equal = 0;
  std::uint64_t excluded = 0;  // both arms true negative
  std::optional<ChiSquareResult> chi_square;  // absent when no non-equal verdicts

  std::uint64_t total() const { return ai_preferred + human_preferred + equal; }
};

PreferenceSummary preference_summary(const SessionState& state, TargetClass target);

enum class AgreementKind { categories, comparison };

struct AgreementResult {
  std::string rater_1;
  std::string rater_2;
  ConfusionMatrix matrix;
  double kappa = 0.0;
  KappaWeighting weighting = KappaWeighting::none;
};

// Compares the first two roster raters on the overlap subset. Comparisons
// are unblinded to (prefer manual, equal, prefer automatic) and scored with
// linear weights. Throws when the raters share no rated items.
AgreementResult rater_agreement(const SessionState& state, TargetClass target,
                                AgreementKind kind);

struct MethodContingency {
  Contingency manual;
  Contingency automatic;
};

// Patient-level detection tables from the effective slice ratings.
MethodContingency patient_contingency_from_ratings(const SessionState& state, TargetClass target);

struct ExportBundle {
  std::string ratings_csv;
  std::string comparisons_csv;
  std::string mapping_csv;
  std::string session_json;
};

ExportBundle export_session(const SessionState& state);
SessionState import_session(const ExportBundle& bundle);

}  // namespace lge::rating
