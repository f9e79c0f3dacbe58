#include "lge/rating/session.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "lge/csv.hpp"
#include "lge/error.hpp"

namespace lge::rating {

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex;
  ss.width(16);
  ss.fill('0');
  ss << v;
  return ss.str();
}

std::size_t category_index(RatingCategory c) { return static_cast<std::size_t>(c); }

std::vector<std::string> category_labels() {
  std::vector<std::string> out;
  for (RatingCategory c : kAllCategories) out.emplace_back(to_string(c));
  return out;
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(std::string("invalid ") + what + ": '" + s + "'");
  }
}

}  // namespace

CaseAssignment blind_assignment(std::uint64_t seed, const std::string& patient_id) {
  const bool automatic_first = (splitmix64(seed ^ fnv1a(patient_id)) & 1ULL) != 0;
  CaseAssignment a;
  a.patient_id = patient_id;
  a.method_of_a = automatic_first ? Method::automatic : Method::manual;
  a.method_of_b = automatic_first ? Method::manual : Method::automatic;
  return a;
}

SessionPlan create_plan(std::vector<CaseEntry> cases, std::vector<std::string> raters,
                        std::size_t overlap_n, std::uint64_t seed) {
  if (raters.empty()) throw ValidationError("a session needs at least one rater");
  std::set<std::string> seen_raters;
  for (const auto& r : raters) {
    if (r.empty() || r == kConsensusRater) throw ValidationError("invalid rater id '" + r + "'");
    if (!seen_raters.insert(r).second) throw ValidationError("duplicate rater id '" + r + "'");
  }
  std::set<std::string> seen_patients;
  for (const auto& c : cases) {
    if (c.patient_id.empty()) throw ValidationError("empty patient id");
    if (!seen_patients.insert(c.patient_id).second) {
      throw ValidationError("duplicate patient id '" + c.patient_id + "'");
    }
    if (c.slice_count < 1) throw ValidationError("case '" + c.patient_id + "' has no slices");
  }
  if (overlap_n > cases.size()) throw ValidationError("overlap exceeds the number of cases");

  SessionPlan plan;
  plan.seed = seed;
  plan.raters = raters;

  std::uint64_t h = fnv1a(std::to_string(seed));
  for (const auto& c : cases) h = fnv1a(c.patient_id + "\x1f", h);
  for (const auto& r : raters) h = fnv1a(r + "\x1e", h);
  h = fnv1a(std::to_string(overlap_n), h);
  plan.session_id = "s-" + hex64(h);

  std::mt19937_64 rng(seed);
  std::shuffle(cases.begin(), cases.end(), rng);
  plan.cases = std::move(cases);

  for (std::size_t i = 0; i < overlap_n; ++i) plan.overlap.push_back(plan.cases[i].patient_id);
  const std::size_t rest = plan.cases.size() - overlap_n;
  for (std::size_t r = 0; r < raters.size(); ++r) {
    const std::size_t begin = overlap_n + rest * r / raters.size();
    const std::size_t end = overlap_n + rest * (r + 1) / raters.size();
    auto& part = plan.partitions[raters[r]];
    for (std::size_t i = begin; i < end; ++i) part.push_back(plan.cases[i].patient_id);
  }
  for (const auto& c : plan.cases) plan.assignments.push_back(blind_assignment(seed, c.patient_id));
  return plan;
}

std::vector<TaskRef> tasks_for(const SessionPlan& plan, const std::string& rater_id) {
  std::vector<TaskRef> tasks;
  for (const auto& pid : plan.patients_for(rater_id)) {
    const int n = plan.case_of(pid).slice_count;
    for (int z = 0; z < n; ++z) tasks.push_back({pid, z});
  }
  return tasks;
}

EventKey key_of(const RatingEvent& e) {
  return {e.rater_id, e.patient_id, e.slice, e.target, e.kind,
          e.arm ? static_cast<int>(*e.arm) : -1};
}

void SessionState::validate(const RatingEvent& e) const {
  if (!e.session_id.empty() && e.session_id != plan_.session_id) {
    throw ValidationError("event belongs to another session");
  }
  if (!plan_.has_rater(e.rater_id)) throw ValidationError("unknown rater '" + e.rater_id + "'");
  const auto patients = plan_.patients_for(e.rater_id);
  if (std::find(patients.begin(), patients.end(), e.patient_id) == patients.end()) {
    throw ValidationError("unknown task: patient '" + e.patient_id + "' is not assigned to '" +
                          e.rater_id + "'");
  }
  const int n = plan_.case_of(e.patient_id).slice_count;
  if (e.slice < 0 || e.slice >= n) throw ValidationError("unknown task: slice out of range");

  if (e.kind == EventKind::rating) {
    if (!e.arm || !e.category || e.choice) {
      throw ValidationError("category ratings need an arm and a category");
    }
    return;
  }
  if (e.arm || e.category || !e.choice) {
    throw ValidationError("comparisons need a choice and no arm");
  }

  std::optional<RatingCategory> a, b;
  if (e.rater_id == kConsensusRater) {
    const auto& assignment = plan_.assignment_of(e.patient_id);
    a = effective_rating(e.patient_id, e.slice, e.target, assignment.method_of_a);
    b = effective_rating(e.patient_id, e.slice, e.target, assignment.method_of_b);
  } else {
    a = rating_by(e.rater_id, e.patient_id, e.slice, e.target, Arm::a);
    b = rating_by(e.rater_id, e.patient_id, e.slice, e.target, Arm::b);
  }
  if (!a || !b) throw ValidationError("both arms must be rated before comparing");
  if (!comparison_eligible(*a, *b)) {
    throw ValidationError("ineligible comparison: both arms rated true_negative");
  }
}

void SessionState::append(RatingEvent event) {
  const EventKey key = key_of(event);
  events_.push_back(std::move(event));
  latest_[key] = events_.size() - 1;
}

std::vector<RatingEvent> SessionState::latest_events() const {
  std::vector<RatingEvent> out;
  out.reserve(latest_.size());
  for (const auto& [key, index] : latest_) out.push_back(events_[index]);
  std::sort(out.begin(), out.end(),
            [](const RatingEvent& a, const RatingEvent& b) { return a.seq < b.seq; });
  return out;
}

std::optional<RatingCategory> SessionState::rating_by(const std::string& rater,
                                                      const std::string& patient, int slice,
                                                      TargetClass target, Arm arm) const {
  const auto it =
      latest_.find({rater, patient, slice, target, EventKind::rating, static_cast<int>(arm)});
  if (it == latest_.end()) return std::nullopt;
  return events_[it->second].category;
}

std::optional<ComparisonChoice> SessionState::comparison_by(const std::string& rater,
                                                            const std::string& patient,
                                                            int slice, TargetClass target) const {
  const auto it = latest_.find({rater, patient, slice, target, EventKind::comparison, -1});
  if (it == latest_.end()) return std::nullopt;
  return events_[it->second].choice;
}

std::optional<RatingCategory> SessionState::effective_rating(const std::string& patient,
                                                             int slice, TargetClass target,
                                                             Method method) const {
  const Arm arm = plan_.assignment_of(patient).arm_of(method);
  if (auto c = rating_by(std::string(kConsensusRater), patient, slice, target, arm)) return c;
  for (const auto& rater : plan_.raters) {
    if (auto c = rating_by(rater, patient, slice, target, arm)) return c;
  }
  return std::nullopt;
}

std::optional<ComparisonChoice> SessionState::effective_comparison(const std::string& patient,
                                                                   int slice,
                                                                   TargetClass target) const {
  if (auto c = comparison_by(std::string(kConsensusRater), patient, slice, target)) return c;
  for (const auto& rater : plan_.raters) {
    if (auto c = comparison_by(rater, patient, slice, target)) return c;
  }
  return std::nullopt;
}

bool comparison_eligible(RatingCategory arm_a, RatingCategory arm_b) {
  return !(arm_a == RatingCategory::true_negative && arm_b == RatingCategory::true_negative);
}

double MethodProportions::detailed_fraction(RatingCategory c) const {
  return total == 0 ? 0.0
                    : static_cast<double>(detailed[category_index(c)]) / static_cast<double>(total);
}

double MethodProportions::coarse_fraction(Outcome o) const {
  return total == 0 ? 0.0
                    : static_cast<double>(coarse[static_cast<std::size_t>(o)]) /
                          static_cast<double>(total);
}

ProportionSummary aggregate_proportions(const SessionState& state, TargetClass target) {
  ProportionSummary out;
  out.target = target;
  for (const auto& c : state.plan().cases) {
    for (int z = 0; z < c.slice_count; ++z) {
      for (Method m : {Method::manual, Method::automatic}) {
        const auto rating = state.effective_rating(c.patient_id, z, target, m);
        if (!rating) continue;
        MethodProportions& p = m == Method::manual ? out.manual : out.automatic;
        ++p.total;
        ++p.detailed[category_index(*rating)];
        ++p.coarse[static_cast<std::size_t>(coarse_outcome(*rating))];
      }
    }
  }
  return out;
}

PreferenceSummary preference_summary(const SessionState& state, TargetClass target) {
  PreferenceSummary out;
  for (const auto& c : state.plan().cases) {
    const auto& assignment = state.plan().assignment_of(c.patient_id);
    for (int z = 0; z < c.slice_count; ++z) {
      const auto manual = state.effective_rating(c.patient_id, z, target, Method::manual);
      const auto automatic = state.effective_rating(c.patient_id, z, target, Method::automatic);
      if (manual && automatic && !comparison_eligible(*manual, *automatic)) {
        ++out.excluded;
        continue;
      }
      const auto choice = state.effective_comparison(c.patient_id, z, target);
      if (!choice) continue;
      if (*choice == ComparisonChoice::equal) {
        ++out.equal;
        continue;
      }
      const Method preferred =
          assignment.method_of(*choice == ComparisonChoice::a ? Arm::a : Arm::b);
      ++(preferred == Method::automatic ? out.ai_preferred : out.human_preferred);
    }
  }
  if (out.ai_preferred + out.human_preferred > 0) {
    const std::array<std::uint64_t, 2> counts = {out.ai_preferred, out.human_preferred};
    out.chi_square = chi_square_uniform(counts);
  }
  return out;
}

AgreementResult rater_agreement(const SessionState& state, TargetClass target,
                                AgreementKind kind) {
  const auto& plan = state.plan();
  if (plan.raters.size() < 2) throw ValidationError("rater agreement needs two raters");
  const std::string& r1 = plan.raters[0];
  const std::string& r2 = plan.raters[1];

  const bool categories = kind == AgreementKind::categories;
  ConfusionMatrix matrix = categories
                               ? ConfusionMatrix(category_labels())
                               : ConfusionMatrix({"prefer_manual", "equal", "prefer_automatic"});
  for (const auto& pid : plan.overlap) {
    const auto& assignment = plan.assignment_of(pid);
    const int n = plan.case_of(pid).slice_count;
    auto ordinal = [&](ComparisonChoice c) -> std::size_t {
      if (c == ComparisonChoice::equal) return 1;
      const Method m = assignment.method_of(c == ComparisonChoice::a ? Arm::a : Arm::b);
      return m == Method::manual ? 0 : 2;
    };
    for (int z = 0; z < n; ++z) {
      if (categories) {
        for (Arm arm : {Arm::a, Arm::b}) {
          const auto c1 = state.rating_by(r1, pid, z, target, arm);
          const auto c2 = state.rating_by(r2, pid, z, target, arm);
          if (c1 && c2) matrix.add(category_index(*c1), category_index(*c2));
        }
      } else {
        const auto c1 = state.comparison_by(r1, pid, z, target);
        const auto c2 = state.comparison_by(r2, pid, z, target);
        if (c1 && c2) matrix.add(ordinal(*c1), ordinal(*c2));
      }
    }
  }
  if (matrix.total() == 0) throw ValidationError("no overlap data for rater agreement");
  const KappaWeighting weighting = categories ? KappaWeighting::none : KappaWeighting::linear;
  const double kappa = cohen_kappa(matrix, weighting);
  return AgreementResult{r1, r2, std::move(matrix), kappa, weighting};
}

MethodContingency patient_contingency_from_ratings(const SessionState& state,
                                                   TargetClass target) {
  MethodContingency out;
  std::vector<bool> truth, manual_pred, auto_pred;
  for (const auto& c : state.plan().cases) {
    bool present = false;
    bool marked_manual = false;
    bool marked_auto = false;
    for (int z = 0; z < c.slice_count; ++z) {
      for (Method m : {Method::manual, Method::automatic}) {
        const auto rating = state.effective_rating(c.patient_id, z, target, m);
        if (!rating) {
          throw ValidationError("incomplete patient '" + c.patient_id + "': slice " +
                                std::to_string(z) + " lacks a " + std::string(to_string(target)) +
                                " rating");
        }
        present = present || implies_presence(*rating);
        bool& marked = m == Method::manual ? marked_manual : marked_auto;
        marked = marked || implies_marking(*rating);
      }
    }
    truth.push_back(present);
    manual_pred.push_back(marked_manual);
    auto_pred.push_back(marked_auto);
  }
  // vector<bool> has no contiguous storage; copy into spans of bool.
  auto to_array = [](const std::vector<bool>& v) {
    return std::unique_ptr<bool[]>(new bool[v.size()]);
  };
  const std::size_t n = truth.size();
  auto t = to_array(truth), pm = to_array(manual_pred), pa = to_array(auto_pred);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = truth[i];
    pm[i] = manual_pred[i];
    pa[i] = auto_pred[i];
  }
  out.manual = contingency({pm.get(), n}, {t.get(), n});
  out.automatic = contingency({pa.get(), n}, {t.get(), n});
  return out;
}

ExportBundle export_session(const SessionState& state) {
  ExportBundle bundle;
  bundle.ratings_csv = csv_line({"session_id", "rater_id", "patient_id", "slice", "class", "arm",
                                 "category", "seq", "timestamp"});
  bundle.comparisons_csv = csv_line({"session_id", "rater_id", "patient_id", "slice", "class",
                                     "choice", "seq", "timestamp"});
  std::map<std::string, std::uint64_t> wrong_organ;
  for (const auto& e : state.latest_events()) {
    const std::string session = state.plan().session_id;
    if (e.kind == EventKind::rating) {
      bundle.ratings_csv += csv_line({session, e.rater_id, e.patient_id, std::to_string(e.slice),
                                      std::string(to_string(e.target)),
                                      std::string(to_string(*e.arm)),
                                      std::string(to_string(*e.category)), std::to_string(e.seq),
                                      e.timestamp});
      if (*e.category == RatingCategory::wrong_organ) ++wrong_organ[e.patient_id];
    } else {
      bundle.comparisons_csv += csv_line(
          {session, e.rater_id, e.patient_id, std::to_string(e.slice),
           std::string(to_string(e.target)), std::string(to_string(*e.choice)),
           std::to_string(e.seq), e.timestamp});
    }
  }
  // wrong_organ ratings do not enter the patient-level presence rule; the
  // count is exported so they can be reviewed.
  bundle.mapping_csv =
      csv_line({"patient_id", "method_of_A", "method_of_B", "slice_count", "wrong_organ_ratings"});
  const auto& plan = state.plan();
  for (std::size_t i = 0; i < plan.cases.size(); ++i) {
    const auto& c = plan.cases[i];
    const auto& a = plan.assignments[i];
    bundle.mapping_csv += csv_line({c.patient_id, std::string(to_string(a.method_of_a)),
                                    std::string(to_string(a.method_of_b)),
                                    std::to_string(c.slice_count),
                                    std::to_string(wrong_organ[c.patient_id])});
  }
  bundle.session_json = plan_to_json(plan).dump(2) + "\n";
  return bundle;
}

SessionState import_session(const ExportBundle& bundle) {
  SessionPlan plan;
  try {
    plan = plan_from_json(nlohmann::json::parse(bundle.session_json));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed session.json: ") + e.what());
  }

  const CsvTable mapping = parse_csv(bundle.mapping_csv);
  for (const auto& row : mapping.rows) {
    const auto& a = plan.assignment_of(row[mapping.column("patient_id")]);
    if (parse_method(row[mapping.column("method_of_A")]) != a.method_of_a ||
        parse_method(row[mapping.column("method_of_B")]) != a.method_of_b) {
      throw ValidationError("mapping.csv disagrees with session.json");
    }
  }

  std::vector<RatingEvent> events;
  auto read_events = [&](const std::string& text, EventKind kind) {
    const CsvTable t = parse_csv(text);
    if (t.header.empty()) return;
    for (const auto& row : t.rows) {
      RatingEvent e;
      e.kind = kind;
      e.session_id = row[t.column("session_id")];
      e.rater_id = row[t.column("rater_id")];
      e.patient_id = row[t.column("patient_id")];
      e.slice = static_cast<int>(parse_u64(row[t.column("slice")], "slice"));
      e.target = parse_target_class(row[t.column("class")]);
      if (kind == EventKind::rating) {
        e.arm = parse_arm(row[t.column("arm")]);
        e.category = parse_category(row[t.column("category")]);
      } else {
        e.choice = parse_choice(row[t.column("choice")]);
      }
      e.seq = parse_u64(row[t.column("seq")], "seq");
      e.timestamp = row[t.column("timestamp")];
      events.push_back(std::move(e));
    }
  };
  read_events(bundle.ratings_csv, EventKind::rating);
  read_events(bundle.comparisons_csv, EventKind::comparison);
  std::sort(events.begin(), events.end(),
            [](const RatingEvent& a, const RatingEvent& b) { return a.seq < b.seq; });

  SessionState state(std::move(plan));
  for (auto& e : events) state.append(std::move(e));
  return state;
}

}  // namespace lge::rating
