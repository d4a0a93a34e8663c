#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mip/calendar.hpp"

namespace mip {

enum class Role { team_leader, department_manager };
enum class Cohort { successful, struggling };
enum class ActivityKind { report_view, disambiguation, fallback, task, end_of_session };

std::string role_text(Role r);          // "team leader" / "department manager"
std::string role_key(Role r);           // "team_leader" / "department_manager"
Role parse_role(const std::string& s);  // accepts either form
std::string cohort_key(Cohort c);
Cohort parse_cohort(const std::string& s);

struct Activity {
    std::string label;
    ActivityKind kind;
};

// The closed 36-label vocabulary: 20 report views, 4 disambiguations,
// fallback, 10 role-owned task activities, and the virtual session end.
// Ordering is lexicographic by label and stable across calls.
const std::vector<Activity>& activity_catalog();
const Activity& activity_by_label(const std::string& label);  // throws on unknown
bool is_known_activity(const std::string& label);
int activity_index(const std::string& label);  // position in catalog, -1 if unknown

// fallback, the four disambiguations, and session end: never recommended.
bool is_undesirable(const Activity& a);
bool is_undesirable_label(const std::string& label);  // throws on unknown

// Owning role for the 10 task activities; nullopt for non-task labels.
std::optional<Role> task_owner(const std::string& label);

inline constexpr const char* kWelcomeActivity = "welcome";
inline constexpr const char* kEndActivity = "end";
inline constexpr const char* kFallbackActivity = "fallback";

struct ReportSpec {
    std::string name;      // Table wording, e.g. "Lead time"
    std::string activity;  // catalog label, e.g. "report_lead_time"
    double p_view_team_leader = 0.0;
    double p_view_dept_manager = 0.0;
};

struct DisambiguationScenario {
    std::array<std::string, 2> report_activities;  // the competing pair
    std::string disambiguation_activity;           // disambig_* label
    std::string example_trigger;                   // ambiguous utterance
};

struct CohortProfile {
    Role role = Role::team_leader;
    Cohort cohort = Cohort::successful;
    double mean_intersession_interval_wd = 1.0;
    double mean_conversations_per_case = 1.0;
    double p_fallback_per_utterance = 0.0;
    double p_abandon_session = 0.0;
};

struct DecisionProbs {
    double approve = 0.7;
    double approve_with_correction = 0.2;
    double reject = 0.1;
};

// Knobs for the per-turn value sampling; see simulator.cpp for use.
struct SamplingParams {
    double intent_confidence_min = 0.55;
    double intent_confidence_max = 0.99;
    double fallback_confidence_min = 0.05;
    double fallback_confidence_max = 0.35;
    double score_scale = 0.95;
    double score_noise_sd = 0.02;
    double entity_confidence_one_prob = 0.9;
    double entity_confidence_min = 0.5;
    double repeat_view_success_prob = 0.7;   // total views = 1 + Geometric(p)
    double view_nomination_prob = 0.8;       // chance a case views nominations
    double view_nomination_success_prob = 0.6;
    double turn_gap_median_seconds = 25.0;
    double turn_gap_sigma = 0.7;
    int fallback_cap = 3;
};

struct SimulationConfig {
    int n_dept_managers = 250;
    int teams_per_manager = 4;
    double mean_team_size = 10.0;
    double nomination_rate = 0.2;
    double struggling_fraction = 1.0 / 3.0;
    double p_disambiguation = 0.12;
    DecisionProbs decision_probs;
    uint64_t master_seed = 20220307;
    BusinessCalendar calendar;
    std::vector<ReportSpec> reports;                  // 20 entries
    std::vector<DisambiguationScenario> scenarios;    // 4 entries
    std::vector<CohortProfile> cohorts;               // 4 entries
    SamplingParams sampling;

    int total_cases() const { return n_dept_managers * teams_per_manager; }
    const CohortProfile& cohort(Role r, Cohort c) const;
    const ReportSpec& report(const std::string& name) const;  // throws on unknown

    // Throws std::invalid_argument describing the first violated invariant.
    void validate() const;

    std::string to_json_string() const;  // explicit defaults, sorted keys
    static SimulationConfig from_json_string(const std::string& text);  // unknown keys rejected
};

SimulationConfig default_config();

}  // namespace mip
