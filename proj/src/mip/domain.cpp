#include "mip/domain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace mip {

using nlohmann::json;

std::string role_text(Role r) {
    return r == Role::team_leader ? "team leader" : "department manager";
}

std::string role_key(Role r) {
    return r == Role::team_leader ? "team_leader" : "department_manager";
}

Role parse_role(const std::string& s) {
    if (s == "team leader" || s == "team_leader") return Role::team_leader;
    if (s == "department manager" || s == "department_manager") {
        return Role::department_manager;
    }
    throw std::invalid_argument("unknown role: '" + s + "'");
}

std::string cohort_key(Cohort c) {
    return c == Cohort::successful ? "successful" : "struggling";
}

Cohort parse_cohort(const std::string& s) {
    if (s == "successful") return Cohort::successful;
    if (s == "struggling") return Cohort::struggling;
    throw std::invalid_argument("unknown cohort: '" + s + "'");
}

namespace {

std::vector<Activity> build_catalog() {
    std::vector<Activity> v;
    auto add = [&v](const char* label, ActivityKind kind) {
        v.push_back({label, kind});
    };
    // 20 report views
    add("report_absence", ActivityKind::report_view);
    add("report_bugs_fixed", ActivityKind::report_view);
    add("report_client_feedback", ActivityKind::report_view);
    add("report_code_churn", ActivityKind::report_view);
    add("report_compensation", ActivityKind::report_view);
    add("report_defects_repair_time", ActivityKind::report_view);
    add("report_features_shipped", ActivityKind::report_view);
    add("report_innovation_and_patents", ActivityKind::report_view);
    add("report_internal_feedback", ActivityKind::report_view);
    add("report_lead_time", ActivityKind::report_view);
    add("report_learning_activities", ActivityKind::report_view);
    add("report_mip_criteria", ActivityKind::report_view);
    add("report_mip_history", ActivityKind::report_view);
    add("report_overtime", ActivityKind::report_view);
    add("report_product_defects", ActivityKind::report_view);
    add("report_project_assessments", ActivityKind::report_view);
    add("report_project_costs", ActivityKind::report_view);
    add("report_pull_requests", ActivityKind::report_view);
    add("report_sprints_velocity", ActivityKind::report_view);
    add("report_yearly_assessments", ActivityKind::report_view);
    // 4 disambiguations
    add("disambig_defects", ActivityKind::disambiguation);
    add("disambig_feedback", ActivityKind::disambiguation);
    add("disambig_mip", ActivityKind::disambiguation);
    add("disambig_project", ActivityKind::disambiguation);
    // fallback
    add("fallback", ActivityKind::fallback);
    // 10 task activities
    add("add_nomination", ActivityKind::task);
    add("provide_candidate_name", ActivityKind::task);
    add("view_nomination", ActivityKind::task);
    add("submit_nomination", ActivityKind::task);
    add("select_candidate_name", ActivityKind::task);
    add("review_nominated_candidate", ActivityKind::task);
    add("approve_nomination", ActivityKind::task);
    add("approve_with_correction", ActivityKind::task);
    add("reject_nomination", ActivityKind::task);
    add("submit_final_nominations", ActivityKind::task);
    // session end
    add("end", ActivityKind::end_of_session);

    std::sort(v.begin(), v.end(),
              [](const Activity& a, const Activity& b) { return a.label < b.label; });
    return v;
}

const std::map<std::string, int>& catalog_index() {
    static const std::map<std::string, int> idx = [] {
        std::map<std::string, int> m;
        const auto& cat = activity_catalog();
        for (int i = 0; i < static_cast<int>(cat.size()); ++i) m[cat[i].label] = i;
        return m;
    }();
    return idx;
}

}  // namespace

const std::vector<Activity>& activity_catalog() {
    static const std::vector<Activity> catalog = build_catalog();
    return catalog;
}

const Activity& activity_by_label(const std::string& label) {
    auto it = catalog_index().find(label);
    if (it == catalog_index().end()) {
        throw std::invalid_argument("unknown activity: '" + label + "'");
    }
    return activity_catalog()[it->second];
}

bool is_known_activity(const std::string& label) {
    return catalog_index().count(label) != 0;
}

int activity_index(const std::string& label) {
    auto it = catalog_index().find(label);
    return it == catalog_index().end() ? -1 : it->second;
}

bool is_undesirable(const Activity& a) {
    return a.kind == ActivityKind::fallback ||
           a.kind == ActivityKind::disambiguation ||
           a.kind == ActivityKind::end_of_session;
}

bool is_undesirable_label(const std::string& label) {
    return is_undesirable(activity_by_label(label));
}

std::optional<Role> task_owner(const std::string& label) {
    static const std::map<std::string, Role> owners = {
        {"add_nomination", Role::team_leader},
        {"provide_candidate_name", Role::team_leader},
        {"view_nomination", Role::team_leader},
        {"submit_nomination", Role::team_leader},
        {"select_candidate_name", Role::department_manager},
        {"review_nominated_candidate", Role::department_manager},
        {"approve_nomination", Role::department_manager},
        {"approve_with_correction", Role::department_manager},
        {"reject_nomination", Role::department_manager},
        {"submit_final_nominations", Role::department_manager},
    };
    auto it = owners.find(label);
    if (it == owners.end()) return std::nullopt;
    return it->second;
}

const CohortProfile& SimulationConfig::cohort(Role r, Cohort c) const {
    for (const auto& p : cohorts) {
        if (p.role == r && p.cohort == c) return p;
    }
    throw std::invalid_argument("missing cohort profile");
}

const ReportSpec& SimulationConfig::report(const std::string& name) const {
    for (const auto& r : reports) {
        if (r.name == name || r.activity == name) return r;
    }
    throw std::invalid_argument("unknown report: '" + name + "'");
}

SimulationConfig default_config() {
    SimulationConfig cfg;
    cfg.calendar.process_start = parse_timestamp("2022-03-07T08:00:00");
    cfg.calendar.regular_deadline = parse_timestamp("2022-03-28T23:59:59");
    cfg.calendar.hard_deadline = parse_timestamp("2022-04-11T17:00:00");

    // Viewing probabilities per report and role.
    cfg.reports = {
        {"MIP criteria", "report_mip_criteria", 1.0, 0.626},
        {"Yearly assessments", "report_yearly_assessments", 1.0, 0.508},
        {"Project assessments", "report_project_assessments", 0.911, 0.567},
        {"Learning activities", "report_learning_activities", 0.872, 0.470},
        {"Client feedback", "report_client_feedback", 0.865, 0.507},
        {"Internal feedback", "report_internal_feedback", 0.894, 0.518},
        {"Compensation report", "report_compensation", 0.916, 0.527},
        {"MIP history", "report_mip_history", 0.919, 0.567},
        {"Overtime", "report_overtime", 0.559, 0.301},
        {"Innovation and patents", "report_innovation_and_patents", 0.709, 0.355},
        {"Product defects", "report_product_defects", 0.363, 0.151},
        {"Sprints velocity", "report_sprints_velocity", 0.329, 0.170},
        {"Bugs fixed", "report_bugs_fixed", 0.386, 0.152},
        {"Pull requests", "report_pull_requests", 0.152, 0.129},
        {"Features shipped", "report_features_shipped", 0.303, 0.261},
        {"Defects repair time", "report_defects_repair_time", 0.171, 0.108},
        {"Lead time", "report_lead_time", 0.273, 0.171},
        {"Project costs", "report_project_costs", 0.511, 0.272},
        {"Code churn", "report_code_churn", 0.310, 0.271},
        {"Absence", "report_absence", 0.341, 0.182},
    };

    cfg.scenarios = {
        {{"report_client_feedback", "report_internal_feedback"},
         "disambig_feedback",
         "show feedback report"},
        {{"report_project_assessments", "report_project_costs"},
         "disambig_project",
         "view project data"},
        {{"report_mip_criteria", "report_mip_history"}, "disambig_mip", "MIP data"},
        {{"report_product_defects", "report_defects_repair_time"},
         "disambig_defects",
         "I need defects report"},
    };

    cfg.cohorts = {
        {Role::team_leader, Cohort::successful, 1.5, 2.0, 0.05, 0.05},
        {Role::team_leader, Cohort::struggling, 4.0, 5.5, 0.30, 0.25},
        {Role::department_manager, Cohort::successful, 1.0, 1.5, 0.05, 0.05},
        {Role::department_manager, Cohort::struggling, 2.0, 3.5, 0.30, 0.25},
    };
    return cfg;
}

void SimulationConfig::validate() const {
    auto check_prob = [](double p, const char* what) {
        if (!(p >= 0.0 && p <= 1.0) || !std::isfinite(p)) {
            throw std::invalid_argument(std::string("config: ") + what +
                                        " must lie in [0,1]");
        }
    };
    if (n_dept_managers <= 0 || teams_per_manager <= 0) {
        throw std::invalid_argument("config: population counts must be positive");
    }
    if (mean_team_size <= 0) {
        throw std::invalid_argument("config: mean_team_size must be positive");
    }
    check_prob(nomination_rate, "nomination_rate");
    check_prob(struggling_fraction, "struggling_fraction");
    check_prob(p_disambiguation, "p_disambiguation");
    check_prob(decision_probs.approve, "decision_probs.approve");
    check_prob(decision_probs.approve_with_correction,
               "decision_probs.approve_with_correction");
    check_prob(decision_probs.reject, "decision_probs.reject");
    double dsum = decision_probs.approve + decision_probs.approve_with_correction +
                  decision_probs.reject;
    if (std::abs(dsum - 1.0) > 1e-9) {
        throw std::invalid_argument("config: decision_probs must sum to 1");
    }
    calendar.validate();
    if (reports.size() != 20) {
        throw std::invalid_argument("config: expected exactly 20 reports");
    }
    std::set<std::string> seen;
    for (const auto& r : reports) {
        check_prob(r.p_view_team_leader, "report viewing probability");
        check_prob(r.p_view_dept_manager, "report viewing probability");
        if (!is_known_activity(r.activity) ||
            activity_by_label(r.activity).kind != ActivityKind::report_view) {
            throw std::invalid_argument("config: report activity '" + r.activity +
                                        "' is not a report view");
        }
        if (!seen.insert(r.activity).second) {
            throw std::invalid_argument("config: duplicate report " + r.activity);
        }
    }
    if (scenarios.size() != 4) {
        throw std::invalid_argument("config: expected exactly 4 disambiguation scenarios");
    }
    std::set<std::string> paired;
    for (const auto& s : scenarios) {
        if (!is_known_activity(s.disambiguation_activity) ||
            activity_by_label(s.disambiguation_activity).kind !=
                ActivityKind::disambiguation) {
            throw std::invalid_argument("config: bad disambiguation activity");
        }
        for (const auto& rep : s.report_activities) {
            if (!paired.insert(rep).second) {
                throw std::invalid_argument("config: report '" + rep +
                                            "' appears in two scenarios");
            }
        }
    }
    if (cohorts.size() != 4) {
        throw std::invalid_argument("config: expected exactly 4 cohort profiles");
    }
    for (Role r : {Role::team_leader, Role::department_manager}) {
        const auto& suc = cohort(r, Cohort::successful);
        const auto& str = cohort(r, Cohort::struggling);
        for (const auto* p : {&suc, &str}) {
            if (p->mean_intersession_interval_wd <= 0 ||
                p->mean_conversations_per_case <= 0) {
                throw std::invalid_argument("config: cohort means must be positive");
            }
            check_prob(p->p_fallback_per_utterance, "p_fallback_per_utterance");
            check_prob(p->p_abandon_session, "p_abandon_session");
        }
        if (str.mean_intersession_interval_wd < suc.mean_intersession_interval_wd ||
            str.mean_conversations_per_case < suc.mean_conversations_per_case ||
            str.p_fallback_per_utterance < suc.p_fallback_per_utterance) {
            throw std::invalid_argument(
                "config: struggling cohorts must dominate successful ones");
        }
    }
    check_prob(sampling.repeat_view_success_prob, "repeat_view_success_prob");
    if (sampling.repeat_view_success_prob <= 0) {
        throw std::invalid_argument("config: repeat_view_success_prob must be > 0");
    }
    if (sampling.turn_gap_median_seconds <= 0 || sampling.turn_gap_sigma < 0) {
        throw std::invalid_argument("config: bad turn-gap parameters");
    }
}

namespace {

json cohort_to_json(const CohortProfile& p) {
    return json{{"role", role_key(p.role)},
                {"cohort", cohort_key(p.cohort)},
                {"mean_intersession_interval_wd", p.mean_intersession_interval_wd},
                {"mean_conversations_per_case", p.mean_conversations_per_case},
                {"p_fallback_per_utterance", p.p_fallback_per_utterance},
                {"p_abandon_session", p.p_abandon_session}};
}

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw std::invalid_argument("config: unknown key '" + it.key() +
                                        "' in " + where);
        }
    }
    for (const auto& k : allowed) {
        if (!j.contains(k)) {
            throw std::invalid_argument("config: missing key '" + k + "' in " + where);
        }
    }
}

}  // namespace

std::string SimulationConfig::to_json_string() const {
    json j;
    j["n_dept_managers"] = n_dept_managers;
    j["teams_per_manager"] = teams_per_manager;
    j["mean_team_size"] = mean_team_size;
    j["nomination_rate"] = nomination_rate;
    j["struggling_fraction"] = struggling_fraction;
    j["p_disambiguation"] = p_disambiguation;
    j["master_seed"] = master_seed;
    j["decision_probs"] = {
        {"approve", decision_probs.approve},
        {"approve_with_correction", decision_probs.approve_with_correction},
        {"reject", decision_probs.reject}};
    j["calendar"] = {{"process_start", format_timestamp(calendar.process_start)},
                     {"regular_deadline", format_timestamp(calendar.regular_deadline)},
                     {"hard_deadline", format_timestamp(calendar.hard_deadline)},
                     {"workday_start_hour", calendar.workday_start_hour},
                     {"workday_end_hour", calendar.workday_end_hour},
                     {"evening_limit_hour", calendar.evening_limit_hour}};
    j["reports"] = json::array();
    for (const auto& r : reports) {
        j["reports"].push_back({{"name", r.name},
                                {"activity", r.activity},
                                {"p_view_team_leader", r.p_view_team_leader},
                                {"p_view_dept_manager", r.p_view_dept_manager}});
    }
    j["scenarios"] = json::array();
    for (const auto& s : scenarios) {
        j["scenarios"].push_back(
            {{"reports", {s.report_activities[0], s.report_activities[1]}},
             {"disambiguation_activity", s.disambiguation_activity},
             {"example_trigger", s.example_trigger}});
    }
    j["cohorts"] = json::array();
    for (const auto& c : cohorts) j["cohorts"].push_back(cohort_to_json(c));
    j["sampling"] = {
        {"intent_confidence_min", sampling.intent_confidence_min},
        {"intent_confidence_max", sampling.intent_confidence_max},
        {"fallback_confidence_min", sampling.fallback_confidence_min},
        {"fallback_confidence_max", sampling.fallback_confidence_max},
        {"score_scale", sampling.score_scale},
        {"score_noise_sd", sampling.score_noise_sd},
        {"entity_confidence_one_prob", sampling.entity_confidence_one_prob},
        {"entity_confidence_min", sampling.entity_confidence_min},
        {"repeat_view_success_prob", sampling.repeat_view_success_prob},
        {"view_nomination_prob", sampling.view_nomination_prob},
        {"view_nomination_success_prob", sampling.view_nomination_success_prob},
        {"turn_gap_median_seconds", sampling.turn_gap_median_seconds},
        {"turn_gap_sigma", sampling.turn_gap_sigma},
        {"fallback_cap", sampling.fallback_cap}};
    return j.dump(2) + "\n";
}

SimulationConfig SimulationConfig::from_json_string(const std::string& text) {
    json j = json::parse(text);
    require_keys(j,
                 {"n_dept_managers", "teams_per_manager", "mean_team_size",
                  "nomination_rate", "struggling_fraction", "p_disambiguation",
                  "master_seed", "decision_probs", "calendar", "reports",
                  "scenarios", "cohorts", "sampling"},
                 "config root");
    SimulationConfig cfg;
    cfg.n_dept_managers = j.at("n_dept_managers").get<int>();
    cfg.teams_per_manager = j.at("teams_per_manager").get<int>();
    cfg.mean_team_size = j.at("mean_team_size").get<double>();
    cfg.nomination_rate = j.at("nomination_rate").get<double>();
    cfg.struggling_fraction = j.at("struggling_fraction").get<double>();
    cfg.p_disambiguation = j.at("p_disambiguation").get<double>();
    cfg.master_seed = j.at("master_seed").get<uint64_t>();

    const json& dp = j.at("decision_probs");
    require_keys(dp, {"approve", "approve_with_correction", "reject"},
                 "decision_probs");
    cfg.decision_probs.approve = dp.at("approve").get<double>();
    cfg.decision_probs.approve_with_correction =
        dp.at("approve_with_correction").get<double>();
    cfg.decision_probs.reject = dp.at("reject").get<double>();

    const json& cal = j.at("calendar");
    require_keys(cal,
                 {"process_start", "regular_deadline", "hard_deadline",
                  "workday_start_hour", "workday_end_hour", "evening_limit_hour"},
                 "calendar");
    cfg.calendar.process_start = parse_timestamp(cal.at("process_start"));
    cfg.calendar.regular_deadline = parse_timestamp(cal.at("regular_deadline"));
    cfg.calendar.hard_deadline = parse_timestamp(cal.at("hard_deadline"));
    cfg.calendar.workday_start_hour = cal.at("workday_start_hour").get<int>();
    cfg.calendar.workday_end_hour = cal.at("workday_end_hour").get<int>();
    cfg.calendar.evening_limit_hour = cal.at("evening_limit_hour").get<int>();

    cfg.reports.clear();
    for (const auto& r : j.at("reports")) {
        require_keys(r, {"name", "activity", "p_view_team_leader", "p_view_dept_manager"},
                     "report");
        cfg.reports.push_back({r.at("name").get<std::string>(),
                               r.at("activity").get<std::string>(),
                               r.at("p_view_team_leader").get<double>(),
                               r.at("p_view_dept_manager").get<double>()});
    }
    cfg.scenarios.clear();
    for (const auto& s : j.at("scenarios")) {
        require_keys(s, {"reports", "disambiguation_activity", "example_trigger"},
                     "scenario");
        const auto& pair = s.at("reports");
        if (!pair.is_array() || pair.size() != 2) {
            throw std::invalid_argument("config: scenario 'reports' must list 2 labels");
        }
        cfg.scenarios.push_back({{pair[0].get<std::string>(), pair[1].get<std::string>()},
                                 s.at("disambiguation_activity").get<std::string>(),
                                 s.at("example_trigger").get<std::string>()});
    }
    cfg.cohorts.clear();
    for (const auto& c : j.at("cohorts")) {
        require_keys(c,
                     {"role", "cohort", "mean_intersession_interval_wd",
                      "mean_conversations_per_case", "p_fallback_per_utterance",
                      "p_abandon_session"},
                     "cohort");
        cfg.cohorts.push_back({parse_role(c.at("role").get<std::string>()),
                               parse_cohort(c.at("cohort").get<std::string>()),
                               c.at("mean_intersession_interval_wd").get<double>(),
                               c.at("mean_conversations_per_case").get<double>(),
                               c.at("p_fallback_per_utterance").get<double>(),
                               c.at("p_abandon_session").get<double>()});
    }
    const json& sp = j.at("sampling");
    require_keys(sp,
                 {"intent_confidence_min", "intent_confidence_max",
                  "fallback_confidence_min", "fallback_confidence_max", "score_scale",
                  "score_noise_sd", "entity_confidence_one_prob",
                  "entity_confidence_min", "repeat_view_success_prob",
                  "view_nomination_prob", "view_nomination_success_prob",
                  "turn_gap_median_seconds", "turn_gap_sigma", "fallback_cap"},
                 "sampling");
    cfg.sampling.intent_confidence_min = sp.at("intent_confidence_min").get<double>();
    cfg.sampling.intent_confidence_max = sp.at("intent_confidence_max").get<double>();
    cfg.sampling.fallback_confidence_min =
        sp.at("fallback_confidence_min").get<double>();
    cfg.sampling.fallback_confidence_max =
        sp.at("fallback_confidence_max").get<double>();
    cfg.sampling.score_scale = sp.at("score_scale").get<double>();
    cfg.sampling.score_noise_sd = sp.at("score_noise_sd").get<double>();
    cfg.sampling.entity_confidence_one_prob =
        sp.at("entity_confidence_one_prob").get<double>();
    cfg.sampling.entity_confidence_min = sp.at("entity_confidence_min").get<double>();
    cfg.sampling.repeat_view_success_prob =
        sp.at("repeat_view_success_prob").get<double>();
    cfg.sampling.view_nomination_prob = sp.at("view_nomination_prob").get<double>();
    cfg.sampling.view_nomination_success_prob =
        sp.at("view_nomination_success_prob").get<double>();
    cfg.sampling.turn_gap_median_seconds =
        sp.at("turn_gap_median_seconds").get<double>();
    cfg.sampling.turn_gap_sigma = sp.at("turn_gap_sigma").get<double>();
    cfg.sampling.fallback_cap = sp.at("fallback_cap").get<int>();

    cfg.validate();
    return cfg;
}

}  // namespace mip
