#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "mip/domain.hpp"

using namespace mip;

TEST_CASE("catalog has exactly 36 activities partitioned by kind") {
    const auto& cat = activity_catalog();
    REQUIRE(cat.size() == 36);
    std::map<ActivityKind, int> counts;
    for (const auto& a : cat) counts[a.kind] += 1;
    CHECK(counts[ActivityKind::report_view] == 20);
    CHECK(counts[ActivityKind::disambiguation] == 4);
    CHECK(counts[ActivityKind::fallback] == 1);
    CHECK(counts[ActivityKind::task] == 10);
    CHECK(counts[ActivityKind::end_of_session] == 1);
}

TEST_CASE("catalog ordering is lexicographic and stable") {
    const auto& a = activity_catalog();
    const auto& b = activity_catalog();
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].label == b[i].label);
    CHECK(std::is_sorted(a.begin(), a.end(), [](const auto& x, const auto& y) {
        return x.label < y.label;
    }));
}

TEST_CASE("task ownership follows the role split") {
    std::set<std::string> tl = {"add_nomination", "provide_candidate_name",
                                "view_nomination", "submit_nomination"};
    std::set<std::string> dm = {"select_candidate_name", "review_nominated_candidate",
                                "approve_nomination", "approve_with_correction",
                                "reject_nomination", "submit_final_nominations"};
    for (const auto& label : tl) CHECK(task_owner(label) == Role::team_leader);
    for (const auto& label : dm) CHECK(task_owner(label) == Role::department_manager);
    CHECK(!task_owner("report_lead_time"));
    CHECK(!task_owner("fallback"));
}

TEST_CASE("undesirable activities are fallback, disambiguation, end") {
    CHECK(is_undesirable_label("fallback"));
    CHECK(is_undesirable_label("disambig_feedback"));
    CHECK(is_undesirable_label("end"));
    CHECK(!is_undesirable_label("report_mip_criteria"));
    CHECK(!is_undesirable_label("add_nomination"));
    CHECK_THROWS(is_undesirable_label("no_such_activity"));
    int undesirable = 0;
    for (const auto& a : activity_catalog()) undesirable += is_undesirable(a);
    CHECK(undesirable == 6);  // fallback + 4 disambiguations + end
}

TEST_CASE("default config carries the published population parameters") {
    SimulationConfig cfg = default_config();
    CHECK(cfg.n_dept_managers == 250);
    CHECK(cfg.teams_per_manager == 4);
    CHECK(cfg.total_cases() == 1000);
    CHECK(cfg.mean_team_size == 10.0);
    CHECK(cfg.nomination_rate == 0.2);
    CHECK(cfg.struggling_fraction == doctest::Approx(1.0 / 3.0));
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("default config matches the report-probability table exactly") {
    SimulationConfig cfg = default_config();
    REQUIRE(cfg.reports.size() == 20);
    // stored as (team leader %, department manager %)
    const std::map<std::string, std::pair<std::string, std::string>> table = {
        {"MIP criteria", {"100", "62.6"}},
        {"Yearly assessments", {"100", "50.8"}},
        {"Project assessments", {"91.1", "56.7"}},
        {"Learning activities", {"87.2", "47"}},
        {"Client feedback", {"86.5", "50.7"}},
        {"Internal feedback", {"89.4", "51.8"}},
        {"Compensation report", {"91.6", "52.7"}},
        {"MIP history", {"91.9", "56.7"}},
        {"Overtime", {"55.9", "30.1"}},
        {"Innovation and patents", {"70.9", "35.5"}},
        {"Product defects", {"36.3", "15.1"}},
        {"Sprints velocity", {"32.9", "17"}},
        {"Bugs fixed", {"38.6", "15.2"}},
        {"Pull requests", {"15.2", "12.9"}},
        {"Features shipped", {"30.3", "26.1"}},
        {"Defects repair time", {"17.1", "10.8"}},
        {"Lead time", {"27.3", "17.1"}},
        {"Project costs", {"51.1", "27.2"}},
        {"Code churn", {"31", "27.1"}},
        {"Absence", {"34.1", "18.2"}},
    };
    auto pct_text = [](double p) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%g", p * 100.0);
        return std::string(buf);
    };
    for (const auto& r : cfg.reports) {
        auto it = table.find(r.name);
        REQUIRE(it != table.end());
        CHECK(pct_text(r.p_view_team_leader) == it->second.first);
        CHECK(pct_text(r.p_view_dept_manager) == it->second.second);
    }
    CHECK(cfg.report("Pull requests").p_view_team_leader == 0.152);
    CHECK(cfg.report("MIP criteria").p_view_team_leader == 1.0);
    CHECK(cfg.report("Yearly assessments").p_view_team_leader == 1.0);
}

TEST_CASE("default config matches the cohort table") {
    SimulationConfig cfg = default_config();
    REQUIRE(cfg.cohorts.size() == 4);
    const auto& tls = cfg.cohort(Role::team_leader, Cohort::successful);
    CHECK(tls.mean_intersession_interval_wd == 1.5);
    CHECK(tls.mean_conversations_per_case == 2.0);
    CHECK(tls.p_fallback_per_utterance == 0.05);
    const auto& tlg = cfg.cohort(Role::team_leader, Cohort::struggling);
    CHECK(tlg.mean_intersession_interval_wd == 4.0);
    CHECK(tlg.mean_conversations_per_case == 5.5);
    CHECK(tlg.p_fallback_per_utterance == 0.3);
    const auto& dms = cfg.cohort(Role::department_manager, Cohort::successful);
    CHECK(dms.mean_intersession_interval_wd == 1.0);
    CHECK(dms.mean_conversations_per_case == 1.5);
    CHECK(dms.p_fallback_per_utterance == 0.05);
    const auto& dmg = cfg.cohort(Role::department_manager, Cohort::struggling);
    CHECK(dmg.mean_intersession_interval_wd == 2.0);
    CHECK(dmg.mean_conversations_per_case == 3.5);
    CHECK(dmg.p_fallback_per_utterance == 0.3);
}

TEST_CASE("disambiguation scenarios pair 8 distinct reports") {
    SimulationConfig cfg = default_config();
    REQUIRE(cfg.scenarios.size() == 4);
    std::set<std::string> reports;
    for (const auto& s : cfg.scenarios) {
        reports.insert(s.report_activities[0]);
        reports.insert(s.report_activities[1]);
        CHECK(activity_by_label(s.disambiguation_activity).kind ==
              ActivityKind::disambiguation);
    }
    CHECK(reports.size() == 8);
}

TEST_CASE("decision probabilities sum to one") {
    SimulationConfig cfg = default_config();
    CHECK(cfg.decision_probs.approve == 0.7);
    CHECK(cfg.decision_probs.approve_with_correction == 0.2);
    CHECK(cfg.decision_probs.reject == 0.1);
}

TEST_CASE("config JSON round trip is lossless") {
    SimulationConfig cfg = default_config();
    std::string text = cfg.to_json_string();
    SimulationConfig back = SimulationConfig::from_json_string(text);
    CHECK(back.to_json_string() == text);
    CHECK(back.n_dept_managers == cfg.n_dept_managers);
    CHECK(back.calendar.process_start == cfg.calendar.process_start);
    CHECK(back.report("Lead time").p_view_dept_manager == 0.171);
}

TEST_CASE("unknown config keys are rejected") {
    std::string text = default_config().to_json_string();
    std::string bad = text;
    bad.insert(bad.find('{') + 1, "\"bogus_key\": 1,");
    CHECK_THROWS(SimulationConfig::from_json_string(bad));
}

TEST_CASE("invalid configs fail validation") {
    SimulationConfig cfg = default_config();
    cfg.decision_probs.approve = 0.9;  // sum != 1
    CHECK_THROWS(cfg.validate());

    cfg = default_config();
    cfg.n_dept_managers = 0;
    CHECK_THROWS(cfg.validate());

    cfg = default_config();
    cfg.reports[3].p_view_team_leader = 1.5;
    CHECK_THROWS(cfg.validate());

    cfg = default_config();
    cfg.calendar.hard_deadline = cfg.calendar.process_start;
    CHECK_THROWS(cfg.validate());

    cfg = default_config();
    // struggling must dominate successful
    cfg.cohort(Role::team_leader, Cohort::successful);
    for (auto& c : cfg.cohorts) {
        if (c.role == Role::team_leader && c.cohort == Cohort::struggling) {
            c.p_fallback_per_utterance = 0.01;
        }
    }
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("role text forms") {
    CHECK(role_text(Role::team_leader) == "team leader");
    CHECK(role_text(Role::department_manager) == "department manager");
    CHECK(parse_role("team leader") == Role::team_leader);
    CHECK(parse_role("department_manager") == Role::department_manager);
    CHECK_THROWS(parse_role("boss"));
}
