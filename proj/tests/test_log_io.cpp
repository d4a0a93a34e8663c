#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "mip/log_io.hpp"
#include "mip/simulator.hpp"

using namespace mip;

namespace {

// a small, fully valid two-phase case
std::vector<TurnRecord> tiny_case(int64_t case_id, Timestamp base) {
    std::vector<TurnRecord> rows;
    auto add = [&](const std::string& session, int turn, Role role,
                   const std::string& activity, const std::string& intent,
                   Timestamp ts) {
        TurnRecord r;
        r.case_id = case_id;
        r.session_id = session;
        r.role = role;
        r.user_id = role == Role::team_leader ? "Alice Smith" : "Bob Jones";
        r.timestamp = ts;
        r.turn = turn;
        r.activity = activity;
        r.intent = intent;
        if (!intent.empty()) {
            r.intent_confidence = 0.9;
            r.score = 0.85;
        }
        r.user_utterance = activity == kWelcomeActivity ? "" : "do " + activity;
        r.chatbot_response = "Stub";
        return rows.push_back(r);
    };
    add("AAAABBBB0001", 0, Role::team_leader, kWelcomeActivity, "", base);
    add("AAAABBBB0001", 1, Role::team_leader, "report_mip_criteria",
        "report_mip_criteria", base + 30);
    add("AAAABBBB0001", 2, Role::team_leader, "report_yearly_assessments",
        "report_yearly_assessments", base + 60);
    add("AAAABBBB0001", 3, Role::team_leader, "add_nomination", "add_nomination",
        base + 90);
    rows.back().expecting_response = true;
    add("AAAABBBB0001", 4, Role::team_leader, "provide_candidate_name", "", base + 120);
    rows.back().entity = "Troy Donovan";
    rows.back().entity_confidence = 1.0;
    add("AAAABBBB0001", 5, Role::team_leader, "submit_nomination", "submit_nomination",
        base + 150);
    add("AAAABBBB0002", 0, Role::department_manager, kWelcomeActivity, "", base + 7200);
    add("AAAABBBB0002", 1, Role::department_manager, "review_nominated_candidate",
        "review_nominated_candidate", base + 7230);
    add("AAAABBBB0002", 2, Role::department_manager, "select_candidate_name", "",
        base + 7260);
    rows.back().entity = "Troy Donovan";
    rows.back().entity_confidence = 1.0;
    add("AAAABBBB0002", 3, Role::department_manager, "approve_nomination",
        "approve_nomination", base + 7290);
    add("AAAABBBB0002", 4, Role::department_manager, "submit_final_nominations",
        "submit_final_nominations", base + 7320);
    return rows;
}

EventLog tiny_log() {
    return EventLog(tiny_case(1, parse_timestamp("2022-03-07T09:00:00")));
}

}  // namespace

TEST_CASE("header matches the published column names byte for byte") {
    CHECK(log_header_line() ==
          "case_id,session_id,role,user_id,timestamp,turn,activity,user utterance,"
          "chatbot response,intent,intent_confidence,entity,entity_confidence,score,"
          "expecting_response");
}

TEST_CASE("the documented example row parses into the typed values") {
    std::string csv =
        log_header_line() + "\n" +
        "1,M7vkTk2f537I,team leader,Robert North,2022-03-17T11:20:21,2,"
        "report_lead_time,view lead time table,Lead Time Report,report_lead_time,"
        "0.898,Troy Donovan,1.0,0.862,False\n";
    std::istringstream in(csv);
    EventLog log = read_csv(in);
    REQUIRE(log.size() == 1);
    const TurnRecord& r = log[0];
    CHECK(r.case_id == 1);
    CHECK(r.session_id == "M7vkTk2f537I");
    CHECK(r.role == Role::team_leader);
    CHECK(r.user_id == "Robert North");
    CHECK(format_timestamp(r.timestamp) == "2022-03-17T11:20:21");
    CHECK(r.turn == 2);
    CHECK(r.activity == "report_lead_time");
    CHECK(r.user_utterance == "view lead time table");
    CHECK(r.chatbot_response == "Lead Time Report");
    CHECK(r.intent == "report_lead_time");
    CHECK(r.intent_confidence == 0.898);
    CHECK(r.entity == "Troy Donovan");
    CHECK(r.entity_confidence == 1.0);
    CHECK(r.score == 0.862);
    CHECK(r.expecting_response == false);
}

TEST_CASE("write then read gives a structurally equal log") {
    EventLog log = tiny_log();
    std::ostringstream out;
    write_csv(log, out);
    std::istringstream in(out.str());
    EventLog back = read_csv(in);
    CHECK(back == log);
}

TEST_CASE("booleans serialize capitalized and floats keep a decimal point") {
    EventLog log = tiny_log();
    std::ostringstream out;
    write_csv(log, out);
    std::string text = out.str();
    CHECK(text.find(",True\n") != std::string::npos);
    CHECK(text.find(",False\n") != std::string::npos);
    CHECK(text.find("1.0,") != std::string::npos);   // entity confidence
    CHECK(text.find("true") == std::string::npos);
}

TEST_CASE("quoted fields with commas survive the round trip") {
    auto rows = tiny_case(1, parse_timestamp("2022-03-07T09:00:00"));
    rows[1].user_utterance = "show criteria, please";
    rows[1].chatbot_response = "A \"quoted\" stub";
    EventLog log{std::move(rows)};
    std::ostringstream out;
    write_csv(log, out);
    std::istringstream in(out.str());
    EventLog back = read_csv(in);
    CHECK(back == log);
    CHECK(back[1].user_utterance == "show criteria, please");
    CHECK(back[1].chatbot_response == "A \"quoted\" stub");
}

TEST_CASE("schema errors name the problem column") {
    std::string no_expect =
        "case_id,session_id,role,user_id,timestamp,turn,activity,user utterance,"
        "chatbot response,intent,intent_confidence,entity,entity_confidence,score\n";
    std::istringstream in(no_expect);
    CHECK_THROWS_WITH_AS(read_csv(in), doctest::Contains("expecting_response"),
                         std::runtime_error);

    std::string renamed =
        "case_id,session_id,role,user_id,timestamp,turn,activity,user_utterance,"
        "chatbot response,intent,intent_confidence,entity,entity_confidence,score,"
        "expecting_response\n";
    std::istringstream in2(renamed);
    CHECK_THROWS_WITH_AS(read_csv(in2), doctest::Contains("user utterance"),
                         std::runtime_error);
}

TEST_CASE("cell errors name row and column") {
    std::string base = log_header_line() + "\n";
    std::string bad_ts =
        base +
        "1,S,team leader,A,not-a-time,0,welcome,,Welcome Message,,,,,,False\n";
    std::istringstream in(bad_ts);
    CHECK_THROWS_WITH_AS(read_csv(in), doctest::Contains("timestamp"),
                         std::runtime_error);

    std::string bad_conf =
        base +
        "1,S,team leader,A,2022-03-07T09:00:00,0,welcome,,W,,abc,,,,False\n";
    std::istringstream in2(bad_conf);
    CHECK_THROWS_WITH_AS(read_csv(in2), doctest::Contains("intent_confidence"),
                         std::runtime_error);

    std::string dup =
        base +
        "1,S,team leader,A,2022-03-07T09:00:00,0,welcome,,W,,,,,,False\n"
        "1,S,team leader,A,2022-03-07T09:01:00,0,welcome,,W,,,,,,False\n";
    std::istringstream in3(dup);
    CHECK_THROWS_WITH_AS(read_csv(in3), doctest::Contains("duplicate"),
                         std::runtime_error);
}

TEST_CASE("validate passes a clean constructed log") {
    CHECK(validate(tiny_log()).empty());
}

TEST_CASE("an approval turn before submit_nomination is one phase-order violation") {
    auto rows = tiny_case(1, parse_timestamp("2022-03-07T09:00:00"));
    // move the department manager block before the team leader finishes
    for (auto& r : rows) {
        if (r.session_id == "AAAABBBB0002") r.timestamp -= 7200;
    }
    std::sort(rows.begin(), rows.end(), [](const TurnRecord& a, const TurnRecord& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.turn < b.turn;
    });
    auto violations = validate(EventLog{std::move(rows)});
    int phase = 0;
    for (const auto& v : violations) phase += v.rule == "phase-order";
    CHECK(phase == 5);  // every approval-phase row sits before submit_nomination
}

TEST_CASE("a single early approval row yields exactly one phase-order violation") {
    auto rows = tiny_case(1, parse_timestamp("2022-03-07T09:00:00"));
    rows[8].timestamp = rows[2].timestamp;  // select_candidate_name jumps early
    auto bad = rows[8];
    std::vector<TurnRecord> out;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (i == 8) continue;
        out.push_back(rows[i]);
    }
    out.insert(out.begin() + 3, bad);
    // keep session turns consecutive by renumbering the moved session
    int t = 0;
    for (auto& r : out) {
        if (r.session_id == "AAAABBBB0002") r.turn = t++;
    }
    std::vector<Violation> violations = validate(EventLog{std::move(out)});
    int phase = 0;
    for (const auto& v : violations) phase += v.rule == "phase-order";
    CHECK(phase == 1);
}

TEST_CASE("turn sequence 0,1,3 is one turn-gap violation") {
    auto rows = tiny_case(1, parse_timestamp("2022-03-07T09:00:00"));
    std::vector<TurnRecord> out;
    for (const auto& r : rows) {
        if (r.session_id == "AAAABBBB0001" && r.turn == 2) continue;  // drop turn 2
        out.push_back(r);
    }
    auto violations = validate(EventLog{std::move(out)});
    int gaps = 0;
    for (const auto& v : violations) gaps += v.rule == "turn-gap";
    CHECK(gaps == 1);
}

TEST_CASE("session ids must not span cases") {
    auto rows = tiny_case(1, parse_timestamp("2022-03-07T09:00:00"));
    auto more = tiny_case(2, parse_timestamp("2022-03-08T09:00:00"));
    for (auto& r : more) {
        if (r.session_id == "AAAABBBB0001") r.session_id = "AAAABBBB0001";  // collide
        else r.session_id = "AAAABBBB0003";
    }
    rows.insert(rows.end(), more.begin(), more.end());
    bool found = false;
    for (const auto& v : validate(EventLog{std::move(rows)})) {
        found |= v.rule == "session-span";
    }
    CHECK(found);
}

TEST_CASE("real simulated output round-trips losslessly") {
    SimulationConfig cfg = default_config();
    EventLog log = simulate(cfg, 99, 8);
    std::ostringstream out;
    write_csv(log, out);
    std::istringstream in(out.str());
    EventLog back = read_csv(in);
    CHECK(back == log);
}
