#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mip/domain.hpp"

namespace mip {

// One conversation turn, one CSV row. Optional numerics are absent (not 0)
// when the cell is empty.
struct TurnRecord {
    int64_t case_id = 0;
    std::string session_id;
    Role role = Role::team_leader;
    std::string user_id;
    Timestamp timestamp = 0;
    int turn = 0;
    std::string activity;
    std::string user_utterance;
    std::string chatbot_response;
    std::string intent;
    std::optional<double> intent_confidence;
    std::string entity;
    std::optional<double> entity_confidence;
    std::optional<double> score;
    bool expecting_response = false;

    bool operator==(const TurnRecord&) const = default;
};

// The 15 Table-style column names, in order (two contain a space).
const std::vector<std::string>& log_columns();
std::string log_header_line();

class EventLog {
public:
    EventLog() = default;
    explicit EventLog(std::vector<TurnRecord> records);

    const std::vector<TurnRecord>& records() const { return records_; }
    size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const TurnRecord& operator[](size_t i) const { return records_[i]; }

    // Row indices per case (ascending), per session, per user.
    const std::map<int64_t, std::vector<size_t>>& by_case() const { return by_case_; }
    const std::map<std::string, std::vector<size_t>>& by_session() const {
        return by_session_;
    }
    const std::map<std::string, std::vector<size_t>>& by_user() const {
        return by_user_;
    }

    bool operator==(const EventLog& other) const { return records_ == other.records_; }

private:
    std::vector<TurnRecord> records_;
    std::map<int64_t, std::vector<size_t>> by_case_;
    std::map<std::string, std::vector<size_t>> by_session_;
    std::map<std::string, std::vector<size_t>> by_user_;
};

void write_csv(const EventLog& log, std::ostream& out);
void write_csv(const EventLog& log, const std::string& path);
EventLog read_csv(std::istream& in, const std::string& name = "<stream>");
EventLog read_csv_file(const std::string& path);

struct Violation {
    std::string rule;
    int64_t case_id = 0;
    std::string session_id;
    int turn = 0;
    std::string detail;
};

// Machine checks for the ordering and schema invariants a well-formed log
// obeys. Empty result == valid. Welcome rows are treated leniently (empty
// utterance/intent allowed, either a 0- or 1-based first turn).
std::vector<Violation> validate(const EventLog& log);

// Shortest decimal text that round-trips; always carries '.' or exponent.
std::string format_double(double v);

}  // namespace mip
