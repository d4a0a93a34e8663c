#include "mip/log_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mip {

namespace {

const std::vector<std::string> kColumns = {
    "case_id",        "session_id", "role",
    "user_id",        "timestamp",  "turn",
    "activity",       "user utterance", "chatbot response",
    "intent",         "intent_confidence", "entity",
    "entity_confidence", "score",   "expecting_response"};

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

// Splits one CSV record; supports quoted fields with doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

[[noreturn]] void fail(const std::string& name, size_t row, const std::string& column,
                       const std::string& what) {
    throw std::runtime_error(name + ": row " + std::to_string(row) + ", column '" +
                             column + "': " + what);
}

double parse_double_cell(const std::string& name, size_t row,
                         const std::string& column, const std::string& cell) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        fail(name, row, column, "cannot parse number '" + cell + "'");
    }
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, ptr);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

const std::vector<std::string>& log_columns() { return kColumns; }

std::string log_header_line() {
    std::string h;
    for (size_t i = 0; i < kColumns.size(); ++i) {
        if (i) h += ',';
        h += kColumns[i];
    }
    return h;
}

EventLog::EventLog(std::vector<TurnRecord> records) : records_(std::move(records)) {
    for (size_t i = 0; i < records_.size(); ++i) {
        const TurnRecord& r = records_[i];
        by_case_[r.case_id].push_back(i);
        by_session_[r.session_id].push_back(i);
        by_user_[r.user_id].push_back(i);
    }
}

void write_csv(const EventLog& log, std::ostream& out) {
    out << log_header_line() << '\n';
    for (const TurnRecord& r : log.records()) {
        out << r.case_id << ',' << csv_escape(r.session_id) << ','
            << csv_escape(role_text(r.role)) << ',' << csv_escape(r.user_id) << ','
            << format_timestamp(r.timestamp) << ',' << r.turn << ','
            << csv_escape(r.activity) << ',' << csv_escape(r.user_utterance) << ','
            << csv_escape(r.chatbot_response) << ',' << csv_escape(r.intent) << ',';
        if (r.intent_confidence) out << format_double(*r.intent_confidence);
        out << ',' << csv_escape(r.entity) << ',';
        if (r.entity_confidence) out << format_double(*r.entity_confidence);
        out << ',';
        if (r.score) out << format_double(*r.score);
        out << ',' << (r.expecting_response ? "True" : "False") << '\n';
    }
}

void write_csv(const EventLog& log, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_csv(log, f);
    f.flush();
    if (!f) throw std::runtime_error("write failed: " + path);
}

EventLog read_csv(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(name + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_csv_line(line);
    if (header != kColumns) {
        // name the first discrepancy
        for (size_t i = 0; i < kColumns.size(); ++i) {
            if (i >= header.size()) {
                throw std::runtime_error(name + ": missing column '" + kColumns[i] + "'");
            }
            if (header[i] != kColumns[i]) {
                throw std::runtime_error(name + ": expected column '" + kColumns[i] +
                                         "' at position " + std::to_string(i + 1) +
                                         ", found '" + header[i] + "'");
            }
        }
        throw std::runtime_error(name + ": unexpected extra columns in header");
    }

    std::vector<TurnRecord> records;
    std::set<std::pair<std::string, int>> seen_turns;
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f = split_csv_line(line);
        if (f.size() != kColumns.size()) {
            throw std::runtime_error(name + ": row " + std::to_string(row) + ": expected " +
                                     std::to_string(kColumns.size()) + " fields, found " +
                                     std::to_string(f.size()));
        }
        TurnRecord r;
        try {
            r.case_id = std::stoll(f[0]);
        } catch (const std::exception&) {
            fail(name, row, "case_id", "cannot parse integer '" + f[0] + "'");
        }
        r.session_id = f[1];
        try {
            r.role = parse_role(f[2]);
        } catch (const std::exception&) {
            fail(name, row, "role", "unknown role '" + f[2] + "'");
        }
        r.user_id = f[3];
        try {
            r.timestamp = parse_timestamp(f[4]);
        } catch (const std::exception&) {
            fail(name, row, "timestamp", "cannot parse timestamp '" + f[4] + "'");
        }
        try {
            r.turn = std::stoi(f[5]);
        } catch (const std::exception&) {
            fail(name, row, "turn", "cannot parse integer '" + f[5] + "'");
        }
        r.activity = f[6];
        r.user_utterance = f[7];
        r.chatbot_response = f[8];
        r.intent = f[9];
        if (!f[10].empty()) {
            r.intent_confidence = parse_double_cell(name, row, "intent_confidence", f[10]);
        }
        r.entity = f[11];
        if (!f[12].empty()) {
            r.entity_confidence = parse_double_cell(name, row, "entity_confidence", f[12]);
        }
        if (!f[13].empty()) r.score = parse_double_cell(name, row, "score", f[13]);
        if (f[14] == "True" || f[14] == "true") {
            r.expecting_response = true;
        } else if (f[14] == "False" || f[14] == "false") {
            r.expecting_response = false;
        } else {
            fail(name, row, "expecting_response", "expected True/False, found '" + f[14] + "'");
        }
        if (!seen_turns.insert({r.session_id, r.turn}).second) {
            fail(name, row, "turn",
                 "duplicate turn " + std::to_string(r.turn) + " in session " + r.session_id);
        }
        records.push_back(std::move(r));
    }
    return EventLog(std::move(records));
}

EventLog read_csv_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return read_csv(f, path);
}

namespace {

bool is_slot_filling(const std::string& label) {
    return label == "provide_candidate_name" || label == "select_candidate_name";
}

bool range_ok(const std::optional<double>& v) {
    return !v || (*v >= 0.0 && *v <= 1.0 && std::isfinite(*v));
}

}  // namespace

std::vector<Violation> validate(const EventLog& log) {
    std::vector<Violation> out;
    auto flag = [&out](const std::string& rule, const TurnRecord& r,
                       const std::string& detail) {
        out.push_back({rule, r.case_id, r.session_id, r.turn, detail});
    };

    // session_id must not span case_ids; turns consecutive from 0 or 1.
    for (const auto& [sid, rows] : log.by_session()) {
        int64_t case_id = log[rows[0]].case_id;
        int first_turn = log[rows[0]].turn;
        if (first_turn != 0 && first_turn != 1) {
            flag("turn-gap", log[rows[0]], "first turn must be 0 or 1");
        }
        int64_t first_day = log[rows[0]].timestamp / 86400;
        int expected = first_turn;
        for (size_t idx : rows) {
            const TurnRecord& r = log[idx];
            if (r.case_id != case_id) {
                flag("session-span", r, "session also used by case " + std::to_string(case_id));
            }
            if (r.turn != expected) {
                flag("turn-gap", r, "expected turn " + std::to_string(expected));
                expected = r.turn;
            }
            ++expected;
            if (r.timestamp / 86400 != first_day) {
                flag("overnight", r, "session crosses midnight");
            }
        }
        const TurnRecord& head = log[rows[0]];
        int wd = weekday(head.timestamp);
        int64_t sod = head.timestamp % 86400;
        if (wd > 4 || sod < 8 * 3600 || sod >= 17 * 3600) {
            flag("window", head, "session must start 08:00-17:00 Mon-Fri");
        }
    }

    for (const auto& [case_id, rows] : log.by_case()) {
        (void)case_id;
        // timestamps non-decreasing in log order
        for (size_t i = 1; i < rows.size(); ++i) {
            if (log[rows[i]].timestamp < log[rows[i - 1]].timestamp) {
                flag("time-order", log[rows[i]], "timestamp decreases within case");
            }
        }
        // nomination phase completes before any approval-phase turn
        std::optional<Timestamp> submit_ts;
        bool has_final = false;
        for (size_t idx : rows) {
            if (log[idx].activity == "submit_nomination" && !submit_ts) {
                submit_ts = log[idx].timestamp;
            }
            if (log[idx].activity == "submit_final_nominations") has_final = true;
        }
        if (!submit_ts) {
            flag("missing-submit-nomination", log[rows[0]], "case has no submit_nomination");
        }
        if (!has_final) {
            flag("missing-final-submission", log[rows[0]],
                 "case has no submit_final_nominations");
        }
        for (size_t idx : rows) {
            const TurnRecord& r = log[idx];
            if (submit_ts && r.role == Role::department_manager &&
                r.timestamp < *submit_ts) {
                flag("phase-order", r, "approval turn before submit_nomination");
            }
        }
    }

    for (const TurnRecord& r : log.records()) {
        bool welcome = r.activity == kWelcomeActivity;
        if (!welcome && !is_known_activity(r.activity)) {
            flag("activity-unknown", r, "'" + r.activity + "' not in catalog");
            continue;
        }
        if (!range_ok(r.intent_confidence) || !range_ok(r.entity_confidence) ||
            !range_ok(r.score)) {
            flag("confidence-range", r, "numeric cell outside [0,1]");
        }
        if (welcome) continue;
        const Activity& a = activity_by_label(r.activity);
        if ((a.kind == ActivityKind::report_view ||
             (a.kind == ActivityKind::task && !is_slot_filling(a.label))) &&
            r.intent != r.activity) {
            flag("intent-mismatch", r, "intent '" + r.intent + "' != activity");
        }
        auto owner = task_owner(r.activity);
        if (owner && *owner != r.role) {
            flag("role-activity", r, "activity owned by the other role");
        }
        if (a.kind == ActivityKind::end_of_session) {
            flag("activity-unknown", r, "virtual 'end' must not appear as a row");
        }
    }
    return out;
}

}  // namespace mip
