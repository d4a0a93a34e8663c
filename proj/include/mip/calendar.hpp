#pragma once

#include <cstdint>
#include <string>

namespace mip {

// Naive local time, seconds since the Unix epoch, no timezone.
using Timestamp = int64_t;

struct CivilDateTime {
    int year;
    int month;   // 1..12
    int day;     // 1..31
    int hour;    // 0..23
    int minute;  // 0..59
    int second;  // 0..59
};

Timestamp to_timestamp(const CivilDateTime& c);
CivilDateTime to_civil(Timestamp t);

// "2022-03-17T11:20:21"
Timestamp parse_timestamp(const std::string& text);
std::string format_timestamp(Timestamp t);

// 0 = Monday .. 6 = Sunday
int weekday(Timestamp t);
bool is_workday(Timestamp t);

// Monday-to-Friday business week, one working day = the 08:00-17:00 window
// (9 hours). Evening and weekend time contributes zero working time.
class BusinessCalendar {
public:
    Timestamp process_start = 0;
    Timestamp regular_deadline = 0;
    Timestamp hard_deadline = 0;
    int workday_start_hour = 8;
    int workday_end_hour = 17;
    int evening_limit_hour = 23;  // sessions may run late but never past 23:59

    double working_day_seconds() const {
        return (workday_end_hour - workday_start_hour) * 3600.0;
    }

    // Fractional working days covered by [t0, t1]. Throws if t0 > t1.
    // Additive over splits and monotone in t1.
    double working_days_between(double t0, double t1) const;

    // Inverse: the instant d working days after t. d = 0 returns t unchanged;
    // a result landing exactly on a window close is reported as the next
    // window open (Mon 17:00 == Tue 08:00 in working time).
    double add_working_time(double t, double working_days) const;

    // First instant >= t that lies inside a working window.
    double next_window_start(double t) const;

    bool in_working_window(double t) const;

    void validate() const;  // start < regular < hard, sane hours
};

}  // namespace mip
