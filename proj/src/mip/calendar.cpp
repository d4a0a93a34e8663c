#include "mip/calendar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mip {

namespace {

// Howard Hinnant's civil-date algorithms.
int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    int64_t era = (y >= 0 ? y : y - 399) / 400;
    unsigned yoe = static_cast<unsigned>(y - era * 400);
    unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& y, int& m, int& d) {
    z += 719468;
    int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    unsigned doe = static_cast<unsigned>(z - era * 146097);
    unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    int64_t yy = static_cast<int64_t>(yoe) + era * 400;
    unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

}  // namespace

Timestamp to_timestamp(const CivilDateTime& c) {
    return days_from_civil(c.year, c.month, c.day) * 86400 + c.hour * 3600 +
           c.minute * 60 + c.second;
}

CivilDateTime to_civil(Timestamp t) {
    int64_t day = floor_div(t, 86400);
    int64_t sod = t - day * 86400;
    CivilDateTime c{};
    civil_from_days(day, c.year, c.month, c.day);
    c.hour = static_cast<int>(sod / 3600);
    c.minute = static_cast<int>((sod % 3600) / 60);
    c.second = static_cast<int>(sod % 60);
    return c;
}

Timestamp parse_timestamp(const std::string& text) {
    CivilDateTime c{};
    char sep = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &c.year, &c.month,
                    &c.day, &sep, &c.hour, &c.minute, &c.second) != 7 ||
        (sep != 'T' && sep != ' ')) {
        throw std::invalid_argument("bad timestamp: '" + text + "'");
    }
    if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31 || c.hour > 23 ||
        c.hour < 0 || c.minute < 0 || c.minute > 59 || c.second < 0 ||
        c.second > 59) {
        throw std::invalid_argument("bad timestamp: '" + text + "'");
    }
    return to_timestamp(c);
}

std::string format_timestamp(Timestamp t) {
    CivilDateTime c = to_civil(t);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", c.year,
                  c.month, c.day, c.hour, c.minute, c.second);
    return buf;
}

int weekday(Timestamp t) {
    int64_t day = floor_div(t, 86400);
    return static_cast<int>(((day % 7) + 7 + 3) % 7);  // 1970-01-01 is a Thursday
}

bool is_workday(Timestamp t) { return weekday(t) <= 4; }

bool BusinessCalendar::in_working_window(double t) const {
    Timestamp day = static_cast<Timestamp>(std::floor(t / 86400.0)) * 86400;
    if (!is_workday(day)) return false;
    double sod = t - static_cast<double>(day);
    return sod >= workday_start_hour * 3600.0 && sod < workday_end_hour * 3600.0;
}

double BusinessCalendar::next_window_start(double t) const {
    double day = std::floor(t / 86400.0) * 86400.0;
    double open = day + workday_start_hour * 3600.0;
    double close = day + workday_end_hour * 3600.0;
    Timestamp day_ts = static_cast<Timestamp>(day);
    if (is_workday(day_ts)) {
        if (t < open) return open;
        if (t < close) return t;
    }
    // advance day by day; gaps are at most a weekend
    double next = day + 86400.0;
    while (!is_workday(static_cast<Timestamp>(next))) next += 86400.0;
    return next + workday_start_hour * 3600.0;
}

double BusinessCalendar::working_days_between(double t0, double t1) const {
    if (t0 > t1) throw std::invalid_argument("working_days_between: t0 > t1");
    double total = 0.0;
    double day = std::floor(t0 / 86400.0) * 86400.0;
    double last_day = std::floor(t1 / 86400.0) * 86400.0;
    for (; day <= last_day; day += 86400.0) {
        if (!is_workday(static_cast<Timestamp>(day))) continue;
        double open = day + workday_start_hour * 3600.0;
        double close = day + workday_end_hour * 3600.0;
        double lo = std::max(t0, open);
        double hi = std::min(t1, close);
        if (hi > lo) total += hi - lo;
    }
    return total / working_day_seconds();
}

double BusinessCalendar::add_working_time(double t, double working_days) const {
    if (working_days < 0) {
        throw std::invalid_argument("add_working_time: negative duration");
    }
    if (working_days == 0.0) return t;
    double remaining = working_days * working_day_seconds();
    double cur = t;
    while (true) {
        cur = next_window_start(cur);
        double day = std::floor(cur / 86400.0) * 86400.0;
        double close = day + workday_end_hour * 3600.0;
        double avail = close - cur;
        if (remaining < avail) return cur + remaining;
        remaining -= avail;
        cur = close;
        if (remaining <= 0.0) return next_window_start(cur);
    }
}

void BusinessCalendar::validate() const {
    if (!(process_start < regular_deadline && regular_deadline < hard_deadline)) {
        throw std::invalid_argument(
            "calendar: require process_start < regular_deadline < hard_deadline");
    }
    if (workday_start_hour < 0 || workday_end_hour <= workday_start_hour ||
        workday_end_hour > 24) {
        throw std::invalid_argument("calendar: bad working-hour window");
    }
}

}  // namespace mip
