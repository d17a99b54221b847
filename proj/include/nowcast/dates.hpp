#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

#include "nowcast/errors.hpp"

namespace nowcast {

// Calendar date, ISO-8601 in and out.
class Date {
  public:
    Date() = default;
    Date(int year, unsigned month, unsigned day)
        : ymd_{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}} {
        if (!ymd_.ok()) {
            throw ValidationError("invalid calendar date: " + to_string());
        }
    }

    static Date parse(std::string_view text) {
        int y = 0;
        unsigned m = 0, d = 0;
        char sep1 = 0, sep2 = 0, tail = 0;
        std::string buf(text);
        int got = std::sscanf(buf.c_str(), "%d%c%u%c%u%c", &y, &sep1, &m, &sep2, &d, &tail);
        if (got != 5 || sep1 != '-' || sep2 != '-') {
            throw ParseError("expected ISO date (YYYY-MM-DD), got '" + buf + "'");
        }
        std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
        if (!ymd.ok()) {
            throw ValidationError("invalid calendar date: '" + buf + "'");
        }
        Date out;
        out.ymd_ = ymd;
        return out;
    }

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd_.year()),
                      unsigned(ymd_.month()), unsigned(ymd_.day()));
        return buf;
    }

    // Signed day count, *this - other.
    long days_since(const Date& other) const {
        return (std::chrono::sys_days{ymd_} - std::chrono::sys_days{other.ymd_}).count();
    }

    friend auto operator<=>(const Date& a, const Date& b) {
        return std::chrono::sys_days{a.ymd_} <=> std::chrono::sys_days{b.ymd_};
    }
    friend bool operator==(const Date& a, const Date& b) { return a.ymd_ == b.ymd_; }

  private:
    std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1},
                                     std::chrono::day{1}};
};

}  // namespace nowcast
