#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace vulnrank {

// UTC calendar date. Time-of-day is discarded on parse.
class Date {
public:
    constexpr Date() = default;
    constexpr Date(int year, unsigned month, unsigned day) : year_{year}, month_{month}, day_{day} {}

    // Accepts `YYYY-MM-DD`, optionally followed by `T...` or a space and a time.
    static std::optional<Date> parse(std::string_view text);

    static Date from_days(std::int64_t days_since_epoch);
    std::int64_t days_since_epoch() const;

    int year() const { return year_; }
    unsigned month() const { return month_; }
    unsigned day() const { return day_; }

    // ISO-8601 weekday, Monday = 1 .. Sunday = 7.
    unsigned iso_weekday() const;
    Date plus_days(std::int64_t n) const { return from_days(days_since_epoch() + n); }

    std::string to_string() const;

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

private:
    int year_{1970};
    unsigned month_{1};
    unsigned day_{1};
};

struct IsoWeek {
    int year{0};
    unsigned week{0};

    // Formatted as `2021-W47`.
    std::string to_string() const;
    static std::optional<IsoWeek> parse(std::string_view text);
    Date monday() const;

    friend constexpr auto operator<=>(const IsoWeek&, const IsoWeek&) = default;
};

IsoWeek iso_week(const Date& date);

struct DateRange {
    Date from;
    Date to;

    bool contains(const Date& d) const { return from <= d && d <= to; }
};

}  // namespace vulnrank
