#include "vulnrank/date.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace vulnrank {

namespace {

bool parse_uint(std::string_view s, unsigned& out)
{
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (c < '0' || c > '9') {
            return false;
        }
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<Date> Date::parse(std::string_view text)
{
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') {
        return std::nullopt;
    }
    unsigned y = 0, m = 0, d = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
        !parse_uint(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(y)}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return Date{static_cast<int>(y), m, d};
}

Date Date::from_days(std::int64_t days_since_epoch)
{
    const std::chrono::sys_days sd{std::chrono::days{days_since_epoch}};
    const std::chrono::year_month_day ymd{sd};
    return Date{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day())};
}

std::int64_t Date::days_since_epoch() const
{
    const std::chrono::year_month_day ymd{std::chrono::year{year_}, std::chrono::month{month_},
                                          std::chrono::day{day_}};
    return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

unsigned Date::iso_weekday() const
{
    const std::chrono::weekday wd{std::chrono::sys_days{std::chrono::days{days_since_epoch()}}};
    return wd.iso_encoding();
}

std::string Date::to_string() const
{
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year_, month_, day_);
    return buf;
}

IsoWeek iso_week(const Date& date)
{
    // The ISO week belongs to the year containing its Thursday.
    const auto days = date.days_since_epoch();
    const Date thursday = Date::from_days(days + 4 - static_cast<std::int64_t>(date.iso_weekday()));
    const auto jan1 = Date{thursday.year(), 1, 1}.days_since_epoch();
    const auto ordinal = thursday.days_since_epoch() - jan1;
    return IsoWeek{thursday.year(), static_cast<unsigned>(ordinal / 7 + 1)};
}

std::string IsoWeek::to_string() const
{
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-W%02u", year, week);
    return buf;
}

std::optional<IsoWeek> IsoWeek::parse(std::string_view text)
{
    if (text.size() != 8 || text[4] != '-' || text[5] != 'W') {
        return std::nullopt;
    }
    unsigned y = 0, w = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(6, 2), w) || w < 1 || w > 53) {
        return std::nullopt;
    }
    IsoWeek candidate{static_cast<int>(y), w};
    if (iso_week(candidate.monday()) != candidate) {
        return std::nullopt;
    }
    return candidate;
}

Date IsoWeek::monday() const
{
    // January 4th is always in week 1.
    const Date jan4{year, 1, 4};
    const auto week1_monday = jan4.days_since_epoch() - (static_cast<std::int64_t>(jan4.iso_weekday()) - 1);
    return Date::from_days(week1_monday + 7 * (static_cast<std::int64_t>(week) - 1));
}

}  // namespace vulnrank
