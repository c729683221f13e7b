#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "vulnrank/csv.hpp"
#include "vulnrank/date.hpp"

using vulnrank::Date;
using vulnrank::IsoWeek;

TEST_CASE("date parsing accepts timestamps and rejects impossible days")
{
    CHECK(Date::parse("2021-11-23") == Date(2021, 11, 23));
    CHECK(Date::parse("2021-11-23T10:15:00.000") == Date(2021, 11, 23));
    CHECK(Date::parse("2021-11-23 10:15") == Date(2021, 11, 23));
    CHECK_FALSE(Date::parse("2021-02-29").has_value());
    CHECK(Date::parse("2020-02-29") == Date(2020, 2, 29));
    CHECK_FALSE(Date::parse("2021-13-01").has_value());
    CHECK_FALSE(Date::parse("21-11-23").has_value());
    CHECK_FALSE(Date::parse("").has_value());
    CHECK(Date(2021, 11, 3).to_string() == "2021-11-03");
}

TEST_CASE("iso weeks around year boundaries")
{
    CHECK(iso_week(Date(2021, 11, 23)).to_string() == "2021-W47");
    CHECK(iso_week(Date(2021, 1, 3)).to_string() == "2020-W53");
    CHECK(iso_week(Date(2021, 1, 4)).to_string() == "2021-W01");
    CHECK(iso_week(Date(2024, 12, 30)).to_string() == "2025-W01");
    CHECK(iso_week(Date(2019, 12, 30)).to_string() == "2020-W01");
    CHECK(Date(2021, 11, 22).iso_weekday() == 1);
    CHECK(Date(2021, 11, 28).iso_weekday() == 7);
    CHECK(IsoWeek::parse("2021-W47")->monday() == Date(2021, 11, 22));
    CHECK_FALSE(IsoWeek::parse("2021-W54").has_value());
}

TEST_CASE("day counts round-trip and every monday opens its week")
{
    testing::Gen gen(7);
    for (int i = 0; i < 2000; ++i) {
        const auto days = gen.integer(-20000, 40000);
        const auto d = Date::from_days(days);
        REQUIRE(d.days_since_epoch() == days);
        REQUIRE(Date::parse(d.to_string()) == d);
        const auto w = iso_week(d);
        const auto monday = w.monday();
        REQUIRE(monday <= d);
        REQUIRE(d.days_since_epoch() - monday.days_since_epoch() == d.iso_weekday() - 1);
        REQUIRE(IsoWeek::parse(w.to_string()) == w);
    }
}

TEST_CASE("csv reader handles quotes, embedded newlines and CRLF")
{
    std::istringstream in("a,b\r\n\"x, y\",\"he said \"\"hi\"\"\"\n\"multi\nline\",z\n");
    vulnrank::csv::Reader reader(in);
    std::vector<std::string> fields;
    std::size_t line = 0;
    REQUIRE(reader.next(fields, line));
    CHECK(fields == std::vector<std::string>{"a", "b"});
    CHECK(line == 1);
    REQUIRE(reader.next(fields, line));
    CHECK(fields == std::vector<std::string>{"x, y", "he said \"hi\""});
    REQUIRE(reader.next(fields, line));
    CHECK(fields == std::vector<std::string>{"multi\nline", "z"});
    CHECK(line == 3);
    CHECK_FALSE(reader.next(fields, line));
}

TEST_CASE("csv unterminated quote is flagged")
{
    std::istringstream in("\"open,1\n");
    vulnrank::csv::Reader reader(in);
    std::vector<std::string> fields;
    std::size_t line = 0;
    reader.next(fields, line);
    CHECK(reader.last_record_malformed());
}

TEST_CASE("csv join escapes and the reader reads it back")
{
    testing::Gen gen(11);
    const std::vector<std::string> alphabet{"a", ",", "\"", "\n", " ", "z", "9"};
    for (int i = 0; i < 500; ++i) {
        std::vector<std::string> row(static_cast<std::size_t>(gen.integer(1, 5)));
        for (auto& f : row) {
            for (int c = gen.integer(0, 6); c > 0; --c) {
                f += gen.pick(alphabet);
            }
        }
        std::istringstream in(vulnrank::csv::join(row) + "\n");
        vulnrank::csv::Reader reader(in);
        std::vector<std::string> back;
        std::size_t line = 0;
        REQUIRE(reader.next(back, line));
        REQUIRE(back == row);
    }
}

TEST_CASE("format_number is shortest round-trip")
{
    CHECK(vulnrank::csv::format_number(0.876) == "0.876");
    CHECK(vulnrank::csv::format_number(30.0) == "30");
    CHECK(vulnrank::csv::format_number(1509.25) == "1509.25");
    testing::Gen gen(3);
    for (int i = 0; i < 1000; ++i) {
        const double x = gen.real(-1e6, 1e6);
        REQUIRE(std::stod(vulnrank::csv::format_number(x)) == x);
    }
}
