#include <doctest.h>

#include "generators.hpp"
#include "world.hpp"

using namespace vulnrank;
using testing::lexicon;
using testing::vocabulary;

namespace {

using Strings = std::vector<std::string>;

AttackGroupRaw group(std::string id, std::string description, Date created = Date(2017, 5, 31))
{
    return {std::move(id), "name", std::move(description), created, {}};
}

}  // namespace

TEST_CASE("vocabulary")
{
    const auto& v = vocabulary();
    CHECK(v.has_country("North Korea"));
    CHECK(v.has_sector("Education"));
    CHECK_FALSE(v.has_sector("Retail"));
    CHECK(v.canonical_country("united states") == "United States");
    CHECK(v.parent_sector("Education") == "Government Facilities");
    CHECK(v.sector_scope("Education") == Strings{"Education", "Government Facilities"});
    CHECK(v.sector_scope("Energy") == Strings{"Energy"});
    CHECK(v.sectors().size() == 17);
}

TEST_CASE("origin from a state-sponsorship phrase")
{
    const auto o = extract_origin("North Korean state-sponsored threat group", Date(2017, 5, 31), lexicon());
    CHECK(o.countries == Strings{"North Korea"});
    REQUIRE_FALSE(o.evidence.empty());
}

TEST_CASE("origin year from an activity phrase")
{
    const auto o = extract_origin("has been active since at least 2009", Date(2017, 5, 31), lexicon());
    CHECK(o.year == 2009);
}

TEST_CASE("origin falls back to the creation year")
{
    const auto o = extract_origin("A threat group of unknown provenance.", Date(2008, 3, 1), lexicon());
    CHECK(o.countries.empty());
    CHECK(o.year == 2008);
}

TEST_CASE("activity years beyond the snapshot year are ignored")
{
    const auto o = extract_origin("active since at least 2030", Date(2015, 1, 1), lexicon(), 2021);
    CHECK(o.year == 2015);
}

TEST_CASE("targets: sectors and countries inside the window")
{
    const auto t = extract_targets(
        "targeted organizations in the financial services and government sectors in the United States", lexicon());
    CHECK(t.sectors == Strings{"Financial Services", "Government Facilities"});
    CHECK(t.countries == Strings{"United States"});
}

TEST_CASE("targets without a country")
{
    const auto t = extract_targets("The group is known for targeting aerospace manufacturing.", lexicon());
    CHECK(t.countries.empty());
    CHECK_FALSE(t.sectors.empty());
}

TEST_CASE("no trigger word, nothing targeted")
{
    const auto t = extract_targets("The group uses spearphishing against banks in the United States.", lexicon());
    CHECK(t.countries.empty());
    CHECK(t.sectors.empty());
}

TEST_CASE("targeted countries are not origins")
{
    const auto a = attribute_group(
        group("G0032",
              "Lazarus Group is a North Korean state-sponsored threat group that has been active since at least 2009. "
              "The group has targeted banks and financial institutions in South Korea and the United States."),
        lexicon(), 2021);
    CHECK(a.origin_countries == Strings{"North Korea"});
    CHECK(a.origin_year == 2009);
    CHECK(a.targeted_countries == Strings{"South Korea", "United States"});
    CHECK(a.targeted_sectors == Strings{"Financial Services"});
}

TEST_CASE("evidence text is a verbatim slice of the description")
{
    const std::string description =
        "menuPass is a threat group that has been active since at least 2006. Individual members are known to have "
        "acted in association with the Chinese Ministry of State Security. The group has targeted universities and "
        "government agencies in the United States and Japan.";
    const auto a = attribute_group(group("G0045", description), lexicon(), 2021);
    CHECK(a.origin_countries == Strings{"China"});
    CHECK(a.targeted_sectors == Strings{"Education", "Government Facilities"});
    CHECK(a.targeted_countries == Strings{"Japan", "United States"});
    for (const auto& e : a.evidence) {
        if (e.offset) {
            REQUIRE(description.substr(*e.offset, e.text.size()) == e.text);
        }
    }
}

TEST_CASE("us targeting filter")
{
    GroupAttribution korea;
    korea.group_id = "G1";
    korea.targeted_countries = {"South Korea"};
    GroupAttribution north_america;
    north_america.group_id = "G2";
    north_america.targeted_countries = {"Canada", "United States"};
    const std::vector<GroupAttribution> all{korea, north_america};
    const auto kept = filter_us_targeting(all);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].group_id == "G2");
}

TEST_CASE("us targeting filter is idempotent and keeps a subset")
{
    const auto countries = vocabulary().countries();
    const std::vector<std::string> few{"United States", "South Korea", "Japan", "Canada", countries.front()};
    const auto sectors = vocabulary().sectors();
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        testing::RecordGen gen(seed);
        auto attributions = gen.many(0, 12, [&] { return gen.attribution(few, sectors); });
        const auto once = filter_us_targeting(attributions);
        REQUIRE(filter_us_targeting(once) == once);
        for (const auto& a : once) {
            REQUIRE(std::find(a.targeted_countries.begin(), a.targeted_countries.end(), "United States") !=
                    a.targeted_countries.end());
        }
    }
}

TEST_CASE("attribution json round-trip")
{
    const auto a = attribute_group(
        group("G0007", "APT28 has been attributed to Russian military intelligence. APT28 has targeted government "
                       "and military organizations in Georgia and Ukraine."),
        lexicon(), 2021);
    CHECK(attribution_from_json(to_json(a)) == a);
}

TEST_CASE("sector histogram counts each group once per sector")
{
    GroupAttribution a;
    a.group_id = "G1";
    a.targeted_sectors = {"Energy", "Financial Services"};
    GroupAttribution b;
    b.group_id = "G2";
    b.targeted_sectors = {"Energy"};
    const std::vector<GroupAttribution> all{a, b};
    const auto h = sector_histogram(all, vocabulary());
    REQUIRE(h.size() >= 2);
    CHECK(h[0] == std::pair<std::string, std::size_t>{"Energy", 2});
    CHECK(h[1] == std::pair<std::string, std::size_t>{"Financial Services", 1});
}

TEST_CASE("lexicon values outside the vocabulary are rejected")
{
    testing::TempDir dir("lexicon");
    testing::write_file(dir.path() / "c.tsv", "atlantean\tAtlantis\n");
    testing::write_file(dir.path() / "s.tsv", "banks\tFinancial Services\n");
    CHECK_THROWS(Lexicon::load(dir.path() / "c.tsv", dir.path() / "s.tsv", vocabulary()));
}
