#include <doctest.h>

#include <sstream>

#include "world.hpp"
#include "vulnrank/feeds.hpp"

using namespace vulnrank;
using testing::vocabulary;

namespace {

nlohmann::json profile_json(std::string sector)
{
    return {{"org_id", "X"},
            {"name", "Example"},
            {"sector", std::move(sector)},
            {"country", "united states"},
            {"software", nlohmann::json::array()}};
}

}  // namespace

TEST_CASE("the shipped profile loads")
{
    const auto p = load_profile(testing::odu_dir() / "odu_profile.json", vocabulary());
    CHECK(p.org_id == "ODU");
    CHECK(p.sector == "Education");
    CHECK(p.country == "United States");
    CHECK(p.software.size() == 69);
    CHECK(p.sector_scope == std::vector<std::string>{"Education", "Government Facilities"});
    CHECK(size_class(p) == SizeClass::ExtraLarge);
}

TEST_CASE("profile vocabulary checks")
{
    CHECK_THROWS_AS(parse_profile(profile_json("Retail"), vocabulary()), ProfileError);
    auto bad_country = profile_json("Energy");
    bad_country["country"] = "Atlantis";
    CHECK_THROWS_AS(parse_profile(bad_country, vocabulary()), ProfileError);
    const auto ok = parse_profile(profile_json("energy"), vocabulary());
    CHECK(ok.sector == "Energy");
    CHECK(ok.country == "United States");
    CHECK(ok.software.empty());
    CHECK_THROWS_AS(load_profile("/nonexistent/profile.json", vocabulary()), ProfileError);
}

TEST_CASE("token normalization")
{
    CHECK(normalize_token("Visual Studio Code") == "visualstudiocode");
    CHECK(normalize_token("visual_studio_code") == "visualstudiocode");
    CHECK(normalize_token("Notepad++") == "notepad");
    CHECK(cpe_version("cpe:2.3:a:google:chrome:96.0.4664.45:*:*:*:*:*:*:*") == "96.0.4664.45");
    CHECK(cpe_version("cpe:2.3:a:google") == "");
}

TEST_CASE("cpe dictionary lookup")
{
    const CpeDictionary dict({
        {"cpe:2.3:a:google:chrome:*:*:*:*:*:*:*:*", "google", "chrome", false, "en-US"},
        {"cpe:2.3:a:google:chrome:96.0.4664.45:*:*:*:*:*:*:*", "google", "chrome", false, "en-US"},
        {"cpe:2.3:a:microsoft:visual_studio_code:*:*:*:*:*:*:*:*", "microsoft", "visual_studio_code", false,
         "en-US"},
    });
    CHECK(dict.lookup("Google", "Chrome").size() == 2);
    CHECK(dict.lookup("Google", "Chrome", "96.0.4664.45") ==
          std::vector<std::string>{"cpe:2.3:a:google:chrome:96.0.4664.45:*:*:*:*:*:*:*"});
    CHECK(dict.lookup("Google", "Chrome", "97.0").size() == 2);
    CHECK(dict.lookup("Microsoft", "Visual Studio Code").size() == 1);
    CHECK(dict.lookup("Acme", "Widget").empty());
}

TEST_CASE("resolution coverage on the shipped profile")
{
    const auto records = parse_snapshot(testing::odu_dir() / "records.jsonl").records;
    const CpeDictionary dict(normalize_cpe_entries(records.cpes));
    const auto profile = load_profile(testing::odu_dir() / "odu_profile.json", vocabulary());
    const auto resolved = resolve_cpes(profile, dict);
    CHECK(resolved.coverage.resolved == 47);
    CHECK(resolved.coverage.unresolved == 22);
    CHECK(resolved.coverage.rows.size() == 69);
    for (std::size_t i = 0; i < profile.software.size(); ++i) {
        REQUIRE(resolved.profile.software[i].resolved_cpes.size() == resolved.coverage.rows[i].matched_cpe_count);
    }
    std::ostringstream out;
    write_coverage_csv(out, resolved.coverage);
    CHECK(out.str().rfind("vendor,product,matched_cpe_count\nGoogle,Chrome,2\n", 0) == 0);
}

TEST_CASE("a product missing from the dictionary is one unresolved item")
{
    auto j = profile_json("Energy");
    j["software"] = {{{"vendor", "Acme"}, {"product", "Widget"}}};
    const auto resolved = resolve_cpes(parse_profile(j, vocabulary()), CpeDictionary{});
    CHECK(resolved.profile.software[0].resolved_cpes.empty());
    CHECK(resolved.coverage.unresolved == 1);
    CHECK(resolved.coverage.resolved == 0);
}

TEST_CASE("size classes")
{
    CHECK(size_class(22) == SizeClass::Small);
    CHECK(size_class(23) == SizeClass::Small);
    CHECK(size_class(24) == SizeClass::Medium);
    CHECK(size_class(33) == SizeClass::Medium);
    CHECK(size_class(34) == SizeClass::Large);
    CHECK(size_class(49) == SizeClass::Large);
    CHECK(size_class(50) == SizeClass::ExtraLarge);
    CHECK(size_class(69) == SizeClass::ExtraLarge);
    CHECK(to_string(SizeClass::ExtraLarge) == "XL");
    for (std::size_t n = 0; n < 500; ++n) {
        REQUIRE(size_class(n) <= size_class(n + 1));
    }
}
