#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vulnrank/date.hpp"
#include "vulnrank/records.hpp"
#include "vulnrank/vocabulary.hpp"

namespace vulnrank {

// Keyword tables mapping lowercase terms to canonical vocabulary values.
struct Lexicon {
    std::map<std::string, std::string> country_terms;
    std::map<std::string, std::string> sector_terms;

    // Two-column tab-delimited files (term, canonical value). Terms are
    // lowercased; values must belong to the vocabulary.
    static Lexicon load(const std::filesystem::path& country_terms, const std::filesystem::path& sector_terms,
                        const Vocabulary& vocabulary);
};

// Characters scanned after a targeting trigger word.
inline constexpr std::size_t kTargetWindow = 120;

struct Evidence {
    std::string field;
    std::string text;
    // Byte offset of `text` in the description; empty when the value comes
    // from record metadata rather than the text.
    std::optional<std::size_t> offset;

    bool operator==(const Evidence&) const = default;
};

struct OriginExtraction {
    std::vector<std::string> countries;
    int year{0};
    std::vector<Evidence> evidence;
};

struct TargetExtraction {
    std::vector<std::string> countries;
    std::vector<std::string> sectors;
    std::vector<Evidence> evidence;
};

struct GroupAttribution {
    std::string group_id;
    std::vector<std::string> origin_countries;
    int origin_year{0};
    std::vector<std::string> targeted_countries;
    std::vector<std::string> targeted_sectors;
    std::vector<Evidence> evidence;

    bool operator==(const GroupAttribution&) const = default;
};

// Origin countries are country terms found outside every targeting window.
// The year is the earliest year named in an activity phrase ("active since
// at least 2009"), bounded to [1970, snapshot_year]; otherwise the year the
// description was created.
OriginExtraction extract_origin(std::string_view description, const Date& created, const Lexicon& lexicon,
                                std::optional<int> snapshot_year = std::nullopt);

// Scans a window after every "targets"/"targeted"/"targeting" for sector
// and country terms. The window is clipped at the end of the sentence.
TargetExtraction extract_targets(std::string_view description, const Lexicon& lexicon);

GroupAttribution attribute_group(const AttackGroupRaw& group, const Lexicon& lexicon,
                                 std::optional<int> snapshot_year = std::nullopt);

std::vector<GroupAttribution> attribute_groups(std::span<const AttackGroupRaw> groups, const Lexicon& lexicon,
                                               std::optional<int> snapshot_year = std::nullopt);

std::vector<GroupAttribution> filter_us_targeting(std::span<const GroupAttribution> attributions);

// Groups targeting each vocabulary sector, ordered by count then name.
std::vector<std::pair<std::string, std::size_t>> sector_histogram(std::span<const GroupAttribution> attributions,
                                                                  const Vocabulary& vocabulary);

nlohmann::json to_json(const GroupAttribution& attribution);
GroupAttribution attribution_from_json(const nlohmann::json& j);

}  // namespace vulnrank
