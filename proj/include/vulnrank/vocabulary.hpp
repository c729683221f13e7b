#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vulnrank {

class VocabularyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kUnitedStates = "United States";

// Controlled vocabularies for countries (independent states) and DHS
// critical-infrastructure sectors. A sector may name a parent sector when it
// is a subsector (Education under Government Facilities).
class Vocabulary {
public:
    Vocabulary() = default;
    Vocabulary(std::vector<std::string> countries, std::map<std::string, std::string> sector_parents);

    // countries: one name per line. sectors: `name` or `name<TAB>parent` per line.
    // `#` starts a comment line in both files.
    static Vocabulary load(const std::filesystem::path& countries, const std::filesystem::path& sectors);

    bool has_country(std::string_view name) const;
    bool has_sector(std::string_view name) const;

    // Case-insensitive lookup returning the canonical spelling.
    std::optional<std::string> canonical_country(std::string_view name) const;
    std::optional<std::string> canonical_sector(std::string_view name) const;

    std::optional<std::string> parent_sector(std::string_view sector) const;

    // The sector followed by its ancestors.
    std::vector<std::string> sector_scope(std::string_view sector) const;

    const std::vector<std::string>& countries() const { return countries_; }
    std::vector<std::string> sectors() const;

private:
    std::vector<std::string> countries_;
    // sector -> parent ("" for top-level sectors)
    std::map<std::string, std::string> sectors_;
};

}  // namespace vulnrank
