#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vulnrank/records.hpp"
#include "vulnrank/vocabulary.hpp"

namespace vulnrank {

class ProfileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SoftwareItem {
    std::string vendor;
    std::string product;
    std::optional<std::string> version;
    std::vector<std::string> resolved_cpes;

    bool operator==(const SoftwareItem&) const = default;
};

struct OrganizationProfile {
    std::string org_id;
    std::string name;
    std::string sector;
    std::string country;
    // The sector followed by its parent sectors; filled in by the loader.
    std::vector<std::string> sector_scope;
    std::vector<SoftwareItem> software;

    bool operator==(const OrganizationProfile&) const = default;
};

// Profile JSON:
// {"org_id": "...", "name": "...", "sector": "...", "country": "...",
//  "software": [{"vendor": "...", "product": "...", "version": "..."}]}
// Sector and country are matched case-insensitively against the vocabulary
// and stored in canonical spelling.
OrganizationProfile parse_profile(const nlohmann::json& j, const Vocabulary& vocabulary);
OrganizationProfile load_profile(const std::filesystem::path& path, const Vocabulary& vocabulary);

// Lowercase letters and digits only: "Visual Studio Code" and
// "visual_studio_code" both become "visualstudiocode".
std::string normalize_token(std::string_view s);

// Fifth component of a CPE 2.3 name, or "" when absent.
std::string cpe_version(std::string_view cpe_id);

// Index of normalized CPE entries by (vendor, product) tokens.
class CpeDictionary {
public:
    CpeDictionary() = default;
    explicit CpeDictionary(const std::vector<CpeEntry>& entries);

    // Vendor+product matches; when `version` is given and some match carries
    // exactly that version, only those are returned. Sorted.
    std::vector<std::string> lookup(std::string_view vendor, std::string_view product,
                                    const std::optional<std::string>& version = std::nullopt) const;

    std::size_t size() const { return size_; }

private:
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> index_;
    std::size_t size_{0};
};

struct CoverageRow {
    std::string vendor;
    std::string product;
    std::size_t matched_cpe_count{0};
};

struct CoverageReport {
    std::vector<CoverageRow> rows;
    std::size_t resolved{0};
    std::size_t unresolved{0};
};

struct ResolvedProfile {
    OrganizationProfile profile;
    CoverageReport coverage;
};

ResolvedProfile resolve_cpes(const OrganizationProfile& profile, const CpeDictionary& dictionary);

// Header `vendor,product,matched_cpe_count`.
void write_coverage_csv(std::ostream& out, const CoverageReport& report);

enum class SizeClass { Small, Medium, Large, ExtraLarge };

std::string_view to_string(SizeClass c);

// S <= 23, 24..33 M, 34..49 L, XL >= 50 software products.
SizeClass size_class(std::size_t product_count);
SizeClass size_class(const OrganizationProfile& profile);

}  // namespace vulnrank
