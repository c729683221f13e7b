#include "vulnrank/profiles.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "vulnrank/csv.hpp"

namespace vulnrank {

OrganizationProfile parse_profile(const nlohmann::json& j, const Vocabulary& vocabulary)
{
    OrganizationProfile p;
    try {
        p.org_id = j.at("org_id").get<std::string>();
        p.name = j.value("name", p.org_id);
        const auto sector = j.at("sector").get<std::string>();
        const auto country = j.at("country").get<std::string>();
        auto canonical_sector = vocabulary.canonical_sector(sector);
        if (!canonical_sector) {
            throw ProfileError("profile " + p.org_id + ": '" + sector + "' is not a DHS sector");
        }
        auto canonical_country = vocabulary.canonical_country(country);
        if (!canonical_country) {
            throw ProfileError("profile " + p.org_id + ": '" + country + "' is not a recognized country");
        }
        p.sector = *canonical_sector;
        p.country = *canonical_country;
        p.sector_scope = vocabulary.sector_scope(p.sector);
        for (const auto& item : j.value("software", nlohmann::json::array())) {
            SoftwareItem s;
            s.vendor = item.at("vendor").get<std::string>();
            s.product = item.at("product").get<std::string>();
            if (item.contains("version") && !item.at("version").is_null()) {
                s.version = item.at("version").get<std::string>();
            }
            p.software.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ProfileError(std::string("malformed profile: ") + e.what());
    }
    if (p.org_id.empty()) {
        throw ProfileError("profile has an empty org_id");
    }
    return p;
}

OrganizationProfile load_profile(const std::filesystem::path& path, const Vocabulary& vocabulary)
{
    std::ifstream in(path);
    if (!in) {
        throw ProfileError("cannot read profile " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ProfileError(path.string() + ": " + e.what());
    }
    return parse_profile(j, vocabulary);
}

std::string normalize_token(std::string_view s)
{
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            out += static_cast<char>(std::tolower(c));
        }
    }
    return out;
}

std::string cpe_version(std::string_view cpe_id)
{
    // cpe:2.3:part:vendor:product:version:...
    std::size_t pos = 0;
    for (int field = 0; field < 5; ++field) {
        pos = cpe_id.find(':', pos);
        if (pos == std::string_view::npos) {
            return "";
        }
        ++pos;
    }
    const auto end = cpe_id.find(':', pos);
    return std::string(cpe_id.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
}

CpeDictionary::CpeDictionary(const std::vector<CpeEntry>& entries)
{
    for (const auto& e : entries) {
        index_[{normalize_token(e.vendor), normalize_token(e.product)}].push_back(e.cpe_id);
        ++size_;
    }
    for (auto& [key, ids] : index_) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }
}

std::vector<std::string> CpeDictionary::lookup(std::string_view vendor, std::string_view product,
                                               const std::optional<std::string>& version) const
{
    auto it = index_.find({normalize_token(vendor), normalize_token(product)});
    if (it == index_.end()) {
        return {};
    }
    if (version && !version->empty()) {
        std::vector<std::string> exact;
        for (const auto& id : it->second) {
            if (cpe_version(id) == *version) {
                exact.push_back(id);
            }
        }
        if (!exact.empty()) {
            return exact;
        }
    }
    return it->second;
}

ResolvedProfile resolve_cpes(const OrganizationProfile& profile, const CpeDictionary& dictionary)
{
    ResolvedProfile out{profile, {}};
    for (auto& item : out.profile.software) {
        item.resolved_cpes = dictionary.lookup(item.vendor, item.product, item.version);
        out.coverage.rows.push_back({item.vendor, item.product, item.resolved_cpes.size()});
        if (item.resolved_cpes.empty()) {
            ++out.coverage.unresolved;
        } else {
            ++out.coverage.resolved;
        }
    }
    return out;
}

void write_coverage_csv(std::ostream& out, const CoverageReport& report)
{
    out << "vendor,product,matched_cpe_count\n";
    for (const auto& row : report.rows) {
        out << csv::join({row.vendor, row.product, std::to_string(row.matched_cpe_count)}) << '\n';
    }
}

std::string_view to_string(SizeClass c)
{
    switch (c) {
    case SizeClass::Small: return "S";
    case SizeClass::Medium: return "M";
    case SizeClass::Large: return "L";
    case SizeClass::ExtraLarge: return "XL";
    }
    return "?";
}

SizeClass size_class(std::size_t product_count)
{
    if (product_count <= 23) {
        return SizeClass::Small;
    }
    if (product_count <= 33) {
        return SizeClass::Medium;
    }
    if (product_count <= 49) {
        return SizeClass::Large;
    }
    return SizeClass::ExtraLarge;
}

SizeClass size_class(const OrganizationProfile& profile) { return size_class(profile.software.size()); }

}  // namespace vulnrank
