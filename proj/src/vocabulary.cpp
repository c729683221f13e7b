#include "vulnrank/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace vulnrank {

namespace {

bool iequals(std::string_view a, std::string_view b)
{
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::string trim(std::string s)
{
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> read_lines(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw VocabularyError("cannot read vocabulary file " + path.string());
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty() || trim(line)[0] == '#') {
            continue;
        }
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> countries, std::map<std::string, std::string> sector_parents)
    : countries_{std::move(countries)}, sectors_{std::move(sector_parents)}
{
    std::sort(countries_.begin(), countries_.end());
    countries_.erase(std::unique(countries_.begin(), countries_.end()), countries_.end());
    for (const auto& [sector, parent] : sectors_) {
        if (!parent.empty() && !sectors_.contains(parent)) {
            throw VocabularyError("sector '" + sector + "' names unknown parent '" + parent + "'");
        }
    }
}

Vocabulary Vocabulary::load(const std::filesystem::path& countries, const std::filesystem::path& sectors)
{
    std::vector<std::string> names;
    for (auto& line : read_lines(countries)) {
        names.push_back(trim(line));
    }
    std::map<std::string, std::string> parents;
    for (const auto& line : read_lines(sectors)) {
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            parents[trim(line)] = "";
        } else {
            parents[trim(line.substr(0, tab))] = trim(line.substr(tab + 1));
        }
    }
    return Vocabulary{std::move(names), std::move(parents)};
}

bool Vocabulary::has_country(std::string_view name) const
{
    return std::binary_search(countries_.begin(), countries_.end(), name);
}

bool Vocabulary::has_sector(std::string_view name) const { return sectors_.contains(std::string(name)); }

std::optional<std::string> Vocabulary::canonical_country(std::string_view name) const
{
    for (const auto& c : countries_) {
        if (iequals(c, name)) {
            return c;
        }
    }
    return std::nullopt;
}

std::optional<std::string> Vocabulary::canonical_sector(std::string_view name) const
{
    for (const auto& [s, parent] : sectors_) {
        if (iequals(s, name)) {
            return s;
        }
    }
    return std::nullopt;
}

std::optional<std::string> Vocabulary::parent_sector(std::string_view sector) const
{
    auto it = sectors_.find(std::string(sector));
    if (it == sectors_.end() || it->second.empty()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<std::string> Vocabulary::sector_scope(std::string_view sector) const
{
    std::vector<std::string> scope;
    if (!has_sector(sector)) {
        return scope;
    }
    std::optional<std::string> current = std::string(sector);
    while (current && std::find(scope.begin(), scope.end(), *current) == scope.end()) {
        scope.push_back(*current);
        current = parent_sector(*current);
    }
    return scope;
}

std::vector<std::string> Vocabulary::sectors() const
{
    std::vector<std::string> out;
    for (const auto& [s, parent] : sectors_) {
        out.push_back(s);
    }
    return out;
}

}  // namespace vulnrank
