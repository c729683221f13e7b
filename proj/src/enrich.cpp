#include "vulnrank/enrich.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <regex>
#include <set>

namespace vulnrank {

namespace {

struct Match {
    std::size_t begin;
    std::size_t end;
    std::string value;
};

struct Span {
    std::size_t begin;
    std::size_t end;
};

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string ascii_lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Longest-match, non-overlapping occurrences of lexicon terms in `lower`
// restricted to [from, to). Term edges that are letters or digits must sit
// on word boundaries.
std::vector<Match> find_terms(const std::string& lower, const std::map<std::string, std::string>& terms,
                              std::size_t from, std::size_t to)
{
    std::vector<Match> all;
    for (const auto& [term, value] : terms) {
        if (term.empty()) {
            continue;
        }
        for (auto pos = lower.find(term, from); pos != std::string::npos && pos + term.size() <= to;
             pos = lower.find(term, pos + 1)) {
            const auto end = pos + term.size();
            if (is_word_char(term.front()) && pos > 0 && is_word_char(lower[pos - 1])) {
                continue;
            }
            if (is_word_char(term.back()) && end < lower.size() && is_word_char(lower[end])) {
                continue;
            }
            all.push_back({pos, end, value});
        }
    }
    std::sort(all.begin(), all.end(), [](const Match& a, const Match& b) {
        if (a.begin != b.begin) {
            return a.begin < b.begin;
        }
        return a.end > b.end;
    });
    std::vector<Match> chosen;
    std::size_t covered = 0;
    for (auto& m : all) {
        if (!chosen.empty() && m.begin < covered) {
            continue;
        }
        covered = m.end;
        chosen.push_back(std::move(m));
    }
    return chosen;
}

// A period ends a sentence unless it closes a one-letter abbreviation (U.S., e.g.).
bool ends_sentence(std::string_view text, std::size_t i)
{
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') {
        return false;
    }
    if (i + 1 < text.size() && !std::isspace(static_cast<unsigned char>(text[i + 1]))) {
        return false;
    }
    if (c == '.' && i >= 1 && std::isalpha(static_cast<unsigned char>(text[i - 1])) &&
        (i == 1 || !std::isalpha(static_cast<unsigned char>(text[i - 2])))) {
        return false;
    }
    return true;
}

std::vector<Span> target_windows(std::string_view text, const std::string& lower)
{
    static const std::regex trigger{R"(\btarget(s|ed|ing)\b)"};
    std::vector<Span> windows;
    for (auto it = std::sregex_iterator(lower.begin(), lower.end(), trigger); it != std::sregex_iterator(); ++it) {
        const auto start = static_cast<std::size_t>(it->position(0) + it->length(0));
        auto end = std::min(text.size(), start + kTargetWindow);
        for (std::size_t i = start; i < end; ++i) {
            if (ends_sentence(text, i)) {
                end = i;
                break;
            }
        }
        windows.push_back({start, end});
    }
    return windows;
}

void add_unique(std::vector<std::string>& values, const std::string& v)
{
    if (std::find(values.begin(), values.end(), v) == values.end()) {
        values.push_back(v);
    }
}

std::map<std::string, std::string> load_terms(const std::filesystem::path& path,
                                              const std::function<bool(const std::string&)>& known,
                                              std::string_view what)
{
    std::ifstream in(path);
    if (!in) {
        throw VocabularyError("cannot read lexicon " + path.string());
    }
    std::map<std::string, std::string> terms;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw VocabularyError(path.string() + ":" + std::to_string(line_no) + ": expected term<TAB>value");
        }
        auto term = ascii_lower(line.substr(0, tab));
        auto value = line.substr(tab + 1);
        if (!known(value)) {
            throw VocabularyError(path.string() + ":" + std::to_string(line_no) + ": unknown " + std::string(what) +
                                  " '" + value + "'");
        }
        terms[std::move(term)] = std::move(value);
    }
    return terms;
}

}  // namespace

Lexicon Lexicon::load(const std::filesystem::path& country_terms, const std::filesystem::path& sector_terms,
                      const Vocabulary& vocabulary)
{
    Lexicon lex;
    lex.country_terms =
        load_terms(country_terms, [&](const std::string& v) { return vocabulary.has_country(v); }, "country");
    lex.sector_terms =
        load_terms(sector_terms, [&](const std::string& v) { return vocabulary.has_sector(v); }, "sector");
    return lex;
}

OriginExtraction extract_origin(std::string_view description, const Date& created, const Lexicon& lexicon,
                                std::optional<int> snapshot_year)
{
    OriginExtraction out;
    const auto lower = ascii_lower(description);
    const auto windows = target_windows(description, lower);
    auto in_window = [&windows](const Match& m) {
        return std::any_of(windows.begin(), windows.end(),
                           [&m](const Span& w) { return m.begin >= w.begin && m.end <= w.end; });
    };
    for (const auto& m : find_terms(lower, lexicon.country_terms, 0, lower.size())) {
        if (in_window(m)) {
            continue;
        }
        add_unique(out.countries, m.value);
        out.evidence.push_back({"origin_country", std::string(description.substr(m.begin, m.end - m.begin)), m.begin});
    }

    static const std::regex activity{
        R"((since|as early as|dating back to|first (?:observed|seen|reported|identified|detected|active) in|began operating in)((?:\s+(?:at least|about|approximately|around|roughly|the))*)\s+(?:(?:mid|late|early)[- ])?((?:19|20)\d{2})\b)",
        std::regex::icase};
    const int upper = snapshot_year.value_or(created.year() > 0 ? std::max(created.year(), 1970) : 9999);
    std::optional<int> best;
    Evidence best_evidence;
    const std::string text(description);
    for (auto it = std::sregex_iterator(text.begin(), text.end(), activity); it != std::sregex_iterator(); ++it) {
        const int year = std::stoi((*it)[3].str());
        if (year < 1970 || year > upper) {
            continue;
        }
        if (!best || year < *best) {
            best = year;
            best_evidence = {"origin_year", it->str(0), static_cast<std::size_t>(it->position(0))};
        }
    }
    if (best) {
        out.year = *best;
        out.evidence.push_back(best_evidence);
    } else {
        out.year = created.year();
        out.evidence.push_back({"origin_year", "created " + created.to_string(), std::nullopt});
    }
    return out;
}

TargetExtraction extract_targets(std::string_view description, const Lexicon& lexicon)
{
    TargetExtraction out;
    const auto lower = ascii_lower(description);
    std::set<std::size_t> seen_sector;
    std::set<std::size_t> seen_country;
    for (const auto& w : target_windows(description, lower)) {
        for (const auto& m : find_terms(lower, lexicon.sector_terms, w.begin, w.end)) {
            add_unique(out.sectors, m.value);
            if (seen_sector.insert(m.begin).second) {
                out.evidence.push_back(
                    {"targeted_sector", std::string(description.substr(m.begin, m.end - m.begin)), m.begin});
            }
        }
        for (const auto& m : find_terms(lower, lexicon.country_terms, w.begin, w.end)) {
            add_unique(out.countries, m.value);
            if (seen_country.insert(m.begin).second) {
                out.evidence.push_back(
                    {"targeted_country", std::string(description.substr(m.begin, m.end - m.begin)), m.begin});
            }
        }
    }
    return out;
}

GroupAttribution attribute_group(const AttackGroupRaw& group, const Lexicon& lexicon, std::optional<int> snapshot_year)
{
    auto origin = extract_origin(group.description, group.created, lexicon, snapshot_year);
    auto targets = extract_targets(group.description, lexicon);
    GroupAttribution a;
    a.group_id = group.group_id;
    a.origin_countries = std::move(origin.countries);
    a.origin_year = origin.year;
    a.targeted_countries = std::move(targets.countries);
    a.targeted_sectors = std::move(targets.sectors);
    std::sort(a.origin_countries.begin(), a.origin_countries.end());
    std::sort(a.targeted_countries.begin(), a.targeted_countries.end());
    std::sort(a.targeted_sectors.begin(), a.targeted_sectors.end());
    a.evidence = std::move(origin.evidence);
    a.evidence.insert(a.evidence.end(), targets.evidence.begin(), targets.evidence.end());
    return a;
}

std::vector<GroupAttribution> attribute_groups(std::span<const AttackGroupRaw> groups, const Lexicon& lexicon,
                                               std::optional<int> snapshot_year)
{
    std::vector<GroupAttribution> out;
    out.reserve(groups.size());
    for (const auto& g : groups) {
        out.push_back(attribute_group(g, lexicon, snapshot_year));
    }
    return out;
}

std::vector<GroupAttribution> filter_us_targeting(std::span<const GroupAttribution> attributions)
{
    std::vector<GroupAttribution> out;
    for (const auto& a : attributions) {
        if (std::find(a.targeted_countries.begin(), a.targeted_countries.end(), kUnitedStates) !=
            a.targeted_countries.end()) {
            out.push_back(a);
        }
    }
    return out;
}

std::vector<std::pair<std::string, std::size_t>> sector_histogram(std::span<const GroupAttribution> attributions,
                                                                  const Vocabulary& vocabulary)
{
    std::map<std::string, std::size_t> counts;
    for (const auto& s : vocabulary.sectors()) {
        counts[s] = 0;
    }
    for (const auto& a : attributions) {
        for (const auto& s : a.targeted_sectors) {
            ++counts[s];
        }
    }
    std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

nlohmann::json to_json(const GroupAttribution& a)
{
    nlohmann::json evidence = nlohmann::json::array();
    for (const auto& e : a.evidence) {
        nlohmann::json item{{"field", e.field}, {"text", e.text}};
        item["offset"] = e.offset ? nlohmann::json(*e.offset) : nlohmann::json(nullptr);
        evidence.push_back(std::move(item));
    }
    return {{"kind", "attribution"},
            {"group_id", a.group_id},
            {"origin_countries", a.origin_countries},
            {"origin_year", a.origin_year},
            {"targeted_countries", a.targeted_countries},
            {"targeted_sectors", a.targeted_sectors},
            {"evidence", evidence}};
}

GroupAttribution attribution_from_json(const nlohmann::json& j)
{
    GroupAttribution a;
    a.group_id = j.at("group_id").get<std::string>();
    a.origin_countries = j.at("origin_countries").get<std::vector<std::string>>();
    a.origin_year = j.at("origin_year").get<int>();
    a.targeted_countries = j.at("targeted_countries").get<std::vector<std::string>>();
    a.targeted_sectors = j.at("targeted_sectors").get<std::vector<std::string>>();
    for (const auto& e : j.at("evidence")) {
        Evidence ev{e.at("field").get<std::string>(), e.at("text").get<std::string>(), std::nullopt};
        if (!e.at("offset").is_null()) {
            ev.offset = e.at("offset").get<std::size_t>();
        }
        a.evidence.push_back(std::move(ev));
    }
    return a;
}

}  // namespace vulnrank
