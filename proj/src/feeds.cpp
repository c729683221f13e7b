#include "vulnrank/feeds.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "vulnrank/csv.hpp"

namespace vulnrank {

namespace {

struct LineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Typed access to the fields of one snapshot line.
class Fields {
public:
    explicit Fields(const nlohmann::json& j) : j_{j} {}

    std::string str(const char* name) const
    {
        auto it = j_.find(name);
        if (it == j_.end() || !it->is_string()) {
            throw LineError(std::string("missing or non-string field '") + name + "'");
        }
        return it->get<std::string>();
    }

    std::string str_or(const char* name, std::string fallback) const
    {
        auto it = j_.find(name);
        if (it == j_.end() || it->is_null()) {
            return fallback;
        }
        if (!it->is_string()) {
            throw LineError(std::string("non-string field '") + name + "'");
        }
        return it->get<std::string>();
    }

    std::vector<std::string> str_list(const char* name) const
    {
        auto it = j_.find(name);
        if (it == j_.end() || it->is_null()) {
            return {};
        }
        if (!it->is_array()) {
            throw LineError(std::string("field '") + name + "' is not a list");
        }
        std::vector<std::string> out;
        for (const auto& v : *it) {
            if (!v.is_string()) {
                throw LineError(std::string("field '") + name + "' has a non-string element");
            }
            out.push_back(v.get<std::string>());
        }
        return out;
    }

    double number(const char* name) const
    {
        auto it = j_.find(name);
        if (it == j_.end() || !it->is_number()) {
            throw LineError(std::string("missing or non-numeric field '") + name + "'");
        }
        return it->get<double>();
    }

    std::optional<double> optional_number(const char* name) const
    {
        auto it = j_.find(name);
        if (it == j_.end() || it->is_null()) {
            return std::nullopt;
        }
        if (!it->is_number()) {
            throw LineError(std::string("non-numeric field '") + name + "'");
        }
        return it->get<double>();
    }

    Date date(const char* name) const
    {
        auto d = Date::parse(str(name));
        if (!d) {
            throw LineError(std::string("unparseable date in '") + name + "'");
        }
        return *d;
    }

    bool boolean_or(const char* name, bool fallback) const
    {
        auto it = j_.find(name);
        if (it == j_.end() || it->is_null()) {
            return fallback;
        }
        if (!it->is_boolean()) {
            throw LineError(std::string("non-boolean field '") + name + "'");
        }
        return it->get<bool>();
    }

    bool has(const char* name) const { return j_.contains(name); }

private:
    const nlohmann::json& j_;
};

void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw LineError(message);
    }
}

bool has_one_decimal(double v)
{
    const double scaled = v * 10.0;
    return std::fabs(scaled - std::round(scaled)) < 1e-9;
}

std::string lowercase(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

CveRecord parse_cve(const Fields& f)
{
    CveRecord r;
    r.cve_id = f.str("cve_id");
    require(is_cve_id(r.cve_id), "malformed CVE identifier '" + r.cve_id + "'");
    r.description = f.str_or("description", "");
    r.published = f.date("published");
    r.modified = f.date("modified");
    require(r.modified >= r.published, "modified date precedes published date");
    r.cvss_base = f.optional_number("cvss_base");
    if (r.cvss_base) {
        require(*r.cvss_base >= 0.0 && *r.cvss_base <= 10.0, "cvss_base outside [0,10]");
        require(has_one_decimal(*r.cvss_base), "cvss_base must have one fractional digit");
    }
    const auto av = f.str_or("attack_vector", "");
    if (!av.empty()) {
        r.attack_vector = parse_attack_vector(av);
        require(r.attack_vector.has_value(), "unknown attack_vector '" + av + "'");
    }
    r.cwe_ids = f.str_list("cwe_ids");
    r.affected_cpes = f.str_list("affected_cpes");
    r.reference_urls = f.str_list("reference_urls");
    return r;
}

CpeEntry parse_cpe(const Fields& f)
{
    CpeEntry r;
    r.cpe_id = f.str("cpe_id");
    require(r.cpe_id.rfind("cpe:2.3:", 0) == 0, "cpe_id is not a CPE 2.3 name");
    r.vendor = lowercase(f.str("vendor"));
    r.product = lowercase(f.str("product"));
    require(!r.vendor.empty() && !r.product.empty(), "empty vendor or product");
    r.deprecated = f.boolean_or("deprecated", false);
    r.language_tag = f.str_or("language_tag", "");
    return r;
}

CweEntry parse_cwe(const Fields& f)
{
    CweEntry r;
    r.cwe_id = f.str("cwe_id");
    require(is_cwe_id(r.cwe_id), "malformed CWE identifier '" + r.cwe_id + "'");
    r.name = f.str_or("name", "");
    for (const auto& s : f.str_list("technical_impacts")) {
        auto impact = parse_technical_impact(s);
        require(impact.has_value(), "unknown technical impact '" + s + "'");
        r.technical_impacts.push_back(*impact);
    }
    r.related_capecs = f.str_list("related_capecs");
    return r;
}

CapecEntry parse_capec(const Fields& f)
{
    CapecEntry r;
    r.capec_id = f.str("capec_id");
    require(is_capec_id(r.capec_id), "malformed CAPEC identifier '" + r.capec_id + "'");
    r.name = f.str_or("name", "");
    const auto skill = f.str_or("skill_level", "Unknown");
    auto parsed = parse_skill_level(skill);
    require(parsed.has_value(), "unknown skill_level '" + skill + "'");
    r.skill_level = *parsed;
    r.related_techniques = f.str_list("related_techniques");
    return r;
}

AttackTechnique parse_technique(const Fields& f)
{
    AttackTechnique r;
    r.technique_id = f.str("technique_id");
    require(is_technique_id(r.technique_id), "malformed technique identifier '" + r.technique_id + "'");
    r.name = f.str_or("name", "");
    r.tactic_ids = f.str_list("tactic_ids");
    require(!r.tactic_ids.empty(), "technique references no tactic");
    return r;
}

AttackTactic parse_tactic(const Fields& f)
{
    AttackTactic r;
    r.tactic_id = f.str("tactic_id");
    require(is_tactic_id(r.tactic_id), "malformed tactic identifier '" + r.tactic_id + "'");
    r.name = f.str_or("name", "");
    return r;
}

AttackGroupRaw parse_group(const Fields& f)
{
    AttackGroupRaw r;
    r.group_id = f.str("group_id");
    require(is_group_id(r.group_id), "malformed group identifier '" + r.group_id + "'");
    r.name = f.str_or("name", "");
    r.description = f.str_or("description", "");
    r.created = f.date("created");
    r.technique_ids = f.str_list("technique_ids");
    return r;
}

EpssScore parse_epss(const Fields& f)
{
    EpssScore r;
    r.cve_id = f.has("cve_id") ? f.str("cve_id") : f.str("cve");
    require(is_cve_id(r.cve_id), "malformed CVE identifier '" + r.cve_id + "'");
    r.probability = f.number("probability");
    r.percentile = f.number("percentile");
    require(r.probability >= 0.0 && r.probability <= 1.0, "probability outside [0,1]");
    require(r.percentile >= 0.0 && r.percentile <= 1.0, "percentile outside [0,1]");
    return r;
}

KevEntry parse_kev(const Fields& f)
{
    KevEntry r;
    r.cve_id = f.str("cve_id");
    require(is_cve_id(r.cve_id), "malformed CVE identifier '" + r.cve_id + "'");
    r.vendor_project = f.str_or("vendor_project", "");
    r.product = f.str_or("product", "");
    r.vulnerability_name = f.str_or("vulnerability_name", "");
    r.date_added = f.date("date_added");
    r.short_description = f.str_or("short_description", "");
    r.required_action = f.str_or("required_action", "");
    r.due_date = f.date("due_date");
    require(r.date_added <= r.due_date, "due_date precedes date_added");
    return r;
}

ExploitRef parse_exploit(const Fields& f, const nlohmann::json& j)
{
    ExploitRef r;
    auto id = j.find("exploitdb_id");
    require(id != j.end() && id->is_number_integer(), "missing or non-integer exploitdb_id");
    r.exploitdb_id = id->get<std::int64_t>();
    r.cve_ids = f.str_list("cve_ids");
    require(!r.cve_ids.empty(), "exploit lists no CVE");
    return r;
}

NvdReference parse_reference(const Fields& f)
{
    NvdReference r;
    r.url = f.str("url");
    require(!r.url.empty(), "empty url");
    r.source = f.str_or("source", "");
    r.tags = f.str_list("tags");
    return r;
}

SourceKind parse_line_into(const nlohmann::json& j, Snapshot& out)
{
    require(j.is_object(), "line is not an object");
    auto kind_it = j.find("kind");
    require(kind_it != j.end() && kind_it->is_string(), "missing 'kind'");
    auto kind = parse_source_kind(kind_it->get<std::string>());
    require(kind.has_value(), "unknown kind '" + kind_it->get<std::string>() + "'");
    const Fields f{j};
    switch (*kind) {
    case SourceKind::Cve: out.cves.push_back(parse_cve(f)); break;
    case SourceKind::Cpe: out.cpes.push_back(parse_cpe(f)); break;
    case SourceKind::Cwe: out.cwes.push_back(parse_cwe(f)); break;
    case SourceKind::Capec: out.capecs.push_back(parse_capec(f)); break;
    case SourceKind::Technique: out.techniques.push_back(parse_technique(f)); break;
    case SourceKind::Tactic: out.tactics.push_back(parse_tactic(f)); break;
    case SourceKind::Group: out.groups.push_back(parse_group(f)); break;
    case SourceKind::Epss: out.epss.push_back(parse_epss(f)); break;
    case SourceKind::Kev: out.kev.push_back(parse_kev(f)); break;
    case SourceKind::Exploit: out.exploits.push_back(parse_exploit(f, j)); break;
    case SourceKind::Reference: out.references.push_back(parse_reference(f)); break;
    }
    return *kind;
}

bool is_blank(const std::string& s)
{
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::ifstream open_or_throw(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FeedError("cannot read " + path.string());
    }
    return in;
}

std::optional<double> parse_decimal(std::string_view s)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

// Applies last-wins per key to CSV results and records a diagnostic per drop.
template <typename T, typename KeyFn>
void dedupe_rows(CsvParseResult<T>& result, KeyFn key)
{
    std::unordered_map<std::string, std::size_t> last;
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        auto [it, inserted] = last.try_emplace(key(result.records[i]), i);
        if (!inserted) {
            result.diagnostics.push_back({0, "duplicate row for " + it->first + ", keeping later row"});
            it->second = i;
        }
    }
    if (last.size() == result.records.size()) {
        return;
    }
    std::vector<T> kept;
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        if (last.at(key(result.records[i])) == i) {
            kept.push_back(std::move(result.records[i]));
        }
    }
    result.records = std::move(kept);
}

}  // namespace

ParseResult parse_snapshot(std::istream& in, std::optional<SourceKind> only)
{
    ParseResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (is_blank(line)) {
            continue;
        }
        ++result.data_lines;
        try {
            const auto j = nlohmann::json::parse(line);
            Snapshot one;
            const auto kind = parse_line_into(j, one);
            if (only && kind != *only) {
                throw LineError("kind '" + std::string(to_string(kind)) + "' not accepted by this parser");
            }
            result.records.append(one);
            ++result.accepted;
        } catch (const nlohmann::json::exception& e) {
            ++result.skipped;
            result.skipped_lines.push_back({line_no, std::string("invalid JSON: ") + e.what()});
        } catch (const LineError& e) {
            ++result.skipped;
            result.skipped_lines.push_back({line_no, e.what()});
        }
    }
    for (auto& message : result.records.deduplicate()) {
        result.warnings.push_back({0, std::move(message)});
    }
    return result;
}

ParseResult parse_snapshot(const std::filesystem::path& path, std::optional<SourceKind> only)
{
    auto in = open_or_throw(path);
    return parse_snapshot(in, only);
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snapshot)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FeedError("cannot write " + path.string());
    }
    out << serialize_snapshot(snapshot);
}

CsvParseResult<EpssScore> parse_epss_csv(std::istream& in)
{
    CsvParseResult<EpssScore> result;
    csv::Reader reader{in};
    std::vector<std::string> fields;
    std::size_t line = 0;
    bool header_seen = false;
    while (reader.next(fields, line)) {
        if (fields.empty() || (fields.size() == 1 && fields[0].empty())) {
            continue;
        }
        if (!fields[0].empty() && fields[0][0] == '#') {
            continue;
        }
        if (!header_seen) {
            if (fields != std::vector<std::string>{"cve", "epss", "percentile"}) {
                throw FeedError("EPSS header must be 'cve,epss,percentile'");
            }
            header_seen = true;
            continue;
        }
        ++result.data_rows;
        auto reject = [&](std::string message) {
            ++result.rejected;
            result.diagnostics.push_back({line, std::move(message)});
        };
        if (fields.size() != 3) {
            reject("expected 3 columns");
            continue;
        }
        if (!is_cve_id(fields[0])) {
            reject("malformed CVE identifier '" + fields[0] + "'");
            continue;
        }
        const auto probability = parse_decimal(fields[1]);
        const auto percentile = parse_decimal(fields[2]);
        if (!probability || !percentile) {
            reject("non-numeric score");
            continue;
        }
        if (*probability < 0.0 || *probability > 1.0) {
            reject("epss " + fields[1] + " outside [0,1]");
            continue;
        }
        if (*percentile < 0.0 || *percentile > 1.0) {
            reject("percentile " + fields[2] + " outside [0,1]");
            continue;
        }
        result.records.push_back({fields[0], *probability, *percentile});
    }
    if (!header_seen) {
        throw FeedError("EPSS file has no header");
    }
    dedupe_rows(result, [](const EpssScore& e) { return e.cve_id; });
    return result;
}

CsvParseResult<EpssScore> parse_epss_csv(const std::filesystem::path& path)
{
    auto in = open_or_throw(path);
    return parse_epss_csv(in);
}

CsvParseResult<KevEntry> parse_kev_csv(std::istream& in)
{
    static const std::array<std::string_view, 8> kHeader{
        "cveID",     "vendorProject",    "product",        "vulnerabilityName",
        "dateAdded", "shortDescription", "requiredAction", "dueDate"};

    CsvParseResult<KevEntry> result;
    csv::Reader reader{in};
    std::vector<std::string> fields;
    std::size_t line = 0;
    bool header_seen = false;
    while (reader.next(fields, line)) {
        if (fields.empty() || (fields.size() == 1 && fields[0].empty())) {
            continue;
        }
        if (!header_seen) {
            if (!fields.empty() && !fields[0].empty() && fields[0].front() == '\xEF') {
                // UTF-8 byte order mark
                fields[0].erase(0, 3);
            }
            bool ok = fields.size() >= kHeader.size();
            for (std::size_t i = 0; ok && i < kHeader.size(); ++i) {
                ok = fields[i] == kHeader[i];
            }
            if (!ok) {
                throw FeedError("KEV header must start with "
                                "cveID,vendorProject,product,vulnerabilityName,dateAdded,"
                                "shortDescription,requiredAction,dueDate");
            }
            header_seen = true;
            continue;
        }
        ++result.data_rows;
        auto reject = [&](std::string message) {
            ++result.rejected;
            result.diagnostics.push_back({line, std::move(message)});
        };
        if (reader.last_record_malformed()) {
            reject("unterminated quoted field");
            continue;
        }
        if (fields.size() < kHeader.size()) {
            reject("expected at least 8 columns");
            continue;
        }
        if (!is_cve_id(fields[0])) {
            reject("malformed CVE identifier '" + fields[0] + "'");
            continue;
        }
        const auto added = Date::parse(fields[4]);
        const auto due = Date::parse(fields[7]);
        if (!added || !due) {
            reject("unparseable date");
            continue;
        }
        if (*due < *added) {
            reject("dueDate precedes dateAdded");
            continue;
        }
        result.records.push_back(
            KevEntry{fields[0], fields[1], fields[2], fields[3], *added, fields[5], fields[6], *due});
    }
    if (!header_seen) {
        throw FeedError("KEV file has no header");
    }
    dedupe_rows(result, [](const KevEntry& e) { return e.cve_id; });
    return result;
}

CsvParseResult<KevEntry> parse_kev_csv(const std::filesystem::path& path)
{
    auto in = open_or_throw(path);
    return parse_kev_csv(in);
}

std::vector<CpeEntry> normalize_cpe_entries(const std::vector<CpeEntry>& entries)
{
    std::vector<CpeEntry> out;
    for (const auto& e : entries) {
        auto tag = lowercase(e.language_tag);
        std::replace(tag.begin(), tag.end(), '_', '-');
        if (!e.deprecated && tag == "en-us") {
            out.push_back(e);
        }
    }
    return out;
}

std::string_view to_string(FindingKind k)
{
    switch (k) {
    case FindingKind::DanglingReference: return "dangling_reference";
    case FindingKind::Duplicate: return "duplicate";
    case FindingKind::OutOfRange: return "out_of_range";
    }
    return "?";
}

std::size_t ValidationReport::count(FindingKind kind) const
{
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(), [kind](const Finding& f) { return f.kind == kind; }));
}

ValidationReport validate_snapshot(const Snapshot& s)
{
    ValidationReport report;
    auto add = [&report](FindingKind kind, SourceKind source, std::string key, std::string detail) {
        report.findings.push_back({kind, source, std::move(key), std::move(detail)});
    };

    auto key_set = [&](const auto& items, SourceKind source, auto key) {
        std::set<std::string> keys;
        for (const auto& item : items) {
            auto k = key(item);
            if (!keys.insert(k).second) {
                add(FindingKind::Duplicate, source, k, "primary key appears more than once");
            }
        }
        return keys;
    };

    const auto cves = key_set(s.cves, SourceKind::Cve, [](const CveRecord& r) { return r.cve_id; });
    const auto cpes = key_set(s.cpes, SourceKind::Cpe, [](const CpeEntry& r) { return r.cpe_id; });
    const auto cwes = key_set(s.cwes, SourceKind::Cwe, [](const CweEntry& r) { return r.cwe_id; });
    const auto capecs = key_set(s.capecs, SourceKind::Capec, [](const CapecEntry& r) { return r.capec_id; });
    const auto techniques =
        key_set(s.techniques, SourceKind::Technique, [](const AttackTechnique& r) { return r.technique_id; });
    const auto tactics = key_set(s.tactics, SourceKind::Tactic, [](const AttackTactic& r) { return r.tactic_id; });
    key_set(s.groups, SourceKind::Group, [](const AttackGroupRaw& r) { return r.group_id; });
    key_set(s.epss, SourceKind::Epss, [](const EpssScore& r) { return r.cve_id; });
    key_set(s.kev, SourceKind::Kev, [](const KevEntry& r) { return r.cve_id; });
    key_set(s.exploits, SourceKind::Exploit, [](const ExploitRef& r) { return primary_key(r); });
    key_set(s.references, SourceKind::Reference, [](const NvdReference& r) { return r.url; });

    auto dangling = [&](SourceKind source, const std::string& owner, const std::vector<std::string>& refs,
                        const std::set<std::string>& targets, std::string_view what) {
        for (const auto& ref : refs) {
            if (!targets.contains(ref)) {
                add(FindingKind::DanglingReference, source, owner, std::string(what) + " " + ref + " not present");
            }
        }
    };

    for (const auto& r : s.cves) {
        dangling(SourceKind::Cve, r.cve_id, r.cwe_ids, cwes, "CWE");
        dangling(SourceKind::Cve, r.cve_id, r.affected_cpes, cpes, "CPE");
        if (r.modified < r.published) {
            add(FindingKind::OutOfRange, SourceKind::Cve, r.cve_id, "modified precedes published");
        }
        if (r.cvss_base && (*r.cvss_base < 0.0 || *r.cvss_base > 10.0)) {
            add(FindingKind::OutOfRange, SourceKind::Cve, r.cve_id, "cvss_base outside [0,10]");
        }
    }
    for (const auto& r : s.cwes) {
        dangling(SourceKind::Cwe, r.cwe_id, r.related_capecs, capecs, "CAPEC");
    }
    for (const auto& r : s.capecs) {
        dangling(SourceKind::Capec, r.capec_id, r.related_techniques, techniques, "technique");
    }
    for (const auto& r : s.techniques) {
        dangling(SourceKind::Technique, r.technique_id, r.tactic_ids, tactics, "tactic");
    }
    for (const auto& r : s.groups) {
        dangling(SourceKind::Group, r.group_id, r.technique_ids, techniques, "technique");
    }
    for (const auto& r : s.epss) {
        dangling(SourceKind::Epss, r.cve_id, {r.cve_id}, cves, "CVE");
        if (r.probability < 0.0 || r.probability > 1.0 || r.percentile < 0.0 || r.percentile > 1.0) {
            add(FindingKind::OutOfRange, SourceKind::Epss, r.cve_id, "score outside [0,1]");
        }
    }
    for (const auto& r : s.kev) {
        dangling(SourceKind::Kev, r.cve_id, {r.cve_id}, cves, "CVE");
        if (r.due_date < r.date_added) {
            add(FindingKind::OutOfRange, SourceKind::Kev, r.cve_id, "due_date precedes date_added");
        }
    }
    for (const auto& r : s.exploits) {
        dangling(SourceKind::Exploit, primary_key(r), r.cve_ids, cves, "CVE");
    }
    return report;
}

}  // namespace vulnrank
