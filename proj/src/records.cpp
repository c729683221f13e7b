#include "vulnrank/records.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <unordered_map>
#include <utility>

namespace vulnrank {

namespace {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<AttackVector, 4> kAttackVectors{{
    {AttackVector::Network, "NETWORK"},
    {AttackVector::Adjacent, "ADJACENT"},
    {AttackVector::Local, "LOCAL"},
    {AttackVector::Physical, "PHYSICAL"},
}};

constexpr NameTable<TechnicalImpact, 8> kImpacts{{
    {TechnicalImpact::ReadData, "ReadData"},
    {TechnicalImpact::ModifyData, "ModifyData"},
    {TechnicalImpact::DenyServiceUnreliableExecution, "DenyServiceUnreliableExecution"},
    {TechnicalImpact::DenyServiceResourceConsumption, "DenyServiceResourceConsumption"},
    {TechnicalImpact::ExecuteUnauthorizedCode, "ExecuteUnauthorizedCode"},
    {TechnicalImpact::GainPrivileges, "GainPrivileges"},
    {TechnicalImpact::BypassProtection, "BypassProtection"},
    {TechnicalImpact::HideActivities, "HideActivities"},
}};

constexpr NameTable<SkillLevel, 4> kSkills{{
    {SkillLevel::Low, "Low"},
    {SkillLevel::Medium, "Medium"},
    {SkillLevel::High, "High"},
    {SkillLevel::Unknown, "Unknown"},
}};

constexpr NameTable<SourceKind, 11> kKinds{{
    {SourceKind::Cve, "cve"},
    {SourceKind::Cpe, "cpe"},
    {SourceKind::Cwe, "cwe"},
    {SourceKind::Capec, "capec"},
    {SourceKind::Technique, "technique"},
    {SourceKind::Tactic, "tactic"},
    {SourceKind::Group, "group"},
    {SourceKind::Epss, "epss"},
    {SourceKind::Kev, "kev"},
    {SourceKind::Exploit, "exploit"},
    {SourceKind::Reference, "reference"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const NameTable<E, N>& table, E value)
{
    for (const auto& [e, name] : table) {
        if (e == value) {
            return name;
        }
    }
    return "?";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const NameTable<E, N>& table, std::string_view name)
{
    for (const auto& [e, n] : table) {
        if (n == name) {
            return e;
        }
    }
    return std::nullopt;
}

bool all_digits(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool prefixed_number(std::string_view s, std::string_view prefix)
{
    return s.size() > prefix.size() && s.substr(0, prefix.size()) == prefix && all_digits(s.substr(prefix.size()));
}

// Keeps the last occurrence of every key, in the order of those last occurrences.
template <typename T, typename KeyFn>
void keep_last(std::vector<T>& items, KeyFn key, std::string_view kind, std::vector<std::string>& messages)
{
    std::unordered_map<std::string, std::size_t> last;
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto [it, inserted] = last.try_emplace(key(items[i]), i);
        if (!inserted) {
            messages.push_back(std::string(kind) + " " + it->first + ": duplicate, keeping later record");
            it->second = i;
        }
    }
    if (last.size() == items.size()) {
        return;
    }
    std::vector<T> kept;
    kept.reserve(last.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (last.at(key(items[i])) == i) {
            kept.push_back(std::move(items[i]));
        }
    }
    items = std::move(kept);
}

template <typename T>
void append_all(std::vector<T>& dst, const std::vector<T>& src)
{
    dst.insert(dst.end(), src.begin(), src.end());
}

nlohmann::json optional_json(const std::optional<double>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string_view to_string(AttackVector v) { return name_of(kAttackVectors, v); }
std::string_view to_string(TechnicalImpact v) { return name_of(kImpacts, v); }
std::string_view to_string(SkillLevel v) { return name_of(kSkills, v); }
std::string_view to_string(SourceKind v) { return name_of(kKinds, v); }

std::optional<AttackVector> parse_attack_vector(std::string_view s) { return value_of(kAttackVectors, s); }
std::optional<TechnicalImpact> parse_technical_impact(std::string_view s) { return value_of(kImpacts, s); }
std::optional<SkillLevel> parse_skill_level(std::string_view s) { return value_of(kSkills, s); }
std::optional<SourceKind> parse_source_kind(std::string_view s) { return value_of(kKinds, s); }

bool is_cve_id(std::string_view s)
{
    // CVE-<4-digit year>-<4+ digits>
    if (s.size() < 13 || s.substr(0, 4) != "CVE-" || s[8] != '-') {
        return false;
    }
    return all_digits(s.substr(4, 4)) && all_digits(s.substr(9)) && s.size() - 9 >= 4;
}

bool is_cwe_id(std::string_view s) { return prefixed_number(s, "CWE-"); }
bool is_capec_id(std::string_view s) { return prefixed_number(s, "CAPEC-"); }
bool is_tactic_id(std::string_view s) { return prefixed_number(s, "TA"); }
bool is_group_id(std::string_view s) { return prefixed_number(s, "G"); }

bool is_technique_id(std::string_view s)
{
    if (s.size() < 2 || s[0] != 'T') {
        return false;
    }
    const auto dot = s.find('.');
    if (dot == std::string_view::npos) {
        return all_digits(s.substr(1));
    }
    return all_digits(s.substr(1, dot - 1)) && all_digits(s.substr(dot + 1));
}

std::size_t Snapshot::size() const
{
    return cves.size() + cpes.size() + cwes.size() + capecs.size() + techniques.size() + tactics.size() +
           groups.size() + epss.size() + kev.size() + exploits.size() + references.size();
}

void Snapshot::append(const Snapshot& other)
{
    append_all(cves, other.cves);
    append_all(cpes, other.cpes);
    append_all(cwes, other.cwes);
    append_all(capecs, other.capecs);
    append_all(techniques, other.techniques);
    append_all(tactics, other.tactics);
    append_all(groups, other.groups);
    append_all(epss, other.epss);
    append_all(kev, other.kev);
    append_all(exploits, other.exploits);
    append_all(references, other.references);
}

std::string primary_key(const ExploitRef& e) { return std::to_string(e.exploitdb_id); }

std::vector<std::string> Snapshot::deduplicate()
{
    std::vector<std::string> messages;

    // CVEs: the record with the latest modification date wins.
    {
        std::map<std::string, std::size_t> winner;
        for (std::size_t i = 0; i < cves.size(); ++i) {
            auto [it, inserted] = winner.try_emplace(cves[i].cve_id, i);
            if (!inserted) {
                messages.push_back("cve " + cves[i].cve_id + ": duplicate, keeping latest modification");
                if (cves[it->second].modified <= cves[i].modified) {
                    it->second = i;
                }
            }
        }
        if (winner.size() != cves.size()) {
            std::vector<CveRecord> kept;
            for (std::size_t i = 0; i < cves.size(); ++i) {
                if (winner.at(cves[i].cve_id) == i) {
                    kept.push_back(std::move(cves[i]));
                }
            }
            cves = std::move(kept);
        }
    }
    keep_last(cpes, [](const CpeEntry& r) { return r.cpe_id; }, "cpe", messages);
    keep_last(cwes, [](const CweEntry& r) { return r.cwe_id; }, "cwe", messages);
    keep_last(capecs, [](const CapecEntry& r) { return r.capec_id; }, "capec", messages);
    keep_last(techniques, [](const AttackTechnique& r) { return r.technique_id; }, "technique", messages);
    keep_last(tactics, [](const AttackTactic& r) { return r.tactic_id; }, "tactic", messages);
    keep_last(groups, [](const AttackGroupRaw& r) { return r.group_id; }, "group", messages);
    keep_last(epss, [](const EpssScore& r) { return r.cve_id; }, "epss", messages);
    keep_last(kev, [](const KevEntry& r) { return r.cve_id; }, "kev", messages);
    keep_last(exploits, [](const ExploitRef& r) { return primary_key(r); }, "exploit", messages);
    keep_last(references, [](const NvdReference& r) { return r.url; }, "reference", messages);
    return messages;
}

nlohmann::json to_json(const CveRecord& r)
{
    nlohmann::json j{
        {"kind", "cve"},
        {"cve_id", r.cve_id},
        {"description", r.description},
        {"published", r.published.to_string()},
        {"modified", r.modified.to_string()},
        {"cvss_base", optional_json(r.cvss_base)},
        {"cwe_ids", r.cwe_ids},
        {"affected_cpes", r.affected_cpes},
        {"reference_urls", r.reference_urls},
    };
    j["attack_vector"] = r.attack_vector ? nlohmann::json(to_string(*r.attack_vector)) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const CpeEntry& r)
{
    return {{"kind", "cpe"},           {"cpe_id", r.cpe_id},         {"vendor", r.vendor},
            {"product", r.product},    {"deprecated", r.deprecated}, {"language_tag", r.language_tag}};
}

nlohmann::json to_json(const CweEntry& r)
{
    nlohmann::json impacts = nlohmann::json::array();
    for (auto impact : r.technical_impacts) {
        impacts.push_back(to_string(impact));
    }
    return {{"kind", "cwe"},
            {"cwe_id", r.cwe_id},
            {"name", r.name},
            {"technical_impacts", impacts},
            {"related_capecs", r.related_capecs}};
}

nlohmann::json to_json(const CapecEntry& r)
{
    return {{"kind", "capec"},
            {"capec_id", r.capec_id},
            {"name", r.name},
            {"skill_level", to_string(r.skill_level)},
            {"related_techniques", r.related_techniques}};
}

nlohmann::json to_json(const AttackTechnique& r)
{
    return {{"kind", "technique"}, {"technique_id", r.technique_id}, {"name", r.name}, {"tactic_ids", r.tactic_ids}};
}

nlohmann::json to_json(const AttackTactic& r)
{
    return {{"kind", "tactic"}, {"tactic_id", r.tactic_id}, {"name", r.name}};
}

nlohmann::json to_json(const AttackGroupRaw& r)
{
    return {{"kind", "group"},
            {"group_id", r.group_id},
            {"name", r.name},
            {"description", r.description},
            {"created", r.created.to_string()},
            {"technique_ids", r.technique_ids}};
}

nlohmann::json to_json(const EpssScore& r)
{
    return {{"kind", "epss"}, {"cve_id", r.cve_id}, {"probability", r.probability}, {"percentile", r.percentile}};
}

nlohmann::json to_json(const KevEntry& r)
{
    return {{"kind", "kev"},
            {"cve_id", r.cve_id},
            {"vendor_project", r.vendor_project},
            {"product", r.product},
            {"vulnerability_name", r.vulnerability_name},
            {"date_added", r.date_added.to_string()},
            {"short_description", r.short_description},
            {"required_action", r.required_action},
            {"due_date", r.due_date.to_string()}};
}

nlohmann::json to_json(const ExploitRef& r)
{
    return {{"kind", "exploit"}, {"exploitdb_id", r.exploitdb_id}, {"cve_ids", r.cve_ids}};
}

nlohmann::json to_json(const NvdReference& r)
{
    return {{"kind", "reference"}, {"url", r.url}, {"source", r.source}, {"tags", r.tags}};
}

std::string serialize_snapshot(const Snapshot& s)
{
    std::string out;
    auto emit = [&out](const auto& items) {
        for (const auto& item : items) {
            out += to_json(item).dump();
            out += '\n';
        }
    };
    emit(s.cves);
    emit(s.cpes);
    emit(s.cwes);
    emit(s.capecs);
    emit(s.techniques);
    emit(s.tactics);
    emit(s.groups);
    emit(s.epss);
    emit(s.kev);
    emit(s.exploits);
    emit(s.references);
    return out;
}

}  // namespace vulnrank
