#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vulnrank/date.hpp"

namespace vulnrank {

enum class AttackVector { Network, Adjacent, Local, Physical };

// CWE technical impact categories.
enum class TechnicalImpact {
    ReadData,
    ModifyData,
    DenyServiceUnreliableExecution,
    DenyServiceResourceConsumption,
    ExecuteUnauthorizedCode,
    GainPrivileges,
    BypassProtection,
    HideActivities,
};

enum class SkillLevel { Low, Medium, High, Unknown };

enum class SourceKind { Cve, Cpe, Cwe, Capec, Technique, Tactic, Group, Epss, Kev, Exploit, Reference };

std::string_view to_string(AttackVector v);
std::string_view to_string(TechnicalImpact v);
std::string_view to_string(SkillLevel v);
std::string_view to_string(SourceKind v);

std::optional<AttackVector> parse_attack_vector(std::string_view s);
std::optional<TechnicalImpact> parse_technical_impact(std::string_view s);
std::optional<SkillLevel> parse_skill_level(std::string_view s);
std::optional<SourceKind> parse_source_kind(std::string_view s);

bool is_cve_id(std::string_view s);
bool is_cwe_id(std::string_view s);
bool is_capec_id(std::string_view s);
bool is_technique_id(std::string_view s);
bool is_tactic_id(std::string_view s);
bool is_group_id(std::string_view s);

struct CveRecord {
    std::string cve_id;
    std::string description;
    Date published;
    Date modified;
    // Absent while a CVE awaits analysis.
    std::optional<double> cvss_base;
    std::optional<AttackVector> attack_vector;
    std::vector<std::string> cwe_ids;
    std::vector<std::string> affected_cpes;
    std::vector<std::string> reference_urls;

    bool operator==(const CveRecord&) const = default;
};

struct CpeEntry {
    std::string cpe_id;
    std::string vendor;
    std::string product;
    bool deprecated{false};
    std::string language_tag;

    bool operator==(const CpeEntry&) const = default;
};

struct CweEntry {
    std::string cwe_id;
    std::string name;
    std::vector<TechnicalImpact> technical_impacts;
    std::vector<std::string> related_capecs;

    bool operator==(const CweEntry&) const = default;
};

struct CapecEntry {
    std::string capec_id;
    std::string name;
    SkillLevel skill_level{SkillLevel::Unknown};
    std::vector<std::string> related_techniques;

    bool operator==(const CapecEntry&) const = default;
};

struct AttackTechnique {
    std::string technique_id;
    std::string name;
    std::vector<std::string> tactic_ids;

    bool operator==(const AttackTechnique&) const = default;
};

struct AttackTactic {
    std::string tactic_id;
    std::string name;

    bool operator==(const AttackTactic&) const = default;
};

struct AttackGroupRaw {
    std::string group_id;
    std::string name;
    std::string description;
    Date created;
    std::vector<std::string> technique_ids;

    bool operator==(const AttackGroupRaw&) const = default;
};

struct EpssScore {
    std::string cve_id;
    double probability{0.0};
    double percentile{0.0};

    bool operator==(const EpssScore&) const = default;
};

struct KevEntry {
    std::string cve_id;
    std::string vendor_project;
    std::string product;
    std::string vulnerability_name;
    Date date_added;
    std::string short_description;
    std::string required_action;
    Date due_date;

    bool operator==(const KevEntry&) const = default;
};

struct ExploitRef {
    std::int64_t exploitdb_id{0};
    std::vector<std::string> cve_ids;

    bool operator==(const ExploitRef&) const = default;
};

struct NvdReference {
    std::string url;
    std::string source;
    std::vector<std::string> tags;

    bool operator==(const NvdReference&) const = default;
};

// Canonical records of every source kind. Vectors keep input order.
struct Snapshot {
    std::vector<CveRecord> cves;
    std::vector<CpeEntry> cpes;
    std::vector<CweEntry> cwes;
    std::vector<CapecEntry> capecs;
    std::vector<AttackTechnique> techniques;
    std::vector<AttackTactic> tactics;
    std::vector<AttackGroupRaw> groups;
    std::vector<EpssScore> epss;
    std::vector<KevEntry> kev;
    std::vector<ExploitRef> exploits;
    std::vector<NvdReference> references;

    std::size_t size() const;
    void append(const Snapshot& other);

    // Resolves duplicate primary keys: CVEs keep the latest `modified` (later
    // input wins on equal dates), every other kind keeps the last occurrence.
    // Returns one message per dropped duplicate.
    std::vector<std::string> deduplicate();

    bool operator==(const Snapshot&) const = default;
};

// Primary key of a record as used for duplicate detection.
std::string primary_key(const ExploitRef& e);

nlohmann::json to_json(const CveRecord& r);
nlohmann::json to_json(const CpeEntry& r);
nlohmann::json to_json(const CweEntry& r);
nlohmann::json to_json(const CapecEntry& r);
nlohmann::json to_json(const AttackTechnique& r);
nlohmann::json to_json(const AttackTactic& r);
nlohmann::json to_json(const AttackGroupRaw& r);
nlohmann::json to_json(const EpssScore& r);
nlohmann::json to_json(const KevEntry& r);
nlohmann::json to_json(const ExploitRef& r);
nlohmann::json to_json(const NvdReference& r);

// Normalized snapshot text: one record per line, kinds in enum order.
std::string serialize_snapshot(const Snapshot& snapshot);

}  // namespace vulnrank
