#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vulnrank/date.hpp"
#include "vulnrank/kgraph.hpp"
#include "vulnrank/profiles.hpp"
#include "vulnrank/records.hpp"

namespace vulnrank {

enum class Policy { CvssBase, AptThreat, GeneralThreat, Ideal };
enum class IdealMode { Apt, General };
enum class AdversarySkill { Low, High };

// cvss_base | apt_threat | general_threat | ideal
std::string_view to_string(Policy p);
std::optional<Policy> parse_policy(std::string_view s);
std::string_view to_string(IdealMode m);
std::optional<IdealMode> parse_ideal_mode(std::string_view s);
std::string_view to_string(AdversarySkill s);
std::optional<AdversarySkill> parse_adversary_skill(std::string_view s);

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct PolicyConfig {
    Policy policy{Policy::AptThreat};
    std::set<std::string> origin_countries{"China", "Iran", "Russia"};
    AdversarySkill skill_level{AdversarySkill::High};
    double epss_threshold{0.876};
    int risk_appetite{100};
    int k{20};
    IdealMode ideal_mode{IdealMode::Apt};

    // Throws ConfigError naming the offending field.
    void validate() const;
};

// The organization as seen through the graph.
struct OrgContext {
    std::string org_id;
    std::string sector;
    std::string country;
    std::vector<std::string> sector_scope;
    std::set<std::string> cpes;

    static std::optional<OrgContext> from_graph(const PropertyGraph& graph, std::string_view org_id);
    static OrgContext from_profile(const OrganizationProfile& profile);
};

struct GroupFacts {
    std::string group_id;
    std::vector<std::string> sectors;
    std::vector<std::string> targeted_countries;
    std::vector<std::string> origin_countries;
};

struct CapecFacts {
    std::string capec_id;
    SkillLevel skill{SkillLevel::Unknown};
    bool employs_technique{false};
};

// Everything the policies look at for one (CVE, organization) pairing.
// Optional fields are absent when the graph holds no value.
struct FeatureRecord {
    std::string cve_id;
    std::optional<double> cvss_base;
    std::optional<AttackVector> attack_vector;
    std::optional<Date> published;
    std::optional<Date> modified;
    std::vector<CapecFacts> capecs;
    std::vector<std::string> technique_names;
    // Groups using a technique reachable from the CVE's weaknesses.
    std::vector<GroupFacts> groups;
    std::vector<TechnicalImpact> technical_impacts;
    int risk_appetite{100};
    std::optional<double> epss_probability;
    std::optional<double> epss_percentile;
    bool in_kev{false};
    bool in_exploitdb{false};
    bool affects_org{false};
    std::string org_id;
    std::string sector;
    std::vector<std::string> sector_scope;
    std::string org_country;
};

FeatureRecord extract_features(const PropertyGraph& graph, const OrgContext& org, std::string_view cve_id,
                               const PolicyConfig& config);

struct FeatureBits {
    std::array<bool, 6> bits{};

    int relevance() const;
    // "101101", first bit first.
    std::string to_string() const;
};

// Bit 5 (index 4) is the exploitation bit in every layout.
inline constexpr std::size_t kExploitBit = 4;

bool epss_bit(const FeatureRecord& f, const PolicyConfig& config);
bool exploit_evidence_bit(const FeatureRecord& f);

// network, sector group, country target, origin, EPSS, affects
FeatureBits apt_bits(const FeatureRecord& f, const PolicyConfig& config);
// network, skill-matched CAPEC, CAPEC employs a technique, failure impact, EPSS, affects
FeatureBits general_bits(const FeatureRecord& f, const PolicyConfig& config);
FeatureBits ideal_bits(const FeatureRecord& f, const PolicyConfig& config, IdealMode mode);

// Missing base score scores 0.0 and appends a warning when `warnings` is given.
double score_policy1(const FeatureRecord& f, std::vector<std::string>* warnings = nullptr);
int score_policy2(const FeatureRecord& f, const PolicyConfig& config);
int score_policy3(const FeatureRecord& f, const PolicyConfig& config);
int score_policy4(const FeatureRecord& f, const PolicyConfig& config, IdealMode mode);

struct WeeklyCohort {
    std::string org_id;
    IsoWeek week;
    std::vector<std::string> cve_ids;  // sorted, unique
};

// CVEs affecting the organization's CPEs whose modification date falls in
// `range`, grouped by ISO week of that date. Weeks in ascending order.
std::vector<WeeklyCohort> generate_candidates(const PropertyGraph& graph, const OrgContext& org,
                                              const DateRange& range);

struct ScoredCve {
    std::string cve_id;
    double score{0.0};
    std::optional<double> cvss_base;
    std::string feature_bits;
};

// Descending score, then ascending CVE-ID.
void order_scored(std::vector<ScoredCve>& items);

struct RankedItem {
    std::string cve_id;
    double score{0.0};
    std::size_t rank{0};
    std::optional<double> cvss_base;
    std::string feature_bits;
};

struct RankedList {
    std::string org_id;
    Policy policy{Policy::CvssBase};
    IsoWeek week;
    std::vector<RankedItem> items;
};

RankedList rank_scored(std::string org_id, Policy policy, IsoWeek week, std::vector<ScoredCve> scored);

ScoredCve score_cve(const FeatureRecord& f, Policy policy, const PolicyConfig& config,
                    std::vector<std::string>* warnings = nullptr);

RankedList rank(const PropertyGraph& graph, const OrgContext& org, const WeeklyCohort& cohort, Policy policy,
                const PolicyConfig& config, std::vector<std::string>* warnings = nullptr);

// org,policy,iso_week,rank,cve,score,feature_bits
void write_ranked_csv_header(std::ostream& out);
void write_ranked_csv_rows(std::ostream& out, const RankedList& list);

}  // namespace vulnrank
