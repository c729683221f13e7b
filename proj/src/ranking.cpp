#include "vulnrank/ranking.hpp"

#include <algorithm>
#include <map>

#include "vulnrank/csv.hpp"

namespace vulnrank {

namespace {

constexpr std::array<std::string_view, 4> kPolicyNames{"cvss_base", "apt_threat", "general_threat", "ideal"};

std::vector<std::string> neighbor_keys(const PropertyGraph& graph, NodeId id, EdgeType type, Direction dir)
{
    std::vector<std::string> out;
    for (NodeId n : graph.neighbors(id, type, dir)) {
        out.push_back(graph.node(n).key);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<double> number_prop(const nlohmann::json& props, const char* name)
{
    auto it = props.find(name);
    if (it == props.end() || !it->is_number()) {
        return std::nullopt;
    }
    return it->get<double>();
}

std::optional<std::string> string_prop(const nlohmann::json& props, const char* name)
{
    auto it = props.find(name);
    if (it == props.end() || !it->is_string()) {
        return std::nullopt;
    }
    return it->get<std::string>();
}

std::optional<Date> date_prop(const nlohmann::json& props, const char* name)
{
    auto s = string_prop(props, name);
    return s ? Date::parse(*s) : std::nullopt;
}

bool contains(const std::vector<std::string>& v, std::string_view s)
{
    return std::find(v.begin(), v.end(), s) != v.end();
}

bool in_scope(const GroupFacts& g, const std::vector<std::string>& scope)
{
    return std::any_of(g.sectors.begin(), g.sectors.end(), [&](const auto& s) { return contains(scope, s); });
}

SkillLevel as_skill_level(AdversarySkill s) { return s == AdversarySkill::Low ? SkillLevel::Low : SkillLevel::High; }

}  // namespace

std::string_view to_string(Policy p) { return kPolicyNames[static_cast<std::size_t>(p)]; }

std::optional<Policy> parse_policy(std::string_view s)
{
    for (std::size_t i = 0; i < kPolicyNames.size(); ++i) {
        if (kPolicyNames[i] == s) {
            return static_cast<Policy>(i);
        }
    }
    return std::nullopt;
}

std::string_view to_string(IdealMode m) { return m == IdealMode::Apt ? "apt" : "general"; }

std::optional<IdealMode> parse_ideal_mode(std::string_view s)
{
    if (s == "apt") {
        return IdealMode::Apt;
    }
    if (s == "general") {
        return IdealMode::General;
    }
    return std::nullopt;
}

std::string_view to_string(AdversarySkill s) { return s == AdversarySkill::Low ? "Low" : "High"; }

std::optional<AdversarySkill> parse_adversary_skill(std::string_view s)
{
    if (s == "Low" || s == "low") {
        return AdversarySkill::Low;
    }
    if (s == "High" || s == "high") {
        return AdversarySkill::High;
    }
    return std::nullopt;
}

void PolicyConfig::validate() const
{
    if (!(epss_threshold >= 0.0 && epss_threshold <= 1.0)) {
        throw ConfigError("epss_threshold must lie in [0,1]");
    }
    if (risk_appetite < 0 || risk_appetite > 100) {
        throw ConfigError("risk_appetite must lie in [0,100]");
    }
    if (k < 1) {
        throw ConfigError("k must be a positive integer");
    }
}

std::optional<OrgContext> OrgContext::from_graph(const PropertyGraph& graph, std::string_view org_id)
{
    auto id = graph.find(NodeLabel::Organization, org_id);
    if (!id) {
        return std::nullopt;
    }
    OrgContext org;
    org.org_id = std::string(org_id);
    if (auto s = neighbor_keys(graph, *id, EdgeType::AffiliatedWith, Direction::Incoming); !s.empty()) {
        org.sector = s.front();
    }
    if (auto c = neighbor_keys(graph, *id, EdgeType::OperatesIn, Direction::Outgoing); !c.empty()) {
        org.country = c.front();
    }
    const auto& props = graph.node(*id).props;
    if (auto it = props.find("sector_scope"); it != props.end() && it->is_array()) {
        org.sector_scope = it->get<std::vector<std::string>>();
    }
    if (org.sector_scope.empty() && !org.sector.empty()) {
        org.sector_scope.push_back(org.sector);
    }
    for (NodeId sw : graph.neighbors(*id, EdgeType::Installs, Direction::Outgoing)) {
        for (NodeId cpe : graph.neighbors(sw, EdgeType::HasVersion, Direction::Outgoing)) {
            org.cpes.insert(graph.node(cpe).key);
        }
    }
    return org;
}

OrgContext OrgContext::from_profile(const OrganizationProfile& profile)
{
    OrgContext org{profile.org_id, profile.sector, profile.country, profile.sector_scope, {}};
    if (org.sector_scope.empty()) {
        org.sector_scope.push_back(org.sector);
    }
    for (const auto& s : profile.software) {
        org.cpes.insert(s.resolved_cpes.begin(), s.resolved_cpes.end());
    }
    return org;
}

FeatureRecord extract_features(const PropertyGraph& graph, const OrgContext& org, std::string_view cve_id,
                               const PolicyConfig& config)
{
    FeatureRecord f;
    f.cve_id = std::string(cve_id);
    f.risk_appetite = config.risk_appetite;
    f.org_id = org.org_id;
    f.sector = org.sector;
    f.sector_scope = org.sector_scope;
    f.org_country = org.country;

    const auto cve = graph.find(NodeLabel::NvdCve, cve_id);
    if (!cve) {
        return f;
    }
    const auto& props = graph.node(*cve).props;
    f.cvss_base = number_prop(props, "cvss_base");
    if (auto av = string_prop(props, "attack_vector")) {
        f.attack_vector = parse_attack_vector(*av);
    }
    f.published = date_prop(props, "published");
    f.modified = date_prop(props, "modified");
    f.epss_probability = number_prop(props, "epss_probability");
    f.epss_percentile = number_prop(props, "epss_percentile");
    f.in_kev = !graph.neighbors(*cve, EdgeType::ExploitsKnown, Direction::Outgoing).empty();
    f.in_exploitdb = !graph.neighbors(*cve, EdgeType::ReferenceExploit, Direction::Outgoing).empty();
    for (NodeId cpe : graph.neighbors(*cve, EdgeType::Affects, Direction::Outgoing)) {
        f.affects_org = f.affects_org || org.cpes.contains(graph.node(cpe).key);
    }

    std::map<std::string, CapecFacts> capecs;
    std::set<NodeId> techniques;
    std::set<TechnicalImpact> impacts;
    for (NodeId cwe : graph.neighbors(*cve, EdgeType::WeakenedBy, Direction::Outgoing)) {
        const auto& cwe_props = graph.node(cwe).props;
        if (auto it = cwe_props.find("technical_impacts"); it != cwe_props.end() && it->is_array()) {
            for (const auto& v : *it) {
                if (auto impact = v.is_string() ? parse_technical_impact(v.get<std::string>()) : std::nullopt) {
                    impacts.insert(*impact);
                }
            }
        }
        for (NodeId capec : graph.neighbors(cwe, EdgeType::KnownAttack, Direction::Outgoing)) {
            const auto& node = graph.node(capec);
            const auto employs = graph.neighbors(capec, EdgeType::Employs, Direction::Outgoing);
            auto skill = string_prop(node.props, "skill_level");
            capecs[node.key] = {node.key, skill ? parse_skill_level(*skill).value_or(SkillLevel::Unknown)
                                                : SkillLevel::Unknown,
                                !employs.empty()};
            techniques.insert(employs.begin(), employs.end());
        }
    }
    f.technical_impacts.assign(impacts.begin(), impacts.end());
    for (auto& [key, facts] : capecs) {
        f.capecs.push_back(std::move(facts));
    }

    std::set<NodeId> groups;
    std::set<std::string> names;
    for (NodeId t : techniques) {
        const auto& node = graph.node(t);
        names.insert(string_prop(node.props, "name").value_or(node.key));
        for (NodeId g : graph.neighbors(t, EdgeType::AchievesGoal, Direction::Incoming)) {
            groups.insert(g);
        }
    }
    f.technique_names.assign(names.begin(), names.end());
    for (NodeId g : groups) {
        f.groups.push_back({graph.node(g).key, neighbor_keys(graph, g, EdgeType::FocusOn, Direction::Outgoing),
                            neighbor_keys(graph, g, EdgeType::Targets, Direction::Outgoing),
                            neighbor_keys(graph, g, EdgeType::Originates, Direction::Outgoing)});
    }
    std::sort(f.groups.begin(), f.groups.end(),
              [](const GroupFacts& a, const GroupFacts& b) { return a.group_id < b.group_id; });
    return f;
}

int FeatureBits::relevance() const
{
    const auto n = static_cast<int>(std::count(bits.begin(), bits.end(), true));
    return std::max(1, n);
}

std::string FeatureBits::to_string() const
{
    std::string s;
    for (bool b : bits) {
        s += b ? '1' : '0';
    }
    return s;
}

bool epss_bit(const FeatureRecord& f, const PolicyConfig& config)
{
    if (!f.epss_probability || *f.epss_probability < config.epss_threshold) {
        return false;
    }
    return f.epss_percentile.value_or(0.0) * 100.0 >= 100.0 - config.risk_appetite;
}

bool exploit_evidence_bit(const FeatureRecord& f) { return f.in_kev || f.in_exploitdb; }

FeatureBits apt_bits(const FeatureRecord& f, const PolicyConfig& config)
{
    FeatureBits out;
    out.bits[0] = f.attack_vector == AttackVector::Network;
    for (const auto& g : f.groups) {
        if (!in_scope(g, f.sector_scope)) {
            continue;
        }
        out.bits[1] = true;
        out.bits[2] = out.bits[2] || contains(g.targeted_countries, f.org_country);
        out.bits[3] = out.bits[3] || config.origin_countries.empty() ||
                      std::any_of(g.origin_countries.begin(), g.origin_countries.end(),
                                  [&](const auto& c) { return config.origin_countries.contains(c); });
    }
    out.bits[4] = epss_bit(f, config);
    out.bits[5] = f.affects_org;
    return out;
}

FeatureBits general_bits(const FeatureRecord& f, const PolicyConfig& config)
{
    static constexpr std::array<TechnicalImpact, 4> kFailure{
        TechnicalImpact::ExecuteUnauthorizedCode, TechnicalImpact::GainPrivileges, TechnicalImpact::ModifyData,
        TechnicalImpact::BypassProtection};
    const auto skill = as_skill_level(config.skill_level);
    FeatureBits out;
    out.bits[0] = f.attack_vector == AttackVector::Network;
    for (const auto& c : f.capecs) {
        if (c.skill == skill) {
            out.bits[1] = true;
            out.bits[2] = out.bits[2] || c.employs_technique;
        }
    }
    out.bits[3] = std::any_of(f.technical_impacts.begin(), f.technical_impacts.end(), [](TechnicalImpact t) {
        return std::find(kFailure.begin(), kFailure.end(), t) != kFailure.end();
    });
    out.bits[4] = epss_bit(f, config);
    out.bits[5] = f.affects_org;
    return out;
}

FeatureBits ideal_bits(const FeatureRecord& f, const PolicyConfig& config, IdealMode mode)
{
    auto out = mode == IdealMode::Apt ? apt_bits(f, config) : general_bits(f, config);
    out.bits[kExploitBit] = exploit_evidence_bit(f);
    return out;
}

double score_policy1(const FeatureRecord& f, std::vector<std::string>* warnings)
{
    if (!f.cvss_base) {
        if (warnings) {
            warnings->push_back(f.cve_id + ": no CVSS base score, scored 0.0");
        }
        return 0.0;
    }
    return *f.cvss_base;
}

int score_policy2(const FeatureRecord& f, const PolicyConfig& config) { return apt_bits(f, config).relevance(); }

int score_policy3(const FeatureRecord& f, const PolicyConfig& config)
{
    return general_bits(f, config).relevance();
}

int score_policy4(const FeatureRecord& f, const PolicyConfig& config, IdealMode mode)
{
    return ideal_bits(f, config, mode).relevance();
}

std::vector<WeeklyCohort> generate_candidates(const PropertyGraph& graph, const OrgContext& org,
                                              const DateRange& range)
{
    std::map<IsoWeek, std::vector<std::string>> weeks;
    for (const auto& cve_id : cves_affecting(graph, org.cpes)) {
        const auto& props = graph.node(*graph.find(NodeLabel::NvdCve, cve_id)).props;
        const auto modified = date_prop(props, "modified");
        if (modified && range.contains(*modified)) {
            weeks[iso_week(*modified)].push_back(cve_id);
        }
    }
    std::vector<WeeklyCohort> out;
    for (auto& [week, ids] : weeks) {
        // cves_affecting yields a sorted set, so ids are already ordered and unique.
        out.push_back({org.org_id, week, std::move(ids)});
    }
    return out;
}

void order_scored(std::vector<ScoredCve>& items)
{
    std::sort(items.begin(), items.end(), [](const ScoredCve& a, const ScoredCve& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.cve_id < b.cve_id;
    });
}

RankedList rank_scored(std::string org_id, Policy policy, IsoWeek week, std::vector<ScoredCve> scored)
{
    order_scored(scored);
    RankedList list{std::move(org_id), policy, week, {}};
    list.items.reserve(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) {
        auto& s = scored[i];
        list.items.push_back({std::move(s.cve_id), s.score, i + 1, s.cvss_base, std::move(s.feature_bits)});
    }
    return list;
}

ScoredCve score_cve(const FeatureRecord& f, Policy policy, const PolicyConfig& config,
                    std::vector<std::string>* warnings)
{
    ScoredCve s{f.cve_id, 0.0, f.cvss_base, {}};
    std::optional<FeatureBits> bits;
    switch (policy) {
    case Policy::CvssBase:
        s.score = score_policy1(f, warnings);
        break;
    case Policy::AptThreat:
        bits = apt_bits(f, config);
        break;
    case Policy::GeneralThreat:
        bits = general_bits(f, config);
        break;
    case Policy::Ideal:
        bits = ideal_bits(f, config, config.ideal_mode);
        break;
    }
    if (bits) {
        s.score = bits->relevance();
        s.feature_bits = bits->to_string();
    }
    return s;
}

RankedList rank(const PropertyGraph& graph, const OrgContext& org, const WeeklyCohort& cohort, Policy policy,
                const PolicyConfig& config, std::vector<std::string>* warnings)
{
    std::vector<ScoredCve> scored;
    scored.reserve(cohort.cve_ids.size());
    for (const auto& id : cohort.cve_ids) {
        scored.push_back(score_cve(extract_features(graph, org, id, config), policy, config, warnings));
    }
    return rank_scored(cohort.org_id, policy, cohort.week, std::move(scored));
}

void write_ranked_csv_header(std::ostream& out) { out << "org,policy,iso_week,rank,cve,score,feature_bits\n"; }

void write_ranked_csv_rows(std::ostream& out, const RankedList& list)
{
    const auto week = list.week.to_string();
    for (const auto& item : list.items) {
        out << csv::join({list.org_id, std::string(to_string(list.policy)), week, std::to_string(item.rank),
                          item.cve_id, csv::format_number(item.score), item.feature_bits})
            << '\n';
    }
}

}  // namespace vulnrank
