#include "vulnrank/kgraph.hpp"

#include <algorithm>
#include <tuple>

#include "vulnrank/feeds.hpp"

namespace vulnrank {

namespace {

constexpr std::array<std::string_view, kNodeLabelCount> kLabelNames{
    "NvdCve",  "ExploitDb",        "CisaExploitCatalog", "Cwe",     "Capec",        "AttackEnterpriseTechnique",
    "AttackEnterpriseTactic", "AttackGroup", "Country", "DhsSector", "Cpe", "Organization", "Software",
    "NvdReference",
};

constexpr std::array<std::string_view, kEdgeTypeCount> kEdgeNames{
    "ReferenceExploit", "ExploitsKnown", "WeakenedBy", "KnownAttack", "Employs",       "AchievesGoal",
    "Originates",       "Targets",       "FocusOn",    "AchievedThrough", "Affects", "AffiliatedWith",
    "OperatesIn",       "Installs",      "HasVersion", "Informs",
};

// Collects edges during a build, dropping those whose endpoints are absent.
class Builder {
public:
    Builder(PropertyGraph& graph, BuildStats& stats) : graph_{graph}, stats_{stats} {}

    void link(NodeId source, EdgeType type, NodeLabel target_label, const std::string& target_key)
    {
        auto target = graph_.find(target_label, target_key);
        if (!target) {
            dangling(std::string(to_string(type)) + " -> " + std::string(to_string(target_label)) + " " +
                     target_key);
            return;
        }
        link(source, type, *target);
    }

    void link(NodeId source, EdgeType type, NodeId target)
    {
        if (graph_.add_edge(source, type, target) == EdgeStatus::SchemaViolation) {
            ++stats_.schema_rejected;
        }
    }

    void dangling(std::string what)
    {
        ++stats_.dangling_dropped;
        if (stats_.dangling_samples.size() < 50) {
            stats_.dangling_samples.push_back(std::move(what));
        }
    }

private:
    PropertyGraph& graph_;
    BuildStats& stats_;
};

std::string software_key(const SoftwareItem& s)
{
    auto key = normalize_token(s.vendor) + ":" + normalize_token(s.product);
    if (s.version && !s.version->empty()) {
        key += ":" + *s.version;
    }
    return key;
}

}  // namespace

std::string_view to_string(NodeLabel label) { return kLabelNames[static_cast<std::size_t>(label)]; }
std::string_view to_string(EdgeType type) { return kEdgeNames[static_cast<std::size_t>(type)]; }

std::optional<NodeLabel> parse_node_label(std::string_view s)
{
    for (std::size_t i = 0; i < kLabelNames.size(); ++i) {
        if (kLabelNames[i] == s) {
            return static_cast<NodeLabel>(i);
        }
    }
    return std::nullopt;
}

std::optional<EdgeType> parse_edge_type(std::string_view s)
{
    for (std::size_t i = 0; i < kEdgeNames.size(); ++i) {
        if (kEdgeNames[i] == s) {
            return static_cast<EdgeType>(i);
        }
    }
    return std::nullopt;
}

std::uint64_t PropertyGraph::edge_key(NodeId source, EdgeType type, NodeId target)
{
    // 28 bits per endpoint leaves room for the 4-bit type.
    return (static_cast<std::uint64_t>(source) << 36) | (static_cast<std::uint64_t>(type) << 32) |
           static_cast<std::uint64_t>(target);
}

void PropertyGraph::check_mutable() const
{
    if (frozen_) {
        throw GraphError("graph is frozen");
    }
}

NodeId PropertyGraph::upsert_node(NodeLabel label, std::string_view key, const nlohmann::json& props)
{
    check_mutable();
    auto& index = index_[static_cast<std::size_t>(label)];
    const std::string k(key);
    if (auto it = index.find(k); it != index.end()) {
        if (props.is_object() && !props.empty()) {
            nodes_[it->second].props.update(props);
        }
        return it->second;
    }
    if (nodes_.size() >= (NodeId{1} << 28)) {
        throw GraphError("node capacity exceeded");
    }
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({id, label, k, props.is_object() ? props : nlohmann::json::object()});
    adjacency_.emplace_back();
    index.emplace(k, id);
    return id;
}

EdgeStatus PropertyGraph::add_edge(NodeId source, EdgeType type, NodeId target)
{
    check_mutable();
    if (!contains(source) || !contains(target)) {
        ++rejected_;
        return EdgeStatus::UnknownEndpoint;
    }
    const auto& schema = schema_of(type);
    if (nodes_[source].label != schema.source || nodes_[target].label != schema.target) {
        ++rejected_;
        return EdgeStatus::SchemaViolation;
    }
    if (!edge_keys_.insert(edge_key(source, type, target)).second) {
        return EdgeStatus::Duplicate;
    }
    const auto t = static_cast<std::size_t>(type);
    adjacency_[source].out[t].push_back(target);
    adjacency_[target].in[t].push_back(source);
    return EdgeStatus::Added;
}

std::optional<NodeId> PropertyGraph::find(NodeLabel label, std::string_view key) const
{
    const auto& index = index_[static_cast<std::size_t>(label)];
    if (auto it = index.find(std::string(key)); it != index.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::span<const NodeId> PropertyGraph::neighbors(NodeId id, EdgeType type, Direction direction) const
{
    if (!contains(id)) {
        return {};
    }
    const auto t = static_cast<std::size_t>(type);
    const auto& adj = adjacency_[id];
    return direction == Direction::Outgoing ? std::span<const NodeId>(adj.out[t]) : std::span<const NodeId>(adj.in[t]);
}

std::vector<Edge> PropertyGraph::edges() const
{
    std::vector<Edge> out;
    out.reserve(edge_keys_.size());
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        for (std::size_t t = 0; t < kEdgeTypeCount; ++t) {
            for (NodeId target : adjacency_[id].out[t]) {
                out.push_back({id, static_cast<EdgeType>(t), target});
            }
        }
    }
    return out;
}

std::vector<NodeId> PropertyGraph::nodes_with_label(NodeLabel label) const
{
    std::vector<NodeId> out;
    for (const auto& [key, id] : index_[static_cast<std::size_t>(label)]) {
        out.push_back(id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void PropertyGraph::freeze()
{
    for (auto& adj : adjacency_) {
        for (auto& v : adj.out) {
            std::sort(v.begin(), v.end());
        }
        for (auto& v : adj.in) {
            std::sort(v.begin(), v.end());
        }
    }
    frozen_ = true;
}

BuildResult build_graph(const Snapshot& records, std::span<const GroupAttribution> attributions,
                        std::span<const OrganizationProfile> profiles)
{
    BuildResult result;
    auto& g = result.graph;
    Builder b{g, result.stats};

    // Vocabulary-like entities first so that references resolve regardless of input order.
    for (const auto& c : normalize_cpe_entries(records.cpes)) {
        g.upsert_node(NodeLabel::Cpe, c.cpe_id, {{"vendor", c.vendor}, {"product", c.product}});
    }
    for (const auto& t : records.tactics) {
        g.upsert_node(NodeLabel::AttackEnterpriseTactic, t.tactic_id, {{"name", t.name}});
    }
    for (const auto& t : records.techniques) {
        const auto id = g.upsert_node(NodeLabel::AttackEnterpriseTechnique, t.technique_id, {{"name", t.name}});
        for (const auto& tactic : t.tactic_ids) {
            if (auto tid = g.find(NodeLabel::AttackEnterpriseTactic, tactic)) {
                b.link(*tid, EdgeType::AchievedThrough, id);
            } else {
                b.dangling("AchievedThrough <- AttackEnterpriseTactic " + tactic);
            }
        }
    }
    for (const auto& c : records.capecs) {
        const auto id = g.upsert_node(NodeLabel::Capec, c.capec_id,
                                      {{"name", c.name}, {"skill_level", to_string(c.skill_level)}});
        for (const auto& t : c.related_techniques) {
            b.link(id, EdgeType::Employs, NodeLabel::AttackEnterpriseTechnique, t);
        }
    }
    for (const auto& c : records.cwes) {
        nlohmann::json impacts = nlohmann::json::array();
        for (auto impact : c.technical_impacts) {
            impacts.push_back(to_string(impact));
        }
        const auto id = g.upsert_node(NodeLabel::Cwe, c.cwe_id, {{"name", c.name}, {"technical_impacts", impacts}});
        for (const auto& capec : c.related_capecs) {
            b.link(id, EdgeType::KnownAttack, NodeLabel::Capec, capec);
        }
    }
    for (const auto& r : records.references) {
        g.upsert_node(NodeLabel::NvdReference, r.url, {{"source", r.source}, {"tags", r.tags}});
    }
    for (const auto& c : records.cves) {
        nlohmann::json props{
            {"description", c.description},
            {"published", c.published.to_string()},
            {"modified", c.modified.to_string()},
        };
        props["cvss_base"] = c.cvss_base ? nlohmann::json(*c.cvss_base) : nlohmann::json(nullptr);
        props["attack_vector"] =
            c.attack_vector ? nlohmann::json(to_string(*c.attack_vector)) : nlohmann::json(nullptr);
        const auto id = g.upsert_node(NodeLabel::NvdCve, c.cve_id, props);
        for (const auto& cwe : c.cwe_ids) {
            b.link(id, EdgeType::WeakenedBy, NodeLabel::Cwe, cwe);
        }
        for (const auto& cpe : c.affected_cpes) {
            b.link(id, EdgeType::Affects, NodeLabel::Cpe, cpe);
        }
        for (const auto& url : c.reference_urls) {
            b.link(id, EdgeType::Informs, g.upsert_node(NodeLabel::NvdReference, url));
        }
    }
    for (const auto& e : records.epss) {
        if (auto id = g.find(NodeLabel::NvdCve, e.cve_id)) {
            g.upsert_node(NodeLabel::NvdCve, e.cve_id,
                          {{"epss_probability", e.probability}, {"epss_percentile", e.percentile}});
        } else {
            b.dangling("EPSS score for absent " + e.cve_id);
        }
    }
    for (const auto& k : records.kev) {
        const auto id = g.upsert_node(NodeLabel::CisaExploitCatalog, k.cve_id,
                                      {{"vendor_project", k.vendor_project},
                                       {"product", k.product},
                                       {"vulnerability_name", k.vulnerability_name},
                                       {"date_added", k.date_added.to_string()},
                                       {"short_description", k.short_description},
                                       {"required_action", k.required_action},
                                       {"due_date", k.due_date.to_string()}});
        if (auto cve = g.find(NodeLabel::NvdCve, k.cve_id)) {
            b.link(*cve, EdgeType::ExploitsKnown, id);
        } else {
            b.dangling("ExploitsKnown <- NvdCve " + k.cve_id);
        }
    }
    for (const auto& x : records.exploits) {
        const auto id = g.upsert_node(NodeLabel::ExploitDb, primary_key(x), {{"exploitdb_id", x.exploitdb_id}});
        for (const auto& cve_id : x.cve_ids) {
            if (auto cve = g.find(NodeLabel::NvdCve, cve_id)) {
                b.link(*cve, EdgeType::ReferenceExploit, id);
            } else {
                b.dangling("ReferenceExploit <- NvdCve " + cve_id);
            }
        }
    }
    for (const auto& grp : records.groups) {
        const auto id = g.upsert_node(NodeLabel::AttackGroup, grp.group_id,
                                      {{"name", grp.name},
                                       {"description", grp.description},
                                       {"created", grp.created.to_string()}});
        for (const auto& t : grp.technique_ids) {
            b.link(id, EdgeType::AchievesGoal, NodeLabel::AttackEnterpriseTechnique, t);
        }
    }
    for (const auto& a : attributions) {
        auto group = g.find(NodeLabel::AttackGroup, a.group_id);
        if (!group) {
            b.dangling("attribution for absent group " + a.group_id);
            continue;
        }
        g.upsert_node(NodeLabel::AttackGroup, a.group_id, {{"origin_year", a.origin_year}});
        for (const auto& c : a.origin_countries) {
            b.link(*group, EdgeType::Originates, g.upsert_node(NodeLabel::Country, c));
        }
        for (const auto& c : a.targeted_countries) {
            b.link(*group, EdgeType::Targets, g.upsert_node(NodeLabel::Country, c));
        }
        for (const auto& s : a.targeted_sectors) {
            b.link(*group, EdgeType::FocusOn, g.upsert_node(NodeLabel::DhsSector, s));
        }
    }
    for (const auto& p : profiles) {
        const auto org = g.upsert_node(NodeLabel::Organization, p.org_id,
                                       {{"name", p.name}, {"sector_scope", p.sector_scope}});
        b.link(g.upsert_node(NodeLabel::DhsSector, p.sector), EdgeType::AffiliatedWith, org);
        b.link(org, EdgeType::OperatesIn, g.upsert_node(NodeLabel::Country, p.country));
        for (const auto& s : p.software) {
            nlohmann::json props{{"vendor", s.vendor}, {"product", s.product}};
            props["version"] = s.version ? nlohmann::json(*s.version) : nlohmann::json(nullptr);
            const auto sw = g.upsert_node(NodeLabel::Software, software_key(s), props);
            b.link(org, EdgeType::Installs, sw);
            for (const auto& cpe : s.resolved_cpes) {
                b.link(sw, EdgeType::HasVersion, NodeLabel::Cpe, cpe);
            }
        }
    }
    g.freeze();
    return result;
}

std::vector<std::string> groups_threatening(const PropertyGraph& graph, std::string_view sector,
                                            std::string_view org_country,
                                            const std::set<std::string>& origin_countries)
{
    std::vector<std::string> out;
    const auto sector_id = graph.find(NodeLabel::DhsSector, sector);
    const auto country_id = graph.find(NodeLabel::Country, org_country);
    if (!sector_id || !country_id) {
        return out;
    }
    for (NodeId group : graph.neighbors(*sector_id, EdgeType::FocusOn, Direction::Incoming)) {
        const auto targets = graph.neighbors(group, EdgeType::Targets, Direction::Outgoing);
        if (std::find(targets.begin(), targets.end(), *country_id) == targets.end()) {
            continue;
        }
        bool origin_ok = origin_countries.empty();
        for (NodeId c : graph.neighbors(group, EdgeType::Originates, Direction::Outgoing)) {
            origin_ok = origin_ok || origin_countries.contains(graph.node(c).key);
        }
        if (origin_ok) {
            out.push_back(graph.node(group).key);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<TechniquePath> techniques_for_cve(const PropertyGraph& graph, std::string_view cve_id)
{
    std::vector<TechniquePath> out;
    const auto cve = graph.find(NodeLabel::NvdCve, cve_id);
    if (!cve) {
        return out;
    }
    for (NodeId cwe : graph.neighbors(*cve, EdgeType::WeakenedBy, Direction::Outgoing)) {
        for (NodeId capec : graph.neighbors(cwe, EdgeType::KnownAttack, Direction::Outgoing)) {
            for (NodeId tech : graph.neighbors(capec, EdgeType::Employs, Direction::Outgoing)) {
                out.push_back({graph.node(tech).key, graph.node(capec).key, graph.node(cwe).key});
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::set<std::string> cves_affecting(const PropertyGraph& graph, const std::set<std::string>& cpe_ids)
{
    std::set<std::string> out;
    for (const auto& cpe : cpe_ids) {
        if (auto id = graph.find(NodeLabel::Cpe, cpe)) {
            for (NodeId cve : graph.neighbors(*id, EdgeType::Affects, Direction::Incoming)) {
                out.insert(graph.node(cve).key);
            }
        }
    }
    return out;
}

void export_graph(const PropertyGraph& graph, std::ostream& out)
{
    std::vector<const Node*> nodes;
    for (const auto& n : graph.nodes()) {
        nodes.push_back(&n);
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const Node* a, const Node* b) { return std::tie(a->label, a->key) < std::tie(b->label, b->key); });
    for (const Node* n : nodes) {
        out << nlohmann::json{{"kind", "node"}, {"label", to_string(n->label)}, {"key", n->key}, {"props", n->props}}
                   .dump()
            << '\n';
    }

    auto edges = graph.edges();
    auto sort_key = [&graph](const Edge& e) {
        const auto& s = graph.node(e.source);
        const auto& t = graph.node(e.target);
        return std::tie(s.key, e.type, t.key, s.label, t.label);
    };
    std::sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) { return sort_key(a) < sort_key(b); });
    for (const auto& e : edges) {
        const auto& s = graph.node(e.source);
        const auto& t = graph.node(e.target);
        out << nlohmann::json{{"kind", "edge"},
                              {"type", to_string(e.type)},
                              {"source_label", to_string(s.label)},
                              {"source", s.key},
                              {"target_label", to_string(t.label)},
                              {"target", t.key}}
                   .dump()
            << '\n';
    }
}

PropertyGraph import_graph(std::istream& in)
{
    PropertyGraph g;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&line_no](const std::string& why) {
        throw GraphError("graph snapshot line " + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            fail(e.what());
        }
        const auto kind = j.value("kind", "");
        if (kind == "node") {
            auto label = parse_node_label(j.value("label", ""));
            if (!label) {
                fail("unknown node label");
            }
            g.upsert_node(*label, j.at("key").get<std::string>(), j.value("props", nlohmann::json::object()));
        } else if (kind == "edge") {
            auto type = parse_edge_type(j.value("type", ""));
            auto sl = parse_node_label(j.value("source_label", ""));
            auto tl = parse_node_label(j.value("target_label", ""));
            if (!type || !sl || !tl) {
                fail("unknown edge type or label");
            }
            auto s = g.find(*sl, j.at("source").get<std::string>());
            auto t = g.find(*tl, j.at("target").get<std::string>());
            if (!s || !t) {
                fail("edge endpoint not declared");
            }
            if (g.add_edge(*s, *type, *t) == EdgeStatus::SchemaViolation) {
                fail("edge violates schema");
            }
        } else {
            fail("unknown kind '" + kind + "'");
        }
    }
    g.freeze();
    return g;
}

}  // namespace vulnrank
