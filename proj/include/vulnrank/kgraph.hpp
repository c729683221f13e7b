#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "vulnrank/enrich.hpp"
#include "vulnrank/profiles.hpp"
#include "vulnrank/records.hpp"

namespace vulnrank {

enum class NodeLabel : std::uint8_t {
    NvdCve,
    ExploitDb,
    CisaExploitCatalog,
    Cwe,
    Capec,
    AttackEnterpriseTechnique,
    AttackEnterpriseTactic,
    AttackGroup,
    Country,
    DhsSector,
    Cpe,
    Organization,
    Software,
    NvdReference,
};
inline constexpr std::size_t kNodeLabelCount = 14;

enum class EdgeType : std::uint8_t {
    ReferenceExploit,
    ExploitsKnown,
    WeakenedBy,
    KnownAttack,
    Employs,
    AchievesGoal,
    Originates,
    Targets,
    FocusOn,
    AchievedThrough,
    Affects,
    AffiliatedWith,
    OperatesIn,
    Installs,
    HasVersion,
    Informs,
};
inline constexpr std::size_t kEdgeTypeCount = 16;

struct EdgeSchema {
    EdgeType type;
    NodeLabel source;
    NodeLabel target;
};

// One (source label, target label) pair per relationship type.
inline constexpr std::array<EdgeSchema, kEdgeTypeCount> kEdgeSchema{{
    {EdgeType::ReferenceExploit, NodeLabel::NvdCve, NodeLabel::ExploitDb},
    {EdgeType::ExploitsKnown, NodeLabel::NvdCve, NodeLabel::CisaExploitCatalog},
    {EdgeType::WeakenedBy, NodeLabel::NvdCve, NodeLabel::Cwe},
    {EdgeType::KnownAttack, NodeLabel::Cwe, NodeLabel::Capec},
    {EdgeType::Employs, NodeLabel::Capec, NodeLabel::AttackEnterpriseTechnique},
    {EdgeType::AchievesGoal, NodeLabel::AttackGroup, NodeLabel::AttackEnterpriseTechnique},
    {EdgeType::Originates, NodeLabel::AttackGroup, NodeLabel::Country},
    {EdgeType::Targets, NodeLabel::AttackGroup, NodeLabel::Country},
    {EdgeType::FocusOn, NodeLabel::AttackGroup, NodeLabel::DhsSector},
    {EdgeType::AchievedThrough, NodeLabel::AttackEnterpriseTactic, NodeLabel::AttackEnterpriseTechnique},
    {EdgeType::Affects, NodeLabel::NvdCve, NodeLabel::Cpe},
    {EdgeType::AffiliatedWith, NodeLabel::DhsSector, NodeLabel::Organization},
    {EdgeType::OperatesIn, NodeLabel::Organization, NodeLabel::Country},
    {EdgeType::Installs, NodeLabel::Organization, NodeLabel::Software},
    {EdgeType::HasVersion, NodeLabel::Software, NodeLabel::Cpe},
    {EdgeType::Informs, NodeLabel::NvdCve, NodeLabel::NvdReference},
}};

constexpr const EdgeSchema& schema_of(EdgeType type) { return kEdgeSchema[static_cast<std::size_t>(type)]; }

std::string_view to_string(NodeLabel label);
std::string_view to_string(EdgeType type);
std::optional<NodeLabel> parse_node_label(std::string_view s);
std::optional<EdgeType> parse_edge_type(std::string_view s);

using NodeId = std::uint32_t;

struct Node {
    NodeId id;
    NodeLabel label;
    std::string key;
    nlohmann::json props;
};

struct Edge {
    NodeId source;
    EdgeType type;
    NodeId target;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class Direction { Outgoing, Incoming };

enum class EdgeStatus { Added, Duplicate, SchemaViolation, UnknownEndpoint };

class GraphError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Labeled property graph with a (label, key) index and per-node, per-type
// adjacency lists in both directions. Single writer until freeze(); after
// that the graph is immutable and safe for concurrent readers.
class PropertyGraph {
public:
    // Returns the existing node for (label, key) or creates it. Object
    // properties are merged into the node, later values winning.
    NodeId upsert_node(NodeLabel label, std::string_view key, const nlohmann::json& props = nlohmann::json::object());

    // Rejects edges whose endpoint labels do not match the schema pair.
    EdgeStatus add_edge(NodeId source, EdgeType type, NodeId target);

    std::optional<NodeId> find(NodeLabel label, std::string_view key) const;
    const Node& node(NodeId id) const { return nodes_.at(id); }
    bool contains(NodeId id) const { return id < nodes_.size(); }

    // Empty for an unknown node. Sorted by node id once frozen.
    std::span<const NodeId> neighbors(NodeId id, EdgeType type, Direction direction) const;

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edge_keys_.size(); }
    std::size_t rejected_edges() const { return rejected_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    std::vector<Edge> edges() const;
    std::vector<NodeId> nodes_with_label(NodeLabel label) const;

    void freeze();
    bool frozen() const { return frozen_; }

private:
    struct Adjacency {
        std::array<std::vector<NodeId>, kEdgeTypeCount> out;
        std::array<std::vector<NodeId>, kEdgeTypeCount> in;
    };

    static std::uint64_t edge_key(NodeId source, EdgeType type, NodeId target);
    void check_mutable() const;

    std::vector<Node> nodes_;
    std::vector<Adjacency> adjacency_;
    std::array<std::unordered_map<std::string, NodeId>, kNodeLabelCount> index_;
    std::unordered_set<std::uint64_t> edge_keys_;
    std::size_t rejected_{0};
    bool frozen_{false};
};

struct BuildStats {
    std::size_t dangling_dropped{0};
    std::size_t schema_rejected{0};
    std::vector<std::string> dangling_samples;
};

struct BuildResult {
    PropertyGraph graph;
    BuildStats stats;
};

// Turns records, group attributions and CPE-resolved profiles into a frozen
// graph. References to absent entities are dropped and counted. EPSS scores
// become properties of their CVE node.
BuildResult build_graph(const Snapshot& records, std::span<const GroupAttribution> attributions,
                        std::span<const OrganizationProfile> profiles);

// Groups that focus on `sector`, target `org_country`, and originate in one
// of `origin_countries` (no origin filter when empty). Sorted group ids.
std::vector<std::string> groups_threatening(const PropertyGraph& graph, std::string_view sector,
                                            std::string_view org_country,
                                            const std::set<std::string>& origin_countries);

struct TechniquePath {
    std::string technique;
    std::string capec;
    std::string cwe;

    friend auto operator<=>(const TechniquePath&, const TechniquePath&) = default;
};

// All CVE -WeakenedBy-> CWE -KnownAttack-> CAPEC -Employs-> technique paths, sorted.
std::vector<TechniquePath> techniques_for_cve(const PropertyGraph& graph, std::string_view cve_id);

std::set<std::string> cves_affecting(const PropertyGraph& graph, const std::set<std::string>& cpe_ids);

// Snapshot format: node lines sorted by (label, key), then edge lines sorted
// by (source key, type, target key). Byte-identical for equal graphs.
void export_graph(const PropertyGraph& graph, std::ostream& out);
PropertyGraph import_graph(std::istream& in);

}  // namespace vulnrank
