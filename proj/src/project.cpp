#include "vulnrank/project.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "vulnrank/csv.hpp"
#include "vulnrank/enrich.hpp"
#include "vulnrank/evaluation.hpp"
#include "vulnrank/feeds.hpp"
#include "vulnrank/kgraph.hpp"
#include "vulnrank/profiles.hpp"
#include "vulnrank/vocabulary.hpp"

namespace vulnrank {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content, StageOutput& out)
{
    fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    f << content;
    out.written.push_back(path);
}

void require(const fs::path& path)
{
    if (!fs::exists(path)) {
        throw MissingInputError(path);
    }
}

fs::path resolve(const fs::path& base, const nlohmann::json& j)
{
    fs::path p = j.get<std::string>();
    return p.is_absolute() ? p : base / p;
}

std::vector<fs::path> resolve_list(const fs::path& base, const nlohmann::json& j, const char* key)
{
    std::vector<fs::path> out;
    auto it = j.find(key);
    if (it == j.end()) {
        return out;
    }
    if (it->is_string()) {
        out.push_back(resolve(base, *it));
        return out;
    }
    for (const auto& v : *it) {
        out.push_back(resolve(base, v));
    }
    return out;
}

Date require_date(const nlohmann::json& j, const char* key)
{
    auto d = Date::parse(j.at(key).get<std::string>());
    if (!d) {
        throw UsageError(std::string("config: bad date in date_range.") + key);
    }
    return *d;
}

PropertyGraph load_graph(const ProjectConfig& config)
{
    const auto path = graph_path(config);
    require(path);
    std::ifstream in(path, std::ios::binary);
    return import_graph(in);
}

std::vector<OrgContext> select_orgs(const PropertyGraph& graph, const std::optional<std::string>& org)
{
    std::vector<OrgContext> out;
    if (org) {
        auto ctx = OrgContext::from_graph(graph, *org);
        if (!ctx) {
            throw UsageError("unknown org id: " + *org);
        }
        out.push_back(std::move(*ctx));
        return out;
    }
    std::vector<std::string> ids;
    for (NodeId id : graph.nodes_with_label(NodeLabel::Organization)) {
        ids.push_back(graph.node(id).key);
    }
    std::sort(ids.begin(), ids.end());
    for (const auto& id : ids) {
        out.push_back(*OrgContext::from_graph(graph, id));
    }
    return out;
}

nlohmann::json diagnostics_json(const std::vector<ParseDiagnostic>& diags, std::size_t limit = 20)
{
    auto arr = nlohmann::json::array();
    for (std::size_t i = 0; i < diags.size() && i < limit; ++i) {
        arr.push_back({{"line", diags[i].line}, {"message", diags[i].message}});
    }
    return arr;
}

std::string pad(std::string s, std::size_t width, bool right)
{
    if (s.size() >= width) {
        return s;
    }
    const std::string fill(width - s.size(), ' ');
    return right ? fill + s : s + fill;
}

}  // namespace

fs::path graph_path(const ProjectConfig& config) { return config.output_dir / "graph.jsonl"; }
fs::path records_path(const ProjectConfig& config) { return config.output_dir / "records.jsonl"; }

ProjectConfig ProjectConfig::load(const fs::path& path)
{
    require(path);
    std::ifstream in(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config " + path.string() + ": " + e.what());
    }
    return from_json(j, path.parent_path());
}

ProjectConfig ProjectConfig::from_json(const nlohmann::json& j, const fs::path& base_dir)
{
    ProjectConfig c;
    try {
        c.snapshots = resolve_list(base_dir, j, "snapshots");
        c.epss_csv = resolve_list(base_dir, j, "epss_csv");
        c.kev_csv = resolve_list(base_dir, j, "kev_csv");
        c.profiles = resolve_list(base_dir, j, "profiles");
        const auto& vocab = j.at("vocabulary");
        c.vocabulary_countries = resolve(base_dir, vocab.at("countries"));
        c.vocabulary_sectors = resolve(base_dir, vocab.at("sectors"));
        const auto& lexicon = j.at("lexicon");
        c.lexicon_countries = resolve(base_dir, lexicon.at("countries"));
        c.lexicon_sectors = resolve(base_dir, lexicon.at("sectors"));
        c.output_dir = resolve(base_dir, j.value("output_dir", nlohmann::json("out")));
        const auto& range = j.at("date_range");
        c.date_range = {require_date(range, "from"), require_date(range, "to")};
        if (c.date_range.to < c.date_range.from) {
            throw UsageError("config: date_range.to precedes date_range.from");
        }
        if (auto it = j.find("snapshot_year"); it != j.end() && !it->is_null()) {
            c.snapshot_year = it->get<int>();
        }
        c.us_targeting_only = j.value("us_targeting_only", false);

        const auto policy = j.value("policy", nlohmann::json::object());
        auto& p = c.policy;
        if (auto it = policy.find("origin_countries"); it != policy.end()) {
            p.origin_countries = it->get<std::set<std::string>>();
        }
        if (auto it = policy.find("skill_level"); it != policy.end()) {
            auto s = parse_adversary_skill(it->get<std::string>());
            if (!s) {
                throw UsageError("config: policy.skill_level must be Low or High");
            }
            p.skill_level = *s;
        }
        if (auto it = policy.find("ideal_mode"); it != policy.end()) {
            auto m = parse_ideal_mode(it->get<std::string>());
            if (!m) {
                throw UsageError("config: policy.ideal_mode must be apt or general");
            }
            p.ideal_mode = *m;
        }
        p.epss_threshold = policy.value("epss_threshold", p.epss_threshold);
        p.risk_appetite = policy.value("risk_appetite", p.risk_appetite);
        p.k = policy.value("k", p.k);
        p.validate();
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    } catch (const ConfigError& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    return c;
}

void ProjectConfig::check_inputs() const
{
    for (const auto* list : {&snapshots, &epss_csv, &kev_csv, &profiles}) {
        for (const auto& p : *list) {
            require(p);
        }
    }
    for (const auto* p : {&vocabulary_countries, &vocabulary_sectors, &lexicon_countries, &lexicon_sectors}) {
        require(*p);
    }
}

IngestResult ingest(const ProjectConfig& config)
{
    config.check_inputs();
    IngestResult result;
    auto& records = result.records;
    auto files = nlohmann::json::array();
    for (const auto& path : config.snapshots) {
        auto r = parse_snapshot(path);
        records.append(r.records);
        for (const auto& w : r.warnings) {
            result.warnings.push_back(path.filename().string() + ":" + std::to_string(w.line) + ": " + w.message);
        }
        files.push_back({{"path", path.filename().string()},
                         {"format", "jsonl"},
                         {"data_lines", r.data_lines},
                         {"accepted", r.accepted},
                         {"skipped", r.skipped},
                         {"skipped_lines", diagnostics_json(r.skipped_lines)}});
    }
    auto add_csv = [&](const fs::path& path, const char* format, auto parsed, auto& target) {
        target.insert(target.end(), parsed.records.begin(), parsed.records.end());
        files.push_back({{"path", path.filename().string()},
                         {"format", format},
                         {"data_rows", parsed.data_rows},
                         {"accepted", parsed.records.size()},
                         {"rejected", parsed.rejected},
                         {"rejected_rows", diagnostics_json(parsed.diagnostics)}});
    };
    for (const auto& path : config.epss_csv) {
        add_csv(path, "epss_csv", parse_epss_csv(path), records.epss);
    }
    for (const auto& path : config.kev_csv) {
        add_csv(path, "kev_csv", parse_kev_csv(path), records.kev);
    }
    for (auto& msg : records.deduplicate()) {
        result.warnings.push_back(std::move(msg));
    }
    const auto report = validate_snapshot(records);

    nlohmann::json counts{
        {"cve", records.cves.size()},         {"cpe", records.cpes.size()},
        {"cwe", records.cwes.size()},         {"capec", records.capecs.size()},
        {"technique", records.techniques.size()}, {"tactic", records.tactics.size()},
        {"group", records.groups.size()},     {"epss", records.epss.size()},
        {"kev", records.kev.size()},          {"exploit", records.exploits.size()},
        {"reference", records.references.size()},
    };
    auto findings = nlohmann::json::array();
    for (std::size_t i = 0; i < report.findings.size() && i < 50; ++i) {
        const auto& f = report.findings[i];
        findings.push_back({{"kind", to_string(f.kind)},
                            {"source", to_string(f.source)},
                            {"key", f.key},
                            {"detail", f.detail}});
    }
    result.summary = {
        {"files", files},
        {"records", counts},
        {"total_records", records.size()},
        {"findings",
         {{"dangling_reference", report.count(FindingKind::DanglingReference)},
          {"duplicate", report.count(FindingKind::Duplicate)},
          {"out_of_range", report.count(FindingKind::OutOfRange)},
          {"samples", findings}}},
        {"warnings", result.warnings.size()},
    };
    return result;
}

StageOutput run_ingest(const ProjectConfig& config)
{
    auto result = ingest(config);
    StageOutput out;
    out.warnings = std::move(result.warnings);
    write_file(records_path(config), serialize_snapshot(result.records), out);
    write_file(config.output_dir / "ingest_summary.json", result.summary.dump(2) + "\n", out);
    return out;
}

BuiltProject build_project(const ProjectConfig& config, const Snapshot& records)
{
    config.check_inputs();
    BuiltProject project;
    project.vocabulary = Vocabulary::load(config.vocabulary_countries, config.vocabulary_sectors);
    const auto lexicon = Lexicon::load(config.lexicon_countries, config.lexicon_sectors, project.vocabulary);
    project.attributions = attribute_groups(records.groups, lexicon, config.snapshot_year);
    if (config.us_targeting_only) {
        project.attributions = filter_us_targeting(project.attributions);
    }
    const CpeDictionary dictionary(normalize_cpe_entries(records.cpes));
    std::vector<OrganizationProfile> profiles;
    for (const auto& path : config.profiles) {
        project.profiles.push_back(resolve_cpes(load_profile(path, project.vocabulary), dictionary));
        profiles.push_back(project.profiles.back().profile);
    }
    project.build = build_graph(records, project.attributions, profiles);
    return project;
}

StageOutput run_build(const ProjectConfig& config)
{
    config.check_inputs();
    const auto rpath = records_path(config);
    require(rpath);
    StageOutput out;
    const auto records = parse_snapshot(rpath).records;
    const auto project = build_project(config, records);

    std::string attribution_text;
    for (const auto& a : project.attributions) {
        attribution_text += to_json(a).dump() + "\n";
    }
    write_file(config.output_dir / "attributions.jsonl", attribution_text, out);

    auto coverage = nlohmann::json::array();
    for (const auto& resolved : project.profiles) {
        std::ostringstream csv_out;
        write_coverage_csv(csv_out, resolved.coverage);
        write_file(config.output_dir / ("coverage_" + resolved.profile.org_id + ".csv"), csv_out.str(), out);
        coverage.push_back({{"org", resolved.profile.org_id},
                            {"software", resolved.profile.software.size()},
                            {"resolved", resolved.coverage.resolved},
                            {"unresolved", resolved.coverage.unresolved},
                            {"size_class", to_string(size_class(resolved.profile))}});
    }

    const auto& graph = project.build.graph;
    std::ostringstream graph_out;
    export_graph(graph, graph_out);
    write_file(graph_path(config), graph_out.str(), out);

    std::map<std::string, std::size_t> labels;
    for (const auto& n : graph.nodes()) {
        ++labels[std::string(to_string(n.label))];
    }
    std::map<std::string, std::size_t> types;
    for (const auto& e : graph.edges()) {
        ++types[std::string(to_string(e.type))];
    }
    auto histogram = nlohmann::json::array();
    for (const auto& [sector, count] : sector_histogram(project.attributions, project.vocabulary)) {
        histogram.push_back({{"sector", sector}, {"groups", count}});
    }
    const auto& stats = project.build.stats;
    nlohmann::json summary{
        {"nodes", graph.node_count()},
        {"edges", graph.edge_count()},
        {"nodes_by_label", labels},
        {"edges_by_type", types},
        {"dangling_dropped", stats.dangling_dropped},
        {"dangling_samples", stats.dangling_samples},
        {"schema_rejected", stats.schema_rejected},
        {"attributed_groups", project.attributions.size()},
        {"sector_histogram", histogram},
        {"profiles", coverage},
    };
    write_file(config.output_dir / "build_summary.json", summary.dump(2) + "\n", out);
    return out;
}

StageOutput run_rank(const ProjectConfig& config, const std::optional<std::string>& org,
                     const std::optional<Policy>& policy)
{
    StageOutput out;
    const auto graph = load_graph(config);
    const std::vector<Policy> policies =
        policy ? std::vector<Policy>{*policy}
               : std::vector<Policy>{Policy::CvssBase, Policy::AptThreat, Policy::GeneralThreat, Policy::Ideal};
    for (const auto& ctx : select_orgs(graph, org)) {
        const auto cohorts = generate_candidates(graph, ctx, config.date_range);
        for (Policy p : policies) {
            std::ostringstream csv_out;
            write_ranked_csv_header(csv_out);
            std::vector<std::string> warnings;
            for (const auto& cohort : cohorts) {
                write_ranked_csv_rows(csv_out, rank(graph, ctx, cohort, p, config.policy, &warnings));
            }
            if (p == Policy::CvssBase) {
                out.warnings.insert(out.warnings.end(), warnings.begin(), warnings.end());
            }
            write_file(config.output_dir / ("ranked_" + ctx.org_id + "_" + std::string(to_string(p)) + ".csv"),
                       csv_out.str(), out);
        }
    }
    return out;
}

StageOutput run_evaluate(const ProjectConfig& config, const std::optional<std::string>& org)
{
    StageOutput out;
    const auto graph = load_graph(config);
    EvaluationOptions options;
    options.k = config.policy.k;
    EvaluationReport report;
    report.k = options.k;
    for (const auto& ctx : select_orgs(graph, org)) {
        const auto cohorts = generate_candidates(graph, ctx, config.date_range);
        evaluate_org(graph, ctx, cohorts, config.policy, options, report);
    }
    auto emit = [&](const char* name, auto writer) {
        std::ostringstream s;
        writer(s);
        write_file(config.output_dir / name, s.str(), out);
    };
    emit("ndcg_by_k.csv", [&](std::ostream& s) { write_ndcg_by_k_csv(s, report); });
    emit("weekly_ndcg.csv", [&](std::ostream& s) { write_weekly_ndcg_csv(s, report); });
    emit("cost.csv", [&](std::ostream& s) { write_cost_csv(s, report); });
    emit("savings.csv", [&](std::ostream& s) { write_savings_csv(s, report); });
    emit("ttest.csv", [&](std::ostream& s) { write_ttest_csv(s, report, "ndcg"); });
    emit("ttest_cost.csv", [&](std::ostream& s) { write_ttest_csv(s, report, "cost"); });
    out.warnings = report.warnings;
    return out;
}

StageOutput run_case_study(const ProjectConfig& config, const std::optional<std::string>& org, std::ostream& table)
{
    StageOutput out;
    const auto graph = load_graph(config);
    const auto k = static_cast<std::size_t>(config.policy.k);
    for (const auto& ctx : select_orgs(graph, org)) {
        std::ostringstream csv_out;
        csv_out << "org,iso_week,cve,cvss_base,relevance,policy1_rank,policy2_rank,known_exploit\n";
        for (const auto& cohort : generate_candidates(graph, ctx, config.date_range)) {
            const auto p1 = rank(graph, ctx, cohort, Policy::CvssBase, config.policy);
            const auto p2 = rank(graph, ctx, cohort, Policy::AptThreat, config.policy);
            std::map<std::string, std::size_t> p1_rank;
            for (const auto& item : p1.items) {
                p1_rank[item.cve_id] = item.rank;
            }
            table << ctx.org_id << ' ' << cohort.week.to_string() << ": " << cohort.cve_ids.size()
                  << " candidates, top " << std::min(k, p2.items.size()) << " by apt_threat\n";
            table << pad("CVE-ID", 16, false) << pad("CVSS", 6, true) << pad("Relevance", 11, true)
                  << pad("P1 rank", 9, true) << pad("P2 rank", 9, true) << "  Exploit\n";
            for (std::size_t i = 0; i < p2.items.size() && i < k; ++i) {
                const auto& item = p2.items[i];
                const auto f = extract_features(graph, ctx, item.cve_id, config.policy);
                const bool exploited = exploit_evidence_bit(f);
                const auto cvss = item.cvss_base ? csv::format_number(*item.cvss_base) : std::string();
                char cvss_text[16];
                if (item.cvss_base) {
                    std::snprintf(cvss_text, sizeof cvss_text, "%.1f", *item.cvss_base);
                } else {
                    std::snprintf(cvss_text, sizeof cvss_text, "-");
                }
                const auto relevance = std::to_string(static_cast<int>(item.score));
                const auto r1 = std::to_string(p1_rank.at(item.cve_id));
                table << pad(item.cve_id, 16, false) << pad(cvss_text, 6, true) << pad(relevance, 11, true)
                      << pad(r1, 9, true) << pad(std::to_string(item.rank), 9, true)
                      << (exploited ? "  yes" : "") << '\n';
                csv_out << csv::join({ctx.org_id, cohort.week.to_string(), item.cve_id, cvss, relevance, r1,
                                      std::to_string(item.rank), exploited ? "true" : "false"})
                        << '\n';
            }
            table << '\n';
        }
        write_file(config.output_dir / ("case_study_" + ctx.org_id + ".csv"), csv_out.str(), out);
    }
    return out;
}

}  // namespace vulnrank
