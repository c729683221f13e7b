#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vulnrank/date.hpp"
#include "vulnrank/enrich.hpp"
#include "vulnrank/kgraph.hpp"
#include "vulnrank/profiles.hpp"
#include "vulnrank/ranking.hpp"
#include "vulnrank/records.hpp"
#include "vulnrank/vocabulary.hpp"

namespace vulnrank {

// A required input file or stage output is absent.
class MissingInputError : public std::runtime_error {
public:
    explicit MissingInputError(const std::filesystem::path& path)
        : std::runtime_error("missing input: " + path.string()), path_{path}
    {
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Malformed configuration or a request naming something that does not exist.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Relative paths in the config file resolve against the file's directory.
struct ProjectConfig {
    std::vector<std::filesystem::path> snapshots;
    std::vector<std::filesystem::path> epss_csv;
    std::vector<std::filesystem::path> kev_csv;
    std::filesystem::path vocabulary_countries;
    std::filesystem::path vocabulary_sectors;
    std::filesystem::path lexicon_countries;
    std::filesystem::path lexicon_sectors;
    std::vector<std::filesystem::path> profiles;
    PolicyConfig policy;
    DateRange date_range;
    std::filesystem::path output_dir;
    // Upper bound for activity years found in group descriptions.
    std::optional<int> snapshot_year;
    // Keep only groups that target the United States.
    bool us_targeting_only{false};

    static ProjectConfig load(const std::filesystem::path& path);
    static ProjectConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

    // Throws MissingInputError for the first absent input path.
    void check_inputs() const;
};

struct StageOutput {
    std::vector<std::filesystem::path> written;
    std::vector<std::string> warnings;
};

struct IngestResult {
    Snapshot records;
    nlohmann::json summary;
    std::vector<std::string> warnings;
};

// Parses every configured feed file, merges and deduplicates.
IngestResult ingest(const ProjectConfig& config);

struct BuiltProject {
    Vocabulary vocabulary;
    std::vector<GroupAttribution> attributions;
    std::vector<ResolvedProfile> profiles;
    BuildResult build;
};

// Enriches groups, resolves profiles and builds the frozen graph.
BuiltProject build_project(const ProjectConfig& config, const Snapshot& records);

// records.jsonl, ingest_summary.json
StageOutput run_ingest(const ProjectConfig& config);
// attributions.jsonl, coverage_<org>.csv, graph.jsonl, build_summary.json
StageOutput run_build(const ProjectConfig& config);
// ranked_<org>_<policy>.csv; all profile orgs / all policies when unset
StageOutput run_rank(const ProjectConfig& config, const std::optional<std::string>& org,
                     const std::optional<Policy>& policy);
// ndcg_by_k.csv, cost.csv, savings.csv, ttest.csv, ttest_cost.csv, weekly_ndcg.csv
StageOutput run_evaluate(const ProjectConfig& config, const std::optional<std::string>& org);
// case_study_<org>.csv; also prints the side-by-side table to `table`
StageOutput run_case_study(const ProjectConfig& config, const std::optional<std::string>& org, std::ostream& table);

std::filesystem::path graph_path(const ProjectConfig& config);
std::filesystem::path records_path(const ProjectConfig& config);

}  // namespace vulnrank
