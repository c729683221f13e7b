#pragma once

#include "support.hpp"

#include "vulnrank/enrich.hpp"
#include "vulnrank/project.hpp"
#include "vulnrank/vocabulary.hpp"

namespace testing {

// A project loaded and built in memory, the same way the CLI stages do it.
struct World {
    vulnrank::ProjectConfig config;
    vulnrank::Snapshot records;
    vulnrank::BuiltProject project;

    const vulnrank::PropertyGraph& graph() const { return project.build.graph; }
};

inline World load_world(const std::filesystem::path& config_path)
{
    World w;
    w.config = vulnrank::ProjectConfig::load(config_path);
    w.records = vulnrank::ingest(w.config).records;
    w.project = vulnrank::build_project(w.config, w.records);
    return w;
}

inline const World& odu_world()
{
    static const World w = load_world(odu_dir() / "project.json");
    return w;
}

inline const vulnrank::Vocabulary& vocabulary()
{
    static const auto v =
        vulnrank::Vocabulary::load(data_dir() / "vocab" / "countries.txt", data_dir() / "vocab" / "sectors.tsv");
    return v;
}

inline const vulnrank::Lexicon& lexicon()
{
    static const auto l = vulnrank::Lexicon::load(data_dir() / "lexicon" / "countries.tsv",
                                                  data_dir() / "lexicon" / "sectors.tsv", vocabulary());
    return l;
}

// Policy 2 order of the twenty case-study CVEs, and their CVSS ranks.
struct CaseRow {
    const char* cve;
    double cvss;
    std::size_t p1_rank;
};

inline const std::vector<CaseRow>& case_rows()
{
    static const std::vector<CaseRow> rows{
        {"CVE-2021-37966", 4.3, 34}, {"CVE-2021-37999", 6.1, 28}, {"CVE-2021-38000", 6.1, 29},
        {"CVE-2021-30542", 8.8, 5},  {"CVE-2021-30543", 8.8, 6},  {"CVE-2021-30626", 8.8, 7},
        {"CVE-2021-30627", 8.8, 8},  {"CVE-2021-30628", 8.8, 9},  {"CVE-2021-30629", 8.8, 10},
        {"CVE-2021-30630", 4.3, 31}, {"CVE-2021-30632", 8.8, 11}, {"CVE-2021-30633", 9.6, 2},
        {"CVE-2021-34423", 9.8, 1},  {"CVE-2021-34424", 7.5, 26}, {"CVE-2021-37956", 8.8, 12},
        {"CVE-2021-37957", 8.8, 13}, {"CVE-2021-37958", 5.4, 30}, {"CVE-2021-37959", 8.8, 14},
        {"CVE-2021-37961", 8.8, 15}, {"CVE-2021-37962", 8.8, 16},
    };
    return rows;
}

}  // namespace testing
