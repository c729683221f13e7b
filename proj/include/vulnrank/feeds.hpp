#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vulnrank/records.hpp"

namespace vulnrank {

// Fatal ingestion failure: unreadable file or a CSV header that does not match.
class FeedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ParseDiagnostic {
    std::size_t line{0};
    std::string message;
};

struct ParseResult {
    Snapshot records;
    std::size_t data_lines{0};
    std::size_t accepted{0};
    std::size_t skipped{0};
    std::vector<ParseDiagnostic> skipped_lines;
    std::vector<ParseDiagnostic> warnings;
};

// Parses a normalized snapshot (one JSON object per line, `kind` field
// selects the record type). When `only` is set, lines of any other kind
// are skipped and counted. Blank lines are not data lines. Duplicate
// primary keys resolve last-wins with a warning.
ParseResult parse_snapshot(const std::filesystem::path& path, std::optional<SourceKind> only = std::nullopt);
ParseResult parse_snapshot(std::istream& in, std::optional<SourceKind> only = std::nullopt);

void write_snapshot(const std::filesystem::path& path, const Snapshot& snapshot);

template <typename T>
struct CsvParseResult {
    std::vector<T> records;
    std::size_t data_rows{0};
    std::size_t rejected{0};
    std::vector<ParseDiagnostic> diagnostics;
};

// EPSS daily CSV: optional `#` comment lines, then header `cve,epss,percentile`.
CsvParseResult<EpssScore> parse_epss_csv(const std::filesystem::path& path);
CsvParseResult<EpssScore> parse_epss_csv(std::istream& in);

// CISA KEV CSV. The first eight header columns must be exactly
// cveID,vendorProject,product,vulnerabilityName,dateAdded,shortDescription,requiredAction,dueDate
// and later columns are ignored.
CsvParseResult<KevEntry> parse_kev_csv(const std::filesystem::path& path);
CsvParseResult<KevEntry> parse_kev_csv(std::istream& in);

// Drops deprecated and non US-English dictionary entries.
std::vector<CpeEntry> normalize_cpe_entries(const std::vector<CpeEntry>& entries);

enum class FindingKind { DanglingReference, Duplicate, OutOfRange };

std::string_view to_string(FindingKind k);

struct Finding {
    FindingKind kind;
    SourceKind source;
    std::string key;
    std::string detail;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool empty() const { return findings.empty(); }
    std::size_t count(FindingKind kind) const;
};

ValidationReport validate_snapshot(const Snapshot& records);

}  // namespace vulnrank
