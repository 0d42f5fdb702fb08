#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sdprofile/report.hpp"
#include "sdprofile/store.hpp"

namespace sdprofile {

struct IngestSummary {
    std::size_t members = 0;
    std::size_t posts = 0;
};

// Parses an export and writes it into the store (created if missing).
// Re-ingesting an identical corpus leaves the snapshot byte-identical; a
// changed corpus keeps retained members' accounts and drops stale results.
// Throws ParseError (SyntaxError messages carry file:line:column),
// StoreLocked, StoreError, ConflictError.
IngestSummary cmd_ingest(const std::filesystem::path& export_path, const std::filesystem::path& store_path,
                         bool lenient = false);

struct VerifySummary {
    std::size_t members = 0;
    std::array<std::size_t, 3> tier_counts{};  // indexed by Tier
    std::vector<std::string> warnings;
};

struct VerifyOptions {
    VerifySettings settings;
    std::optional<std::filesystem::path> report_out;
    ReportFormat report_format = ReportFormat::csv;
    std::optional<Timestamp> now;  // defaults to the wall clock
};

// Runs the pipeline over the stored corpus, persists results, ruleset and
// settings, and records a system `analyze` for accounts that are
// unverified, analyzed or monitored.
VerifySummary verify_snapshot(Snapshot& snapshot, RuleSet rules, const VerifySettings& settings, Timestamp now);

VerifySummary cmd_verify(const std::filesystem::path& store_path, const std::filesystem::path& rules_path,
                         const VerifyOptions& options = {});

void cmd_report(const std::filesystem::path& store_path, ReportFormat format, const std::filesystem::path& out);

std::string report_for(const Snapshot& snapshot, ReportFormat format);

}  // namespace sdprofile
