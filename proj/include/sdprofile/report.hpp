#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sdprofile/corpus.hpp"
#include "sdprofile/pipeline.hpp"

namespace sdprofile {

using OutcomeMap = std::map<std::string, MemberOutcome, std::less<>>;

// One row of the member table: who they are, what was inferred and how
// reliable the declared profile looks.
struct ReportRow {
    std::string username;
    Role role = Role::member;
    std::array<std::string, 4> inferred;  // pole name or "abstain"; empty when never verified
    std::string activity;
    std::string location;
    std::string registered;  // YYYY-MM-DD
    std::size_t post_count = 0;
    std::optional<double> reliability_percent;
    std::optional<Tier> tier;
};

enum class ReportFormat { csv, json };

std::optional<ReportFormat> report_format_from_string(std::string_view s);

// Rows in username order. Members absent from `results` get empty
// verification columns.
std::vector<ReportRow> build_report(const Corpus& corpus, const OutcomeMap& results);

// Two decimals, as used on the wire.
std::string format_reliability(double percent);
double round_reliability(double percent);

nlohmann::json report_row_to_json(const ReportRow& row);
std::string render_report(const std::vector<ReportRow>& rows, ReportFormat format);

inline constexpr std::string_view kReportHeader =
    "username,role,age,education,gender,sphere,activity_level,location,registered,post_count,reliability_percent,tier";

}  // namespace sdprofile
