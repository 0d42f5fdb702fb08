#include "sdprofile/report.hpp"

#include <cmath>
#include <cstdio>

namespace sdprofile {
namespace {

// RFC 4180 quoting.
std::string csv_field(std::string_view v) {
    if (v.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(v);
    std::string out = "\"";
    for (const char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::optional<ReportFormat> report_format_from_string(std::string_view s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    return std::nullopt;
}

std::string format_reliability(double percent) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", percent);
    return buf;
}

double round_reliability(double percent) { return std::round(percent * 100.0) / 100.0; }

std::vector<ReportRow> build_report(const Corpus& corpus, const OutcomeMap& results) {
    std::vector<ReportRow> rows;
    rows.reserve(corpus.members().size());
    for (const auto& [name, track] : corpus.members()) {
        const auto& p = track.profile();
        ReportRow row;
        row.username = name;
        row.role = p.role;
        row.location = p.location.value_or("");
        row.registered = format_date(p.registered);
        row.post_count = track.posts().size();
        if (const auto it = results.find(name); it != results.end()) {
            const auto& outcome = it->second;
            for (const auto c : kCharacteristics) {
                const auto& label = outcome.inferred[c].label;
                row.inferred[index_of(c)] = label ? std::string(to_string(*label)) : "abstain";
            }
            row.activity = to_string(outcome.activity);
            row.reliability_percent = outcome.result.reliability_percent;
            row.tier = outcome.tier;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json report_row_to_json(const ReportRow& row) {
    nlohmann::json j = {{"username", row.username},
                        {"role", to_string(row.role)},
                        {"activity_level", row.activity},
                        {"location", row.location},
                        {"registered", row.registered},
                        {"post_count", row.post_count}};
    for (const auto c : kCharacteristics) j[std::string(to_string(c))] = row.inferred[index_of(c)];
    j["reliability_percent"] =
        row.reliability_percent ? nlohmann::json(round_reliability(*row.reliability_percent)) : nlohmann::json();
    j["tier"] = row.tier ? nlohmann::json(to_string(*row.tier)) : nlohmann::json();
    return j;
}

std::string render_report(const std::vector<ReportRow>& rows, ReportFormat format) {
    if (format == ReportFormat::json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& row : rows) arr.push_back(report_row_to_json(row));
        return arr.dump(2) + "\n";
    }
    std::string out(kReportHeader);
    out += '\n';
    for (const auto& row : rows) {
        out += csv_field(row.username);
        out += ',';
        out += to_string(row.role);
        for (const auto& v : row.inferred) {
            out += ',';
            out += csv_field(v);
        }
        out += ',' + row.activity + ',' + csv_field(row.location) + ',' + row.registered + ',' +
               std::to_string(row.post_count) + ',';
        if (row.reliability_percent) out += format_reliability(*row.reliability_percent);
        out += ',';
        if (row.tier) out += to_string(*row.tier);
        out += '\n';
    }
    return out;
}

}  // namespace sdprofile
