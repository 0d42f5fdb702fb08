// sdprofile: ingest forum exports, verify declared member profiles, emit the
// member report and serve the moderation API.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sdprofile/commands.hpp"
#include "sdprofile/errors.hpp"
#include "sdprofile/service.hpp"

namespace {

std::string env_or(const char* name, const char* fallback) {
    const char* v = std::getenv(name);
    return v && *v ? v : fallback;
}

sdprofile::Service* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace sdprofile;

    CLI::App app{"Socio-demographic profile verification for forum members"};
    app.require_subcommand(1);

    const std::string default_store = env_or("PROFILER_STORE", "profiles.store.json");
    const std::string default_bind = env_or("PROFILER_BIND", "127.0.0.1:8080");

    std::string store = default_store;
    std::string export_path;
    bool lenient = false;
    auto* ingest = app.add_subcommand("ingest", "Parse a forum export into the store");
    ingest->add_option("--export", export_path, "Forum export (JSON)")->required()->check(CLI::ExistingFile);
    ingest->add_option("--store", store, "Store file (env PROFILER_STORE)");
    ingest->add_flag("--lenient", lenient, "Ignore unknown fields in the export");

    std::string rules_path;
    VerifyOptions verify_opts;
    std::string verify_out;
    std::string verify_format = "csv";
    std::string dictionary;
    auto* verify = app.add_subcommand("verify", "Infer profiles, score reliability and classify accounts");
    verify->add_option("--store", store, "Store file (env PROFILER_STORE)");
    verify->add_option("--rules", rules_path, "Indicator rule config (JSON)")->required()->check(CLI::ExistingFile);
    verify->add_option("--t-low", verify_opts.settings.thresholds.t_low, "Pseudo-user threshold, percent")
        ->capture_default_str();
    verify->add_option("--t-high", verify_opts.settings.thresholds.t_high, "Reliable threshold, percent")
        ->capture_default_str();
    verify->add_option("--min-evidence", verify_opts.settings.inference.min_evidence_tokens,
                       "Word tokens needed before any characteristic is inferred")
        ->capture_default_str();
    verify->add_option("--window-days", verify_opts.settings.window_days, "Activity window in days")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    verify->add_option("--dictionary", dictionary, "Word list for misspelling_ratio")->check(CLI::ExistingFile);
    verify->add_option("--out", verify_out, "Also write the report to this file");
    verify->add_option("--format", verify_format, "Report format")->check(CLI::IsMember({"csv", "json"}));

    std::string report_format = "csv";
    std::string report_out;
    auto* report = app.add_subcommand("report", "Write the member report from stored results");
    report->add_option("--store", store, "Store file (env PROFILER_STORE)");
    report->add_option("--format", report_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    report->add_option("--out", report_out, "Output file")->required();

    std::string bind = default_bind;
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    serve->add_option("--store", store, "Store file (env PROFILER_STORE)");
    serve->add_option("--bind", bind, "ADDR:PORT (env PROFILER_BIND)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            const auto s = cmd_ingest(export_path, store, lenient);
            std::cout << "ingested " << s.members << " members, " << s.posts << " posts into " << store << "\n";
        } else if (*verify) {
            if (!dictionary.empty()) verify_opts.settings.dictionary_path = dictionary;
            if (!verify_out.empty()) {
                verify_opts.report_out = verify_out;
                verify_opts.report_format = *report_format_from_string(verify_format);
            }
            const auto s = cmd_verify(store, rules_path, verify_opts);
            for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << "verified " << s.members << " members: reliable " << s.tier_counts[2] << ", suspicion "
                      << s.tier_counts[1] << ", pseudo_user " << s.tier_counts[0] << "\n";
        } else if (*report) {
            cmd_report(store, *report_format_from_string(report_format), report_out);
        } else if (*serve) {
            const auto colon = bind.rfind(':');
            if (colon == std::string::npos) {
                std::cerr << "error: --bind must be ADDR:PORT\n";
                return 2;
            }
            const auto host = bind.substr(0, colon);
            const int port = std::stoi(bind.substr(colon + 1));
            Service service(store);
            g_service = &service;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "serving " << store << " on " << host << ":" << port << "\n";
            if (!service.listen(host, port)) {
                std::cerr << "error: cannot bind " << bind << "\n";
                return 1;
            }
            g_service = nullptr;
        }
    } catch (const StoreLocked& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
