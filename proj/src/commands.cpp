#include "sdprofile/commands.hpp"

#include <fstream>

#include "sdprofile/errors.hpp"

namespace sdprofile {

namespace fs = std::filesystem;

namespace {

Corpus read_export(const fs::path& export_path, bool lenient) {
    const auto text = read_file(export_path);
    try {
        return parse_export(text, ParseOptions{lenient});
    } catch (const SyntaxError& e) {
        throw SyntaxError(export_path.string() + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) +
                              ": " + e.what(),
                          e.line(), e.column());
    }
}

Snapshot merge_corpus(Snapshot previous, Corpus corpus) {
    if (previous.corpus == corpus) return previous;

    for (const auto& [name, account] : previous.accounts)
        if (!account.history.empty() && !corpus.find(name))
            throw ConflictError("member \"" + name + "\" has moderation history but is missing from the new export");

    Snapshot next = Snapshot::fresh(std::move(corpus));
    next.ruleset = std::move(previous.ruleset);
    next.settings = std::move(previous.settings);
    next.audit = std::move(previous.audit);
    for (auto& [name, account] : previous.accounts)
        if (next.corpus.find(name)) next.accounts[name] = std::move(account);
    return next;
}

Dictionary load_dictionary(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read dictionary " + path.string());
    return Dictionary::load(in);
}

}  // namespace

IngestSummary cmd_ingest(const fs::path& export_path, const fs::path& store_path, bool lenient) {
    Corpus corpus = read_export(export_path, lenient);
    const IngestSummary summary{corpus.members().size(), corpus.post_count()};

    StoreLock lock(store_path);
    const Store store(store_path);
    Snapshot snapshot =
        store.exists() ? merge_corpus(store.recover(), std::move(corpus)) : Snapshot::fresh(std::move(corpus));
    store.save(snapshot);
    return summary;
}

VerifySummary verify_snapshot(Snapshot& snapshot, RuleSet rules, const VerifySettings& settings, Timestamp now) {
    settings.thresholds.validate();
    if (settings.window_days <= 0) throw ConfigError("window_days must be positive");

    std::optional<Dictionary> dictionary;
    if (settings.dictionary_path) dictionary = load_dictionary(*settings.dictionary_path);

    PipelineConfig config;
    config.thresholds = settings.thresholds;
    config.inference = settings.inference;
    config.window_days = settings.window_days;
    config.activity = settings.activity;
    config.computed_at = now;
    config.dictionary = dictionary ? &*dictionary : nullptr;

    VerifySummary summary;
    summary.warnings = rule_warnings(rules, config.dictionary);
    auto outcomes = run_pipeline(snapshot.corpus, rules, config);

    // Build the new state on a copy so a failure leaves `snapshot` untouched.
    Snapshot next = snapshot;
    next.results.clear();
    for (auto& outcome : outcomes) {
        ++summary.tier_counts[static_cast<std::size_t>(outcome.tier)];
        const auto tier = outcome.tier;
        const auto name = outcome.result.username;
        next.results.emplace(name, std::move(outcome));

        const auto& account = next.accounts.at(name);
        if (account.state == AccountStatus::unverified || account.state == AccountStatus::analyzed ||
            account.state == AccountStatus::monitored) {
            const Timestamp at = account.history.empty() ? now : std::max(now, account.history.back().at);
            next.record(name, ModerationAction{ActionKind::analyze, "system", at, std::nullopt, std::nullopt}, tier);
        }
    }
    summary.members = next.results.size();
    next.ruleset = std::move(rules);
    next.settings = settings;
    snapshot = std::move(next);
    return summary;
}

std::string report_for(const Snapshot& snapshot, ReportFormat format) {
    return render_report(build_report(snapshot.corpus, snapshot.results), format);
}

VerifySummary cmd_verify(const fs::path& store_path, const fs::path& rules_path, const VerifyOptions& options) {
    RuleSet rules = load_rules(read_file(rules_path));

    StoreLock lock(store_path);
    const Store store(store_path);
    if (!store.exists()) throw StoreError("store " + store_path.string() + " does not exist; run ingest first");
    Snapshot snapshot = store.recover();
    const auto summary = verify_snapshot(snapshot, std::move(rules), options.settings, options.now.value_or(now_utc()));
    store.save(snapshot);
    if (options.report_out) write_file_atomic(*options.report_out, report_for(snapshot, options.report_format));
    return summary;
}

void cmd_report(const fs::path& store_path, ReportFormat format, const fs::path& out) {
    // Readers do not take the lock: the snapshot is only ever replaced atomically.
    const Store store(store_path);
    if (!store.exists()) throw StoreError("store " + store_path.string() + " does not exist");
    write_file_atomic(out, report_for(store.load(), format));
}

}  // namespace sdprofile
