#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdprofile/corpus.hpp"
#include "sdprofile/indicators.hpp"
#include "sdprofile/pipeline.hpp"
#include "sdprofile/report.hpp"
#include "sdprofile/workflow.hpp"

namespace sdprofile {

inline constexpr int kSchemaVersion = 1;

// Settings of the last verification run, persisted so that the service can
// rerun it and get the same results as the CLI.
struct VerifySettings {
    Thresholds thresholds;
    InferenceConfig inference;
    int window_days = 90;
    ActivityThresholds activity;
    std::optional<std::string> dictionary_path;

    bool operator==(const VerifySettings& o) const;
};

struct AuditEntry {
    std::uint64_t seq = 0;  // 1-based position in the audit log
    std::string username;
    ModerationAction action;

    bool operator==(const AuditEntry&) const = default;
};

using AccountMap = std::map<std::string, AccountState, std::less<>>;

struct Snapshot {
    int schema_version = kSchemaVersion;
    Corpus corpus;
    std::optional<RuleSet> ruleset;
    std::optional<VerifySettings> settings;
    OutcomeMap results;
    AccountMap accounts;
    std::vector<AuditEntry> audit;

    // Every corpus member starts unverified with an empty history.
    static Snapshot fresh(Corpus corpus);

    // Applies one action to an account and appends it to the audit log.
    // Throws NotFound, IllegalTransition, OutOfOrderAction.
    const AccountState& record(const std::string& username, ModerationAction action, std::optional<Tier> tier_context);

    // The audit entry record() would append, without applying it.
    AuditEntry prepare(const std::string& username, ModerationAction action, std::optional<Tier> tier_context) const;

    // Invariants: results/accounts refer to corpus members, each account's
    // history is its slice of the audit log, and replaying the audit log
    // reproduces the accounts. Throws StoreError.
    void check_consistency() const;
};

// Rebuilds every account from the audit log alone.
AccountMap replay_audit(const Corpus& corpus, const std::vector<AuditEntry>& audit);

nlohmann::json snapshot_to_json(const Snapshot& snapshot);
Snapshot snapshot_from_json(const nlohmann::json& doc);
nlohmann::json outcome_to_json(const MemberOutcome& outcome);
nlohmann::json account_to_json(const AccountState& account);
nlohmann::json action_to_json(const ModerationAction& action);

// Exclusive advisory lock on <store>.lock for the lifetime of the object.
class StoreLock {
public:
    // Throws StoreLocked when another process holds it, StoreError on I/O failure.
    explicit StoreLock(const std::filesystem::path& store_path);
    ~StoreLock();
    StoreLock(const StoreLock&) = delete;
    StoreLock& operator=(const StoreLock&) = delete;

private:
    int fd_ = -1;
};

// File layout: the snapshot at `path` (replaced atomically), and a
// write-ahead journal of audit entries at <path>.journal that is folded into
// the snapshot on load.
class Store {
public:
    explicit Store(std::filesystem::path path);

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path journal_path() const;
    bool exists() const;

    // Snapshot plus any journal entries newer than it. Throws StoreError.
    Snapshot load() const;
    // load(), then folds a non-empty journal into a fresh snapshot so that
    // later appends start from a clean journal. Caller must hold the lock.
    Snapshot recover() const;
    // Write-temp, fsync, rename, fsync directory; then truncates the journal.
    void save(const Snapshot& snapshot) const;
    // Appends one line and fsyncs before returning.
    void append_journal(const AuditEntry& entry) const;

private:
    std::filesystem::path path_;
};

// Atomically replaces `path` with `contents`; no partial file is left behind
// on failure. Throws StoreError.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace sdprofile
