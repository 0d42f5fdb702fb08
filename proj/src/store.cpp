#include "sdprofile/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sdprofile/errors.hpp"

namespace sdprofile {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_error(const std::string& what, const fs::path& p) {
    throw StoreError(what + " " + p.string() + ": " + std::strerror(errno));
}

json optional_to_json(const std::optional<Pole>& p) { return p ? json(to_string(*p)) : json(); }

template <typename T, typename F>
std::optional<T> parse_optional(const json& j, F&& from_string, const char* what) {
    if (j.is_null()) return std::nullopt;
    const auto v = from_string(j.get<std::string>());
    if (!v) throw StoreError(std::string("corrupt snapshot: bad ") + what + " \"" + j.get<std::string>() + "\"");
    return v;
}

std::optional<Pole> parse_pole(Characteristic c, const json& j) {
    return parse_optional<Pole>(j, [c](const std::string& s) { return pole_from_string(c, s); }, "pole");
}

std::optional<Tier> parse_tier(const json& j) {
    return parse_optional<Tier>(j, [](const std::string& s) { return tier_from_string(s); }, "tier");
}

template <typename T>
T parse_required(const json& j, std::optional<T> (*from_string)(std::string_view), const char* what) {
    const auto v = from_string(j.get<std::string>());
    if (!v) throw StoreError(std::string("corrupt snapshot: bad ") + what + " \"" + j.get<std::string>() + "\"");
    return *v;
}

json settings_to_json(const VerifySettings& s) {
    json j = {{"t_low", s.thresholds.t_low},
              {"t_high", s.thresholds.t_high},
              {"eps_tie", s.inference.eps_tie},
              {"min_evidence", s.inference.min_evidence_tokens},
              {"window_days", s.window_days},
              {"activity_low", s.activity.low_below},
              {"activity_high", s.activity.high_from}};
    j["dictionary"] = s.dictionary_path ? json(*s.dictionary_path) : json();
    return j;
}

VerifySettings settings_from_json(const json& j) {
    VerifySettings s;
    s.thresholds.t_low = j.at("t_low").get<double>();
    s.thresholds.t_high = j.at("t_high").get<double>();
    s.inference.eps_tie = j.at("eps_tie").get<double>();
    s.inference.min_evidence_tokens = j.at("min_evidence").get<std::size_t>();
    s.window_days = j.at("window_days").get<int>();
    s.activity.low_below = j.at("activity_low").get<std::size_t>();
    s.activity.high_from = j.at("activity_high").get<std::size_t>();
    if (!j.at("dictionary").is_null()) s.dictionary_path = j.at("dictionary").get<std::string>();
    return s;
}

ModerationAction action_from_json(const json& j) {
    ModerationAction a;
    a.action = parse_required<ActionKind>(j.at("action"), action_from_string, "action");
    a.actor = j.at("actor").get<std::string>();
    a.at = parse_rfc3339(j.at("at").get<std::string>());
    if (j.contains("note")) a.note = j.at("note").get<std::string>();
    if (j.contains("tier")) a.tier = parse_tier(j.at("tier"));
    return a;
}

json audit_entry_to_json(const AuditEntry& e) {
    json j = action_to_json(e.action);
    j["seq"] = e.seq;
    j["username"] = e.username;
    return j;
}

AuditEntry audit_entry_from_json(const json& j) {
    AuditEntry e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.username = j.at("username").get<std::string>();
    e.action = action_from_json(j);
    return e;
}

MemberOutcome outcome_from_json(const std::string& username, const json& j) {
    MemberOutcome o;
    o.tier = parse_required<Tier>(j.at("tier"), tier_from_string, "tier");
    const auto activity = j.at("activity").get<std::string>();
    if (activity == "low") o.activity = ActivityLevel::low;
    else if (activity == "medium") o.activity = ActivityLevel::medium;
    else if (activity == "high") o.activity = ActivityLevel::high;
    else throw StoreError("corrupt snapshot: bad activity level \"" + activity + "\"");

    const json& inf = j.at("inferred");
    o.inferred.username = username;
    o.inferred.evidence_tokens = inf.at("evidence_tokens").get<std::size_t>();
    o.inferred.insufficient_evidence = inf.at("insufficient_evidence").get<bool>();
    const json& res = j.at("result");
    o.result.username = username;
    o.result.reliability_percent = res.at("reliability_percent").get<double>();
    o.result.evidence_tokens = res.at("evidence_tokens").get<std::size_t>();
    o.result.insufficient_evidence = res.at("insufficient_evidence").get<bool>();
    o.result.computed_at = parse_rfc3339(res.at("computed_at").get<std::string>());

    for (const auto c : kCharacteristics) {
        const auto key = std::string(to_string(c));
        const json& ci = inf.at("characteristics").at(key);
        auto& target = o.inferred.inferences[index_of(c)];
        target.characteristic = c;
        target.label = parse_pole(c, ci.at("label"));
        target.confidence = ci.at("confidence").get<double>();
        for (const auto p : poles_of(c))
            target.pole_mass[pole_slot(p)] = ci.at("pole_mass").at(std::string(to_string(p))).get<double>();

        const json& ag = res.at("per_characteristic").at(key);
        auto& rec = o.result.per_characteristic[index_of(c)];
        rec.declared = parse_pole(c, ag.at("declared"));
        rec.inferred = parse_pole(c, ag.at("inferred"));
        rec.confidence = ag.at("confidence").get<double>();
        rec.agreement = ag.at("agreement").get<double>();
        rec.scorable = ag.at("scorable").get<bool>();
    }
    return o;
}

}  // namespace

bool VerifySettings::operator==(const VerifySettings& o) const {
    return thresholds.t_low == o.thresholds.t_low && thresholds.t_high == o.thresholds.t_high &&
           inference.eps_tie == o.inference.eps_tie &&
           inference.min_evidence_tokens == o.inference.min_evidence_tokens && window_days == o.window_days &&
           activity.low_below == o.activity.low_below && activity.high_from == o.activity.high_from &&
           dictionary_path == o.dictionary_path;
}

json action_to_json(const ModerationAction& a) {
    json j = {{"action", to_string(a.action)}, {"actor", a.actor}, {"at", format_rfc3339(a.at)}};
    if (a.note) j["note"] = *a.note;
    if (a.tier) j["tier"] = to_string(*a.tier);
    return j;
}

json account_to_json(const AccountState& account) {
    json history = json::array();
    for (const auto& a : account.history) history.push_back(action_to_json(a));
    return {{"username", account.username},
            {"state", to_string(account.state)},
            {"tier", account.tier ? json(to_string(*account.tier)) : json()},
            {"history", std::move(history)}};
}

json outcome_to_json(const MemberOutcome& o) {
    json inferred_chars = json::object();
    json agreement = json::object();
    for (const auto c : kCharacteristics) {
        const auto key = std::string(to_string(c));
        const auto& ci = o.inferred[c];
        json masses = json::object();
        for (const auto p : poles_of(c)) masses[std::string(to_string(p))] = ci.mass(p);
        inferred_chars[key] = {{"label", optional_to_json(ci.label)}, {"confidence", ci.confidence}, {"pole_mass", masses}};
        const auto& rec = o.result[c];
        agreement[key] = {{"declared", optional_to_json(rec.declared)},
                          {"inferred", optional_to_json(rec.inferred)},
                          {"confidence", rec.confidence},
                          {"agreement", rec.agreement},
                          {"scorable", rec.scorable}};
    }
    return {{"tier", to_string(o.tier)},
            {"activity", to_string(o.activity)},
            {"inferred",
             {{"evidence_tokens", o.inferred.evidence_tokens},
              {"insufficient_evidence", o.inferred.insufficient_evidence},
              {"characteristics", std::move(inferred_chars)}}},
            {"result",
             {{"reliability_percent", o.result.reliability_percent},
              {"evidence_tokens", o.result.evidence_tokens},
              {"insufficient_evidence", o.result.insufficient_evidence},
              {"computed_at", format_rfc3339(o.result.computed_at)},
              {"per_characteristic", std::move(agreement)}}}};
}

Snapshot Snapshot::fresh(Corpus corpus) {
    Snapshot s;
    s.corpus = std::move(corpus);
    for (const auto& [name, _] : s.corpus.members()) s.accounts.emplace(name, AccountState{name, {}, {}, {}});
    return s;
}

AuditEntry Snapshot::prepare(const std::string& username, ModerationAction action,
                             std::optional<Tier> tier_context) const {
    const auto it = accounts.find(username);
    if (it == accounts.end()) throw NotFound("no member named \"" + username + "\"");
    const auto next = apply_action(it->second, std::move(action), tier_context);
    return AuditEntry{audit.size() + 1, username, next.history.back()};
}

const AccountState& Snapshot::record(const std::string& username, ModerationAction action,
                                     std::optional<Tier> tier_context) {
    auto entry = prepare(username, std::move(action), tier_context);
    auto& account = accounts.find(username)->second;
    account = apply_action(account, entry.action, entry.action.tier);
    audit.push_back(std::move(entry));
    return account;
}

AccountMap replay_audit(const Corpus& corpus, const std::vector<AuditEntry>& audit) {
    AccountMap accounts;
    for (const auto& [name, _] : corpus.members()) accounts.emplace(name, AccountState{name, {}, {}, {}});
    for (std::size_t i = 0; i < audit.size(); ++i) {
        const auto& e = audit[i];
        if (e.seq != i + 1) throw StoreError("audit log out of sequence at entry " + std::to_string(i + 1));
        const auto it = accounts.find(e.username);
        if (it == accounts.end()) throw StoreError("audit entry " + std::to_string(e.seq) + " names unknown member \"" + e.username + "\"");
        try {
            it->second = apply_action(it->second, e.action, e.action.tier);
        } catch (const Error& err) {
            throw StoreError("audit entry " + std::to_string(e.seq) + " does not replay: " + err.what());
        }
    }
    return accounts;
}

void Snapshot::check_consistency() const {
    if (schema_version != kSchemaVersion)
        throw StoreError("unsupported snapshot schema version " + std::to_string(schema_version));
    for (const auto& [name, _] : results)
        if (!corpus.find(name)) throw StoreError("result for unknown member \"" + name + "\"");
    for (const auto& [name, _] : accounts)
        if (!corpus.find(name)) throw StoreError("account for unknown member \"" + name + "\"");
    if (replay_audit(corpus, audit) != accounts) throw StoreError("audit replay does not reproduce the stored accounts");
}

json snapshot_to_json(const Snapshot& s) {
    json results = json::object();
    for (const auto& [name, o] : s.results) results[name] = outcome_to_json(o);
    json accounts = json::object();
    for (const auto& [name, a] : s.accounts) accounts[name] = account_to_json(a);
    json audit = json::array();
    for (const auto& e : s.audit) audit.push_back(audit_entry_to_json(e));
    return {{"schema_version", s.schema_version},
            {"corpus", corpus_to_json(s.corpus)},
            {"ruleset", s.ruleset ? rules_to_json(*s.ruleset) : json()},
            {"settings", s.settings ? settings_to_json(*s.settings) : json()},
            {"results", std::move(results)},
            {"accounts", std::move(accounts)},
            {"audit", std::move(audit)}};
}

Snapshot snapshot_from_json(const json& doc) {
    try {
        Snapshot s;
        s.schema_version = doc.at("schema_version").get<int>();
        if (s.schema_version != kSchemaVersion)
            throw StoreError("unsupported snapshot schema version " + std::to_string(s.schema_version));
        s.corpus = corpus_from_json(doc.at("corpus"));
        if (!doc.at("ruleset").is_null()) s.ruleset = rules_from_json(doc.at("ruleset"));
        if (!doc.at("settings").is_null()) s.settings = settings_from_json(doc.at("settings"));
        for (const auto& [name, o] : doc.at("results").items()) s.results.emplace(name, outcome_from_json(name, o));
        for (const auto& [name, a] : doc.at("accounts").items()) {
            AccountState acc;
            acc.username = a.at("username").get<std::string>();
            if (acc.username != name) throw StoreError("account key \"" + name + "\" does not match its username");
            acc.state = parse_required<AccountStatus>(a.at("state"), account_status_from_string, "account state");
            acc.tier = parse_tier(a.at("tier"));
            for (const auto& h : a.at("history")) acc.history.push_back(action_from_json(h));
            s.accounts.emplace(name, std::move(acc));
        }
        for (const auto& e : doc.at("audit")) s.audit.push_back(audit_entry_from_json(e));
        return s;
    } catch (const StoreError&) {
        throw;
    } catch (const json::exception& e) {
        throw StoreError(std::string("corrupt snapshot: ") + e.what());
    } catch (const Error& e) {
        throw StoreError(std::string("corrupt snapshot: ") + e.what());
    }
}

// ---- files ----

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) io_error("cannot open", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
    const fs::path tmp = path.string() + ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) io_error("cannot create", tmp);

    const auto fail = [&](const char* what) {
        const int saved = errno;
        ::close(fd);
        ::unlink(tmp.c_str());
        errno = saved;
        io_error(what, tmp);
    };
    std::size_t written = 0;
    while (written < contents.size()) {
        const auto n = ::write(fd, contents.data() + written, contents.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            fail("cannot write");
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0) fail("cannot sync");
    if (::close(fd) != 0) {
        ::unlink(tmp.c_str());
        io_error("cannot close", tmp);
    }
    if (::rename(tmp.c_str(), path.c_str()) != 0) {
        const int saved = errno;
        ::unlink(tmp.c_str());
        errno = saved;
        io_error("cannot replace", path);
    }
    const auto dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    if (const int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC); dfd >= 0) {
        ::fsync(dfd);
        ::close(dfd);
    }
}

StoreLock::StoreLock(const fs::path& store_path) {
    const fs::path lock = store_path.string() + ".lock";
    fd_ = ::open(lock.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) io_error("cannot open lock file", lock);
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        const bool busy = errno == EWOULDBLOCK;
        ::close(fd_);
        fd_ = -1;
        if (busy) throw StoreLocked("store " + store_path.string() + " is locked by another process");
        io_error("cannot lock", lock);
    }
}

StoreLock::~StoreLock() {
    if (fd_ >= 0) ::close(fd_);  // releases the flock
}

Store::Store(fs::path path) : path_(std::move(path)) {}

fs::path Store::journal_path() const { return path_.string() + ".journal"; }

bool Store::exists() const { return fs::exists(path_); }

Snapshot Store::load() const {
    json doc;
    const auto text = read_file(path_);
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw StoreError("corrupt snapshot " + path_.string() + ": " + e.what());
    }
    Snapshot snapshot = snapshot_from_json(doc);
    snapshot.check_consistency();

    std::ifstream journal(journal_path());
    if (!journal) return snapshot;
    std::vector<std::string> lines;
    for (std::string line; std::getline(journal, line);)
        if (!line.empty()) lines.push_back(std::move(line));
    for (std::size_t i = 0; i < lines.size(); ++i) {
        AuditEntry entry;
        try {
            entry = audit_entry_from_json(json::parse(lines[i]));
        } catch (const std::exception& e) {
            if (i + 1 == lines.size()) break;  // torn final write
            throw StoreError("corrupt journal line " + std::to_string(i + 1) + ": " + e.what());
        }
        if (entry.seq <= snapshot.audit.size()) continue;  // already folded into the snapshot
        if (entry.seq != snapshot.audit.size() + 1)
            throw StoreError("journal gap: expected entry " + std::to_string(snapshot.audit.size() + 1) + ", found " +
                             std::to_string(entry.seq));
        try {
            snapshot.record(entry.username, entry.action, entry.action.tier);
        } catch (const Error& e) {
            throw StoreError("journal entry " + std::to_string(entry.seq) + " does not apply: " + e.what());
        }
    }
    return snapshot;
}

Snapshot Store::recover() const {
    Snapshot snapshot = load();
    std::error_code ec;
    if (fs::exists(journal_path(), ec) && fs::file_size(journal_path(), ec) > 0) save(snapshot);
    return snapshot;
}

void Store::save(const Snapshot& snapshot) const {
    write_file_atomic(path_, snapshot_to_json(snapshot).dump(1) + "\n");
    // Everything in the journal is now covered by the snapshot.
    if (fs::exists(journal_path())) {
        const int fd = ::open(journal_path().c_str(), O_WRONLY | O_TRUNC | O_CLOEXEC);
        if (fd >= 0) {
            ::fsync(fd);
            ::close(fd);
        }
    }
}

void Store::append_journal(const AuditEntry& entry) const {
    const auto line = audit_entry_to_json(entry).dump() + "\n";
    const int fd = ::open(journal_path().c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) io_error("cannot open journal", journal_path());
    std::size_t written = 0;
    while (written < line.size()) {
        const auto n = ::write(fd, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            ::close(fd);
            io_error("cannot append to journal", journal_path());
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0) {
        ::close(fd);
        io_error("cannot sync journal", journal_path());
    }
    ::close(fd);
}

}  // namespace sdprofile
