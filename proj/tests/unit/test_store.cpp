#include <doctest.h>

#include <fstream>

#include "sdprofile/commands.hpp"
#include "sdprofile/errors.hpp"
#include "sdprofile/store.hpp"
#include "sdprofile/time.hpp"
#include "synthetic.hpp"
#include "tempdir.hpp"

using namespace sdprofile;
namespace fs = std::filesystem;

namespace {

Snapshot verified_forum_snapshot() {
    auto snapshot = Snapshot::fresh(parse_export(testing::build_export(testing::forum_members()).dump()));
    verify_snapshot(snapshot, rules_from_json(testing::planted_rules_json()), VerifySettings{},
                    parse_rfc3339("2011-06-02T00:00:00Z"));
    return snapshot;
}

ModerationAction moderator(ActionKind a, const char* at) {
    return ModerationAction{a, "mod-1", parse_rfc3339(at), "checked", std::nullopt};
}

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) n += !line.empty();
    return n;
}

}  // namespace

TEST_CASE("snapshot round trip") {
    testing::TempDir dir;
    const Store store(dir / "s.json");
    CHECK_FALSE(store.exists());
    const auto snapshot = verified_forum_snapshot();
    store.save(snapshot);
    CHECK(store.exists());
    const auto loaded = store.load();
    CHECK(snapshot_to_json(loaded) == snapshot_to_json(snapshot));
    CHECK(loaded.results == snapshot.results);
    CHECK(loaded.accounts == snapshot.accounts);
    CHECK(loaded.audit == snapshot.audit);
    CHECK(loaded.settings == snapshot.settings);
    CHECK(loaded.audit.size() == 14);  // one system analyze per member
}

TEST_CASE("journal entries are folded in on load") {
    testing::TempDir dir;
    const Store store(dir / "s.json");
    auto snapshot = verified_forum_snapshot();
    store.save(snapshot);

    const auto entry = snapshot.prepare("iryna", moderator(ActionKind::ban, "2011-06-03T00:00:00Z"), std::nullopt);
    CHECK(entry.seq == 15);
    store.append_journal(entry);
    CHECK(line_count(store.journal_path()) == 1);

    const auto loaded = store.load();
    CHECK(loaded.accounts.at("iryna").state == AccountStatus::banned);
    CHECK(loaded.audit.size() == 15);
    // Snapshot on disk is unchanged until recovery.
    CHECK(snapshot_from_json(nlohmann::json::parse(read_file(store.path()))).audit.size() == 14);

    const auto recovered = store.recover();
    CHECK(recovered.accounts == loaded.accounts);
    CHECK(line_count(store.journal_path()) == 0);
    CHECK(store.load().audit.size() == 15);
}

TEST_CASE("a torn final journal line is ignored, a torn middle line is not") {
    testing::TempDir dir;
    const Store store(dir / "s.json");
    auto snapshot = verified_forum_snapshot();
    store.save(snapshot);
    store.append_journal(snapshot.prepare("iryna", moderator(ActionKind::ban, "2011-06-03T00:00:00Z"), std::nullopt));
    {
        std::ofstream j(store.journal_path(), std::ios::app);
        j << R"({"seq": 16, "username": "iry)";
    }
    const auto loaded = store.load();
    CHECK(loaded.audit.size() == 15);
    CHECK_NOTHROW(loaded.check_consistency());

    {
        std::ofstream j(store.journal_path(), std::ios::app);
        j << "\n" << nlohmann::json{{"seq", 16}}.dump() << "\n";
    }
    CHECK_THROWS_AS(store.load(), StoreError);
}

TEST_CASE("journal entries already in the snapshot are skipped") {
    testing::TempDir dir;
    const Store store(dir / "s.json");
    auto snapshot = verified_forum_snapshot();
    const auto entry = snapshot.prepare("iryna", moderator(ActionKind::ban, "2011-06-03T00:00:00Z"), std::nullopt);
    store.append_journal(entry);
    snapshot.record(entry.username, entry.action, std::nullopt);
    // Crash between writing the snapshot and truncating the journal.
    write_file_atomic(store.path(), snapshot_to_json(snapshot).dump(1) + "\n");
    const auto loaded = store.load();
    CHECK(loaded.audit.size() == 15);
    CHECK(loaded.accounts == snapshot.accounts);
}

TEST_CASE("consistency check catches tampering") {
    auto snapshot = verified_forum_snapshot();
    CHECK_NOTHROW(snapshot.check_consistency());
    CHECK(replay_audit(snapshot.corpus, snapshot.audit) == snapshot.accounts);

    SUBCASE("account state disagrees with its history") {
        snapshot.accounts.at("andriy").state = AccountStatus::cleared;
        CHECK_THROWS_AS(snapshot.check_consistency(), StoreError);
    }
    SUBCASE("audit entry dropped") {
        snapshot.audit.pop_back();
        CHECK_THROWS_AS(snapshot.check_consistency(), StoreError);
    }
    SUBCASE("result for an unknown member") {
        snapshot.results.emplace("ghost", snapshot.results.begin()->second);
        CHECK_THROWS_AS(snapshot.check_consistency(), StoreError);
    }
}

TEST_CASE("record rejects unknown members and illegal actions without side effects") {
    auto snapshot = verified_forum_snapshot();
    const auto before = snapshot_to_json(snapshot);
    CHECK_THROWS_AS(snapshot.record("ghost", moderator(ActionKind::clear, "2011-06-03T00:00:00Z"), std::nullopt),
                    NotFound);
    CHECK_THROWS_AS(snapshot.record("andriy", moderator(ActionKind::ban, "2011-06-03T00:00:00Z"), std::nullopt),
                    IllegalTransition);
    CHECK(snapshot_to_json(snapshot) == before);
}

TEST_CASE("corrupt or foreign snapshots are rejected") {
    testing::TempDir dir;
    const Store store(dir / "s.json");
    CHECK_THROWS_AS(store.load(), StoreError);
    write_file_atomic(store.path(), "{\"schema_version\": 1, ");
    CHECK_THROWS_AS(store.load(), StoreError);
    auto doc = snapshot_to_json(verified_forum_snapshot());
    doc["schema_version"] = 99;
    write_file_atomic(store.path(), doc.dump());
    CHECK_THROWS_AS(store.load(), StoreError);
}

TEST_CASE("store lock is exclusive") {
    testing::TempDir dir;
    const auto path = dir / "s.json";
    {
        StoreLock first(path);
        CHECK_THROWS_AS(StoreLock{path}, StoreLocked);
    }
    CHECK_NOTHROW(StoreLock{path});
}

TEST_CASE("atomic writes leave either the old or the new file") {
    testing::TempDir dir;
    const auto path = dir / "f.txt";
    write_file_atomic(path, "old");
    write_file_atomic(path, "new contents");
    CHECK(read_file(path) == "new contents");

    SUBCASE("missing parent directory") {
        const auto bad = dir / "missing" / "f.txt";
        CHECK_THROWS_AS(write_file_atomic(bad, "x"), StoreError);
        CHECK_FALSE(fs::exists(bad));
    }
    SUBCASE("target is a directory: rename fails, no temp file left") {
        const auto target = dir / "sub";
        fs::create_directory(target);
        CHECK_THROWS_AS(write_file_atomic(target, "x"), StoreError);
        CHECK(fs::is_directory(target));
        std::size_t entries = 0;
        for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++entries;
        CHECK(entries == 2);
    }
}
