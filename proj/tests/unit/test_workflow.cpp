#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sdprofile/errors.hpp"
#include "sdprofile/time.hpp"
#include "sdprofile/workflow.hpp"

using namespace sdprofile;

namespace {

const std::array<std::optional<Tier>, 4> kTierContexts{std::nullopt, Tier::pseudo_user, Tier::suspicion, Tier::reliable};

Timestamp at(int minute) { return parse_rfc3339("2011-06-01T00:00:00Z") + std::chrono::minutes(minute); }

ModerationAction act(ActionKind k, int minute = 0, std::string actor = "mod") {
    return ModerationAction{k, std::move(actor), at(minute), std::nullopt, std::nullopt};
}

AccountState analyzed_with(Tier t) {
    return apply_action(AccountState{"u"}, act(ActionKind::analyze), t);
}

}  // namespace

TEST_CASE("exhaustive (state, action, tier) enumeration matches the table") {
    for (const auto s : kAccountStatuses)
        for (const auto a : kActionKinds)
            for (const auto t : kTierContexts) {
                CAPTURE(to_string(s));
                CAPTURE(to_string(a));
                CHECK(transition(s, a, t) == testing::oracle_transition(s, a, t));
            }
}

TEST_CASE("table rows") {
    const auto s = apply_action(AccountState{"u"}, act(ActionKind::analyze), Tier::suspicion);
    CHECK(s.state == AccountStatus::analyzed);
    CHECK(s.tier == Tier::suspicion);
    REQUIRE(s.history.size() == 1);
    CHECK(s.history[0].tier == Tier::suspicion);

    const auto requested = apply_action(s, act(ActionKind::request_change, 1), std::nullopt);
    CHECK(requested.state == AccountStatus::change_requested);
    const auto updated = apply_action(requested, act(ActionKind::member_updated, 2, "system"), std::nullopt);
    CHECK(updated.state == AccountStatus::analyzed);
    CHECK_FALSE(updated.tier);
    // A reset tier guards nothing until the next analyze.
    CHECK(available_actions(updated) == std::vector<ActionKind>{ActionKind::analyze});

    const auto monitored = apply_action(requested, act(ActionKind::mark_monitored, 2), std::nullopt);
    CHECK(monitored.state == AccountStatus::monitored);
    CHECK(apply_action(monitored, act(ActionKind::analyze, 3), Tier::reliable).state == AccountStatus::analyzed);

    const auto cleared = apply_action(analyzed_with(Tier::reliable), act(ActionKind::clear, 1), std::nullopt);
    CHECK(cleared.state == AccountStatus::cleared);
}

TEST_CASE("cleared + ban is illegal and names state and action") {
    const auto cleared = apply_action(analyzed_with(Tier::reliable), act(ActionKind::clear, 1), std::nullopt);
    try {
        apply_action(cleared, act(ActionKind::ban, 2), Tier::pseudo_user);
        FAIL("expected IllegalTransition");
    } catch (const IllegalTransition& e) {
        CHECK(e.state() == "cleared");
        CHECK(e.action() == "ban");
    }
}

TEST_CASE("analyzed pseudo_user + ban -> banned, then unban resets") {
    const auto s = analyzed_with(Tier::pseudo_user);
    const auto banned = apply_action(s, act(ActionKind::ban, 1), std::nullopt);
    CHECK(banned.state == AccountStatus::banned);
    CHECK(available_actions(banned) == std::vector<ActionKind>{ActionKind::unban});
    CHECK_THROWS_AS(apply_action(banned, act(ActionKind::analyze, 2), Tier::reliable), IllegalTransition);
    const auto unbanned = apply_action(banned, act(ActionKind::unban, 2), std::nullopt);
    CHECK(unbanned.state == AccountStatus::unverified);
    CHECK_FALSE(unbanned.tier);
    CHECK(unbanned.history.size() == 3);
    // Value semantics
    CHECK(s.history.size() == 1);
    CHECK(s.state == AccountStatus::analyzed);
}

TEST_CASE("guards use the recorded tier, not the caller's context") {
    const auto s = analyzed_with(Tier::reliable);
    CHECK_THROWS_AS(apply_action(s, act(ActionKind::ban, 1), Tier::pseudo_user), IllegalTransition);
    CHECK_THROWS_AS(apply_action(s, act(ActionKind::request_change, 1), std::nullopt), IllegalTransition);
    CHECK(available_actions(s) == std::vector<ActionKind>{ActionKind::analyze, ActionKind::clear});
}

TEST_CASE("actions must not go back in time") {
    const auto s = apply_action(AccountState{"u"}, act(ActionKind::analyze, 10), Tier::suspicion);
    CHECK_THROWS_AS(apply_action(s, act(ActionKind::request_change, 9), std::nullopt), OutOfOrderAction);
    CHECK_NOTHROW(apply_action(s, act(ActionKind::request_change, 10), std::nullopt));
}

TEST_CASE("string conversions") {
    for (const auto s : kAccountStatuses) CHECK(account_status_from_string(to_string(s)) == s);
    for (const auto a : kActionKinds) CHECK(action_from_string(to_string(a)) == a);
    CHECK_FALSE(action_from_string("delete"));
    CHECK(to_string(ActionKind::request_change) == "request_change");
}

TEST_CASE("property: random legal sequences replay from history alone") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> tier_pick(0, 2);
    std::uniform_int_distribution<int> len(1, 40);
    std::size_t bans = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        AccountState s{"member"};
        int minute = 0;
        for (int i = len(rng); i > 0; --i) {
            const auto legal = available_actions(s);
            REQUIRE_FALSE(legal.empty());
            const auto a = legal[std::uniform_int_distribution<std::size_t>(0, legal.size() - 1)(rng)];
            const std::optional<Tier> ctx =
                a == ActionKind::analyze ? std::optional<Tier>(static_cast<Tier>(tier_pick(rng))) : std::nullopt;
            const auto before = s;
            s = apply_action(s, act(a, minute += tier_pick(rng)), ctx);
            if (s.state == AccountStatus::banned && before.state != AccountStatus::banned) {
                ++bans;
                REQUIRE(before.tier == Tier::pseudo_user);
                REQUIRE(s.history.back().tier == Tier::pseudo_user);
            }
        }
        REQUIRE(replay("member", s.history) == s);
    }
    CHECK(bans > 0);
}

TEST_CASE("property: illegal actions never change state") {
    std::mt19937 rng(6);
    std::uniform_int_distribution<std::size_t> any_action(0, kActionKinds.size() - 1);
    AccountState s{"m"};
    int minute = 0;
    for (int i = 0; i < 2000; ++i) {
        const auto a = kActionKinds[any_action(rng)];
        const auto ctx = kTierContexts[i % 4];
        const auto before = s;
        try {
            s = apply_action(s, act(a, ++minute), ctx);
        } catch (const IllegalTransition&) {
            REQUIRE(s == before);
            REQUIRE_FALSE(transition(s.state, a, a == ActionKind::analyze ? ctx : s.tier));
        }
    }
}
