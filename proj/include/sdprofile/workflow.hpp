#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdprofile/time.hpp"
#include "sdprofile/verification.hpp"

namespace sdprofile {

enum class AccountStatus { unverified, analyzed, change_requested, monitored, banned, cleared };

enum class ActionKind { analyze, request_change, member_updated, mark_monitored, ban, unban, clear };

inline constexpr std::array<AccountStatus, 6> kAccountStatuses{
    AccountStatus::unverified, AccountStatus::analyzed, AccountStatus::change_requested,
    AccountStatus::monitored,  AccountStatus::banned,   AccountStatus::cleared};

inline constexpr std::array<ActionKind, 7> kActionKinds{
    ActionKind::analyze, ActionKind::request_change, ActionKind::member_updated, ActionKind::mark_monitored,
    ActionKind::ban,     ActionKind::unban,          ActionKind::clear};

std::string_view to_string(AccountStatus s);
std::string_view to_string(ActionKind a);
std::optional<AccountStatus> account_status_from_string(std::string_view s);
std::optional<ActionKind> action_from_string(std::string_view s);

struct ModerationAction {
    ActionKind action = ActionKind::analyze;
    std::string actor;  // moderator id or "system"
    Timestamp at{};
    std::optional<std::string> note;
    // Classification the transition was evaluated against. Recorded so that
    // replaying a history needs nothing but the history.
    std::optional<Tier> tier;

    bool operator==(const ModerationAction&) const = default;
};

struct AccountState {
    std::string username;
    AccountStatus state = AccountStatus::unverified;
    std::optional<Tier> tier;  // from the latest analyze; cleared by member_updated/unban
    std::vector<ModerationAction> history;

    bool operator==(const AccountState&) const = default;
};

// The transition table. `tier` is the account's current classification
// (ignored by actions that do not depend on it). Empty = illegal.
//
//   unverified       analyze                     -> analyzed
//   analyzed         clear          [reliable]   -> cleared
//   analyzed         request_change [suspicion]  -> change_requested
//   analyzed         ban            [pseudo_user]-> banned
//   change_requested member_updated              -> analyzed (tier reset)
//   change_requested mark_monitored              -> monitored
//   monitored        analyze                     -> analyzed
//   banned           unban                       -> unverified (tier reset)
//   any but banned   analyze                     -> analyzed
std::optional<AccountStatus> transition(AccountStatus from, ActionKind action, std::optional<Tier> tier);

// Value semantics: returns the successor and leaves `state` untouched.
// For `analyze`, tier_context is the new classification; other actions are
// guarded by the tier recorded by the latest analyze.
// Throws IllegalTransition, OutOfOrderAction.
AccountState apply_action(const AccountState& state, ModerationAction action, std::optional<Tier> tier_context);

std::vector<ActionKind> available_actions(const AccountState& state);

// Rebuilds an account from its history alone. Throws like apply_action.
AccountState replay(const std::string& username, std::span<const ModerationAction> history);

}  // namespace sdprofile
