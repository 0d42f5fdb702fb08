#include "sdprofile/workflow.hpp"

#include "sdprofile/errors.hpp"

namespace sdprofile {
namespace {

constexpr std::array<std::string_view, 6> kStatusNames{"unverified", "analyzed", "change_requested",
                                                       "monitored",  "banned",   "cleared"};
constexpr std::array<std::string_view, 7> kActionNames{"analyze", "request_change", "member_updated", "mark_monitored",
                                                       "ban",     "unban",          "clear"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i)
        if (names[i] == s) return static_cast<Enum>(i);
    return std::nullopt;
}

}  // namespace

std::string_view to_string(AccountStatus s) { return kStatusNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(ActionKind a) { return kActionNames[static_cast<std::size_t>(a)]; }
std::optional<AccountStatus> account_status_from_string(std::string_view s) { return lookup<AccountStatus>(kStatusNames, s); }
std::optional<ActionKind> action_from_string(std::string_view s) { return lookup<ActionKind>(kActionNames, s); }

std::optional<AccountStatus> transition(AccountStatus from, ActionKind action, std::optional<Tier> tier) {
    using S = AccountStatus;
    using A = ActionKind;
    if (action == A::analyze) return from == S::banned ? std::nullopt : std::optional{S::analyzed};

    switch (from) {
        case S::analyzed:
            if (action == A::clear && tier == Tier::reliable) return S::cleared;
            if (action == A::request_change && tier == Tier::suspicion) return S::change_requested;
            if (action == A::ban && tier == Tier::pseudo_user) return S::banned;
            break;
        case S::change_requested:
            if (action == A::member_updated) return S::analyzed;
            if (action == A::mark_monitored) return S::monitored;
            break;
        case S::banned:
            if (action == A::unban) return S::unverified;
            break;
        case S::unverified:
        case S::monitored:
        case S::cleared:
            break;
    }
    return std::nullopt;
}

AccountState apply_action(const AccountState& state, ModerationAction action, std::optional<Tier> tier_context) {
    const auto next = transition(state.state, action.action,
                                 action.action == ActionKind::analyze ? tier_context : state.tier);
    if (!next) throw IllegalTransition(std::string(to_string(state.state)), std::string(to_string(action.action)));
    if (!state.history.empty() && action.at < state.history.back().at)
        throw OutOfOrderAction("action at " + format_rfc3339(action.at) + " precedes the last recorded action at " +
                               format_rfc3339(state.history.back().at));

    AccountState out = state;
    out.state = *next;
    switch (action.action) {
        case ActionKind::analyze: out.tier = tier_context; break;
        case ActionKind::member_updated:
        case ActionKind::unban: out.tier.reset(); break;
        default: break;
    }
    action.tier = action.action == ActionKind::analyze ? tier_context : state.tier;
    out.history.push_back(std::move(action));
    return out;
}

std::vector<ActionKind> available_actions(const AccountState& state) {
    std::vector<ActionKind> out;
    for (const auto a : kActionKinds) {
        // analyze is always evaluated by the system; its tier does not gate it.
        if (transition(state.state, a, state.tier)) out.push_back(a);
    }
    return out;
}

AccountState replay(const std::string& username, std::span<const ModerationAction> history) {
    AccountState state;
    state.username = username;
    for (const auto& action : history) state = apply_action(state, action, action.tier);
    return state;
}

}  // namespace sdprofile
