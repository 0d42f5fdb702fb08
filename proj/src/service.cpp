#include "sdprofile/service.hpp"

#include <charconv>
#include <fstream>
#include <mutex>
#include <shared_mutex>

#include <httplib.h>
#include <json.hpp>

#include "sdprofile/commands.hpp"
#include "sdprofile/errors.hpp"
#include "sdprofile/store.hpp"

namespace sdprofile {

using nlohmann::json;

namespace {

constexpr std::size_t kDefaultPageSize = 50;
constexpr std::size_t kMaxPageSize = 1000;

struct ApiFailure {
    ApiErrorCode code;
    std::string message;
    json detail;
};

[[noreturn]] void fail(ApiErrorCode code, std::string message, json detail = nullptr) {
    throw ApiFailure{code, std::move(message), std::move(detail)};
}

ApiResponse json_response(const json& body, int status = 200) { return {status, body.dump(2) + "\n", "application/json"}; }

ApiResponse error_response(const ApiFailure& f) {
    json err = {{"code", to_string(f.code)}, {"message", f.message}};
    if (!f.detail.is_null()) err["detail"] = f.detail;
    return json_response({{"error", std::move(err)}}, http_status(f.code));
}

std::optional<std::string> param(const QueryParams& params, const std::string& key) {
    const auto it = params.find(key);
    if (it == params.end() || it->second.empty()) return std::nullopt;
    return it->second;
}

json available_actions_json(const AccountState& account) {
    json out = json::array();
    for (const auto a : available_actions(account)) out.push_back(to_string(a));
    return out;
}

json member_summary(const ReportRow& row, const AccountState& account) {
    json j = report_row_to_json(row);
    j["state"] = to_string(account.state);
    j["last_action_at"] = account.history.empty() ? json() : json(format_rfc3339(account.history.back().at));
    return j;
}

json declared_json(const DeclaredProfile& p) {
    json declared = json::object();
    for (const auto c : kCharacteristics) {
        const auto v = p.declared(c);
        declared[std::string(to_string(c))] = v ? json(to_string(*v)) : json();
    }
    return {{"username", p.username},
            {"role", to_string(p.role)},
            {"declared", std::move(declared)},
            {"location", p.location ? json(*p.location) : json()},
            {"registered", format_rfc3339(p.registered)}};
}

json verify_summary_json(const VerifySummary& s) {
    return {{"members", s.members},
            {"tiers",
             {{"pseudo_user", s.tier_counts[0]}, {"suspicion", s.tier_counts[1]}, {"reliable", s.tier_counts[2]}}},
            {"warnings", s.warnings}};
}

json parse_body(std::string_view body) {
    if (body.empty()) return json::object();
    try {
        auto j = json::parse(body.begin(), body.end());
        if (!j.is_object()) fail(ApiErrorCode::bad_request, "request body must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        fail(ApiErrorCode::bad_request, std::string("request body is not valid JSON: ") + e.what());
    }
}

PipelineConfig pipeline_config(const VerifySettings& s, Timestamp now, const Dictionary* dictionary) {
    PipelineConfig config;
    config.thresholds = s.thresholds;
    config.inference = s.inference;
    config.window_days = s.window_days;
    config.activity = s.activity;
    config.computed_at = now;
    config.dictionary = dictionary;
    return config;
}

}  // namespace

std::string_view to_string(ApiErrorCode c) {
    switch (c) {
        case ApiErrorCode::not_found: return "not_found";
        case ApiErrorCode::conflict: return "conflict";
        case ApiErrorCode::bad_request: return "bad_request";
        case ApiErrorCode::illegal_transition: return "illegal_transition";
        case ApiErrorCode::internal: return "internal";
    }
    return "internal";
}

int http_status(ApiErrorCode c) {
    switch (c) {
        case ApiErrorCode::not_found: return 404;
        case ApiErrorCode::conflict: return 409;
        case ApiErrorCode::bad_request: return 400;
        case ApiErrorCode::illegal_transition: return 409;
        case ApiErrorCode::internal: return 500;
    }
    return 500;
}

struct Service::Impl {
    Impl(std::filesystem::path path, Clock c) : lock(path), store(std::move(path)), clock(std::move(c)) {
        snapshot = store.exists() ? store.recover() : Snapshot{};
    }

    StoreLock lock;
    Store store;
    Clock clock;
    mutable std::shared_mutex mutex;
    Snapshot snapshot;
    httplib::Server server;

    ApiResponse route(std::string_view method, std::string_view path, const QueryParams& params,
                      std::string_view body) {
        if (method == "GET" && path == "/healthz") return json_response({{"status", "ok"}});
        if (method == "GET" && path == "/members") return list_members(params);
        if (method == "POST" && path == "/verify") return run_verify(body);
        if (method == "GET" && path == "/report") return report(params);

        constexpr std::string_view prefix = "/members/";
        constexpr std::string_view actions = "/actions";
        if (path.starts_with(prefix) && path.size() > prefix.size()) {
            auto rest = path.substr(prefix.size());
            if (method == "POST" && rest.ends_with(actions) && rest.size() > actions.size())
                return apply(std::string(rest.substr(0, rest.size() - actions.size())), body);
            if (method == "GET") return member_detail(std::string(rest));
        }
        fail(ApiErrorCode::not_found, "no route for " + std::string(method) + " " + std::string(path));
    }

    ApiResponse list_members(const QueryParams& params) {
        std::optional<Tier> tier;
        if (const auto t = param(params, "tier")) {
            tier = tier_from_string(*t);
            if (!tier) fail(ApiErrorCode::bad_request, "unknown tier \"" + *t + "\"");
        }
        std::optional<AccountStatus> state;
        if (const auto s = param(params, "state")) {
            state = account_status_from_string(*s);
            if (!state) fail(ApiErrorCode::bad_request, "unknown state \"" + *s + "\"");
        }
        std::size_t limit = kDefaultPageSize;
        if (const auto l = param(params, "limit")) {
            const auto [ptr, ec] = std::from_chars(l->data(), l->data() + l->size(), limit);
            if (ec != std::errc() || ptr != l->data() + l->size() || limit == 0 || limit > kMaxPageSize)
                fail(ApiErrorCode::bad_request, "limit must be an integer in [1, " + std::to_string(kMaxPageSize) + "]");
        }
        const auto cursor = param(params, "cursor");

        std::shared_lock read(mutex);
        const auto rows = build_report(snapshot.corpus, snapshot.results);
        json items = json::array();
        std::optional<std::string> next;
        for (const auto& row : rows) {
            if (cursor && row.username <= *cursor) continue;
            const auto& account = snapshot.accounts.at(row.username);
            if (tier && row.tier != tier) continue;
            if (state && account.state != *state) continue;
            if (items.size() == limit) {
                next = items.back().at("username").get<std::string>();
                break;
            }
            items.push_back(member_summary(row, account));
        }
        return json_response({{"items", std::move(items)}, {"next_cursor", next ? json(*next) : json()}});
    }

    ApiResponse member_detail(const std::string& username) {
        std::shared_lock read(mutex);
        const auto* track = snapshot.corpus.find(username);
        if (!track) fail(ApiErrorCode::not_found, "no member named \"" + username + "\"");
        const auto& account = snapshot.accounts.at(username);
        OutcomeMap one;
        json outcome = nullptr;
        if (const auto it = snapshot.results.find(username); it != snapshot.results.end()) {
            one.emplace(username, it->second);
            outcome = outcome_to_json(it->second);
        }
        Corpus single(snapshot.corpus.metadata(), {*track});
        const auto row = build_report(single, one).front();

        json out = {{"summary", member_summary(row, account)},
                    {"profile", declared_json(track->profile())},
                    {"inferred", outcome.is_null() ? json() : outcome.at("inferred")},
                    {"verification", outcome.is_null() ? json() : outcome.at("result")},
                    {"account", account_to_json(account)},
                    {"available_actions", available_actions_json(account)}};
        return json_response(out);
    }

    ApiResponse report(const QueryParams& params) {
        const auto f = param(params, "format").value_or("csv");
        const auto format = report_format_from_string(f);
        if (!format) fail(ApiErrorCode::bad_request, "format must be csv or json");
        std::shared_lock read(mutex);
        return {200, report_for(snapshot, *format), *format == ReportFormat::csv ? "text/csv" : "application/json"};
    }

    ApiResponse run_verify(std::string_view body) {
        const json req = parse_body(body);
        for (const auto& [key, _] : req.items()) {
            if (key != "rules" && key != "t_low" && key != "t_high" && key != "min_evidence" && key != "window_days")
                fail(ApiErrorCode::bad_request, "unknown field \"" + key + "\"");
        }

        std::unique_lock write(mutex);
        VerifySettings settings = snapshot.settings.value_or(VerifySettings{});
        try {
            if (req.contains("t_low")) settings.thresholds.t_low = req.at("t_low").get<double>();
            if (req.contains("t_high")) settings.thresholds.t_high = req.at("t_high").get<double>();
            if (req.contains("min_evidence")) settings.inference.min_evidence_tokens = req.at("min_evidence").get<std::size_t>();
            if (req.contains("window_days")) settings.window_days = req.at("window_days").get<int>();
        } catch (const json::exception& e) {
            fail(ApiErrorCode::bad_request, e.what());
        }

        std::optional<RuleSet> rules;
        if (req.contains("rules"))
            rules = rules_from_json(req.at("rules"));
        else
            rules = snapshot.ruleset;
        if (!rules) fail(ApiErrorCode::conflict, "no ruleset stored; supply \"rules\" or run the CLI verify first");

        Snapshot next = snapshot;
        const auto summary = verify_snapshot(next, std::move(*rules), settings, clock());
        store.save(next);
        snapshot = std::move(next);
        return json_response(verify_summary_json(summary));
    }

    ApiResponse apply(const std::string& username, std::string_view body) {
        const json req = parse_body(body);
        for (const auto& [key, _] : req.items())
            if (key != "action" && key != "actor" && key != "note")
                fail(ApiErrorCode::bad_request, "unknown field \"" + key + "\"");
        if (!req.contains("action") || !req.at("action").is_string())
            fail(ApiErrorCode::bad_request, "\"action\" must be a string");
        if (!req.contains("actor") || !req.at("actor").is_string() || req.at("actor").get<std::string>().empty())
            fail(ApiErrorCode::bad_request, "\"actor\" must be a non-empty string");
        if (req.contains("note") && !req.at("note").is_string() && !req.at("note").is_null())
            fail(ApiErrorCode::bad_request, "\"note\" must be a string");
        const auto action_name = req.at("action").get<std::string>();
        const auto kind = action_from_string(action_name);
        if (!kind) fail(ApiErrorCode::bad_request, "unknown action \"" + action_name + "\"");

        std::unique_lock write(mutex);
        const auto it = snapshot.accounts.find(username);
        if (it == snapshot.accounts.end()) fail(ApiErrorCode::not_found, "no member named \"" + username + "\"");
        const auto& account = it->second;

        Timestamp at = clock();
        if (!account.history.empty()) at = std::max(at, account.history.back().at);
        ModerationAction action{*kind, req.at("actor").get<std::string>(), at, std::nullopt, std::nullopt};
        if (req.contains("note") && req.at("note").is_string()) action.note = req.at("note").get<std::string>();

        // A moderator-requested analysis re-runs the pipeline for this member.
        std::optional<MemberOutcome> outcome;
        std::optional<Tier> tier_context;
        if (*kind == ActionKind::analyze) {
            if (!transition(account.state, *kind, std::nullopt))
                throw IllegalTransition(std::string(to_string(account.state)), action_name);
            if (!snapshot.ruleset) fail(ApiErrorCode::conflict, "no ruleset stored; run verify first");
            const auto settings = snapshot.settings.value_or(VerifySettings{});
            std::optional<Dictionary> dictionary;
            if (settings.dictionary_path) {
                std::ifstream in(*settings.dictionary_path);
                if (in) dictionary = Dictionary::load(in);
            }
            outcome = analyze_member(*snapshot.corpus.find(username), *snapshot.ruleset,
                                     pipeline_config(settings, at, dictionary ? &*dictionary : nullptr),
                                     snapshot.corpus.metadata().exported_at);
            tier_context = outcome->tier;
        }

        const AuditEntry entry = snapshot.prepare(username, action, tier_context);
        store.append_journal(entry);  // durable before acknowledgement
        snapshot.record(username, entry.action, entry.action.tier);
        if (outcome) snapshot.results.insert_or_assign(username, std::move(*outcome));
        store.save(snapshot);

        const auto& updated = snapshot.accounts.at(username);
        json out = account_to_json(updated);
        out["available_actions"] = available_actions_json(updated);
        return json_response(out);
    }
};

Service::Service(std::filesystem::path store_path, Clock clock)
    : impl_(std::make_unique<Impl>(std::move(store_path), std::move(clock))) {
    const auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        QueryParams params(req.params.begin(), req.params.end());
        const auto out = dispatch(req.method, req.path, params, req.body);
        res.status = out.status;
        res.set_content(out.body, out.content_type);
    };
    impl_->server.Get(".*", handler);
    impl_->server.Post(".*", handler);
}

Service::~Service() { stop(); }

ApiResponse Service::dispatch(std::string_view method, std::string_view path, const QueryParams& params,
                              std::string_view body) {
    try {
        return impl_->route(method, path, params, body);
    } catch (const ApiFailure& f) {
        return error_response(f);
    } catch (const NotFound& e) {
        return error_response({ApiErrorCode::not_found, e.what(), nullptr});
    } catch (const IllegalTransition& e) {
        return error_response(
            {ApiErrorCode::illegal_transition, e.what(), {{"state", e.state()}, {"action", e.action()}}});
    } catch (const ConflictError& e) {
        return error_response({ApiErrorCode::conflict, e.what(), nullptr});
    } catch (const StoreError& e) {
        return error_response({ApiErrorCode::internal, e.what(), nullptr});
    } catch (const Error& e) {
        // ConfigError, BadThresholds, OutOfOrderAction, ...
        return error_response({ApiErrorCode::bad_request, e.what(), nullptr});
    } catch (const std::exception& e) {
        return error_response({ApiErrorCode::internal, e.what(), nullptr});
    }
}

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int Service::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }

void Service::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

bool Service::is_running() const { return impl_->server.is_running(); }

}  // namespace sdprofile
