#include "sdprofile/corpus.hpp"

#include <algorithm>
#include <initializer_list>
#include <memory>
#include <set>
#include <unordered_map>

#include "sdprofile/errors.hpp"

namespace sdprofile {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kRoleNames{"administrator", "moderator", "member", "banned"};
constexpr std::array<std::string_view, 3> kActivityNames{"low", "medium", "high"};

bool post_order(const Post& a, const Post& b) {
    if (a.at != b.at) return a.at < b.at;
    return a.id < b.id;
}

// Schema helpers. `where` is a JSON-pointer-like path used in messages.

const json& require(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(where + ": missing field \"" + key + "\"");
    return *it;
}

const json* optional_field(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
}

void require_object(const json& v, const std::string& where) {
    if (!v.is_object()) throw SchemaError(where + ": expected an object");
}

void require_array(const json& v, const std::string& where) {
    if (!v.is_array()) throw SchemaError(where + ": expected an array");
}

std::string require_string(const json& v, const std::string& where) {
    if (!v.is_string()) throw SchemaError(where + ": expected a string");
    return v.get<std::string>();
}

void check_fields(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where,
                  const ParseOptions& options) {
    if (options.lenient) return;
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw SchemaError(where + ": unknown field \"" + key + "\"");
    }
}

Timestamp require_time(const json& obj, const char* key, const std::string& where) {
    const auto text = require_string(require(obj, key, where), where + "/" + key);
    try {
        return parse_rfc3339(text);
    } catch (const InvalidTimestamp& e) {
        throw InvalidTimestamp(where + "/" + key + ": " + e.what());
    }
}

DeclaredProfile parse_member(const json& m, const std::string& where, const ParseOptions& options) {
    require_object(m, where);
    check_fields(m, {"username", "role", "declared", "location", "registered"}, where, options);

    DeclaredProfile profile;
    profile.username = require_string(require(m, "username", where), where + "/username");
    if (profile.username.empty()) throw SchemaError(where + "/username: must not be empty");

    const auto role_text = require_string(require(m, "role", where), where + "/role");
    const auto role = role_from_string(role_text);
    if (!role) throw SchemaError(where + "/role: unknown role \"" + role_text + "\"");
    profile.role = *role;

    if (const json* declared = optional_field(m, "declared")) {
        const auto dwhere = where + "/declared";
        require_object(*declared, dwhere);
        check_fields(*declared, {"age", "education", "gender", "sphere"}, dwhere, options);
        for (const auto c : kCharacteristics) {
            const auto key = std::string(to_string(c));
            const json* v = optional_field(*declared, key.c_str());
            if (!v) continue;
            const auto text = require_string(*v, dwhere + "/" + key);
            const auto pole = pole_from_string(c, text);
            if (!pole) throw SchemaError(dwhere + "/" + key + ": \"" + text + "\" is not a value of " + key);
            profile.set_declared(c, *pole);
        }
    }
    if (const json* loc = optional_field(m, "location"))
        profile.location = require_string(*loc, where + "/location");
    profile.registered = require_time(m, "registered", where);
    return profile;
}

Post parse_post(const json& p, const std::string& where, const ParseOptions& options) {
    require_object(p, where);
    check_fields(p, {"id", "author", "at", "body"}, where, options);
    Post post;
    post.id = require_string(require(p, "id", where), where + "/id");
    post.author = require_string(require(p, "author", where), where + "/author");
    post.at = require_time(p, "at", where);
    post.body = require_string(require(p, "body", where), where + "/body");
    return post;
}

}  // namespace

std::string_view to_string(Role r) { return kRoleNames[static_cast<std::size_t>(r)]; }

std::optional<Role> role_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kRoleNames.size(); ++i)
        if (kRoleNames[i] == s) return static_cast<Role>(i);
    return std::nullopt;
}

std::string_view to_string(ActivityLevel a) { return kActivityNames[static_cast<std::size_t>(a)]; }

std::optional<Pole> DeclaredProfile::declared(Characteristic c) const {
    switch (c) {
        case Characteristic::age: return age;
        case Characteristic::education: return education;
        case Characteristic::gender: return gender;
        case Characteristic::sphere: return sphere;
    }
    return std::nullopt;
}

void DeclaredProfile::set_declared(Characteristic c, std::optional<Pole> p) {
    switch (c) {
        case Characteristic::age: age = p; break;
        case Characteristic::education: education = p; break;
        case Characteristic::gender: gender = p; break;
        case Characteristic::sphere: sphere = p; break;
    }
}

InformationTrack::InformationTrack(DeclaredProfile profile, std::vector<Post> posts)
    : profile_(std::move(profile)), posts_(std::move(posts)) {
    std::sort(posts_.begin(), posts_.end(), post_order);
    tokens_.reserve(posts_.size());
    for (const auto& post : posts_) {
        tokens_.push_back(tokenize(post.body));
        for (const auto& t : tokens_.back()) token_count_ += t.cls == TokenClass::word;
    }
}

Corpus::Corpus(ExportMetadata metadata, std::vector<InformationTrack> tracks) : metadata_(std::move(metadata)) {
    for (auto& track : tracks) {
        auto name = track.username();
        if (!members_.emplace(name, std::move(track)).second) throw DuplicateUsername(name);
    }
}

const InformationTrack* Corpus::find(std::string_view username) const {
    const auto it = members_.find(username);
    return it == members_.end() ? nullptr : &it->second;
}

std::size_t Corpus::post_count() const {
    std::size_t n = 0;
    for (const auto& [_, track] : members_) n += track.posts().size();
    return n;
}

void throw_syntax_error(std::string_view document, const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, document.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
        if (document[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    throw SyntaxError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + e.what(),
                      line, column);
}

Corpus parse_export(std::string_view document, ParseOptions options) {
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw_syntax_error(document, e);
    }
    return corpus_from_json(doc, options);
}

Corpus corpus_from_json(const json& doc, ParseOptions options) {
    require_object(doc, "");
    check_fields(doc, {"export", "members", "posts"}, "", options);

    const json& exp = require(doc, "export", "");
    require_object(exp, "/export");
    check_fields(exp, {"source", "exported_at"}, "/export", options);
    ExportMetadata meta;
    meta.source = require_string(require(exp, "source", "/export"), "/export/source");
    meta.exported_at = require_time(exp, "exported_at", "/export");

    const json& members = require(doc, "members", "");
    require_array(members, "/members");
    const json& posts = require(doc, "posts", "");
    require_array(posts, "/posts");

    std::vector<DeclaredProfile> profiles;
    profiles.reserve(members.size());
    std::unordered_map<std::string, std::size_t> by_name;
    for (std::size_t i = 0; i < members.size(); ++i) {
        profiles.push_back(parse_member(members[i], "/members/" + std::to_string(i), options));
        if (!by_name.emplace(profiles.back().username, i).second) throw DuplicateUsername(profiles.back().username);
    }

    std::vector<std::vector<Post>> posts_by_member(profiles.size());
    std::set<std::string, std::less<>> post_ids;
    Timestamp latest = meta.exported_at;
    for (std::size_t i = 0; i < posts.size(); ++i) {
        const auto where = "/posts/" + std::to_string(i);
        Post post = parse_post(posts[i], where, options);
        const auto it = by_name.find(post.author);
        if (it == by_name.end()) throw UnknownAuthor(post.author);
        if (!post_ids.insert(post.id).second) throw DuplicatePostId(post.id);
        const auto& author = profiles[it->second];
        if (post.at < author.registered)
            throw InvalidTimestamp(where + ": post \"" + post.id + "\" at " + format_rfc3339(post.at) +
                                   " precedes registration of \"" + author.username + "\"");
        latest = std::max(latest, post.at);
        posts_by_member[it->second].push_back(std::move(post));
    }

    for (const auto& profile : profiles) {
        if (profile.registered > latest)
            throw InvalidTimestamp("member \"" + profile.username + "\" registered at " +
                                   format_rfc3339(profile.registered) + ", after the end of the export");
    }

    // Track assembly tokenizes every post; members are independent.
    std::vector<std::unique_ptr<InformationTrack>> built(profiles.size());
    const auto n = static_cast<std::ptrdiff_t>(profiles.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        built[i] = std::make_unique<InformationTrack>(profiles[i], std::move(posts_by_member[i]));

    std::vector<InformationTrack> tracks;
    tracks.reserve(built.size());
    for (auto& t : built) tracks.push_back(std::move(*t));
    return Corpus(std::move(meta), std::move(tracks));
}

json corpus_to_json(const Corpus& corpus) {
    json members = json::array();
    json posts = json::array();
    for (const auto& [name, track] : corpus.members()) {
        const auto& p = track.profile();
        json m = {{"username", p.username}, {"role", to_string(p.role)}, {"registered", format_rfc3339(p.registered)}};
        json declared = json::object();
        for (const auto c : kCharacteristics)
            if (const auto pole = p.declared(c)) declared[std::string(to_string(c))] = to_string(*pole);
        m["declared"] = std::move(declared);
        if (p.location) m["location"] = *p.location;
        members.push_back(std::move(m));
        for (const auto& post : track.posts())
            posts.push_back({{"id", post.id}, {"author", post.author}, {"at", format_rfc3339(post.at)}, {"body", post.body}});
    }
    return {{"export", {{"source", corpus.metadata().source}, {"exported_at", format_rfc3339(corpus.metadata().exported_at)}}},
            {"members", std::move(members)},
            {"posts", std::move(posts)}};
}

std::string serialize_export(const Corpus& corpus) { return corpus_to_json(corpus).dump(2); }

std::size_t posts_in_window(const InformationTrack& track, int window_days, Timestamp now) {
    const Timestamp from = now - std::chrono::days{window_days};
    const auto& posts = track.posts();
    const auto lo = std::lower_bound(posts.begin(), posts.end(), from,
                                     [](const Post& p, Timestamp t) { return p.at < t; });
    const auto hi = std::upper_bound(posts.begin(), posts.end(), now,
                                     [](Timestamp t, const Post& p) { return t < p.at; });
    return lo < hi ? static_cast<std::size_t>(hi - lo) : 0;
}

ActivityLevel activity_level(const InformationTrack& track, int window_days, Timestamp now,
                             ActivityThresholds thresholds) {
    const auto count = posts_in_window(track, window_days, now);
    if (count < thresholds.low_below) return ActivityLevel::low;
    if (count < thresholds.high_from) return ActivityLevel::medium;
    return ActivityLevel::high;
}

}  // namespace sdprofile
