#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sdprofile/characteristics.hpp"
#include "sdprofile/text.hpp"
#include "sdprofile/time.hpp"

namespace sdprofile {

enum class Role { administrator, moderator, member, banned };

std::string_view to_string(Role r);
std::optional<Role> role_from_string(std::string_view s);

// Profile data as the member filled it in. Any of the four characteristics may
// be missing.
struct DeclaredProfile {
    std::string username;
    Role role = Role::member;
    std::optional<Pole> age;
    std::optional<Pole> education;
    std::optional<Pole> gender;
    std::optional<Pole> sphere;
    std::optional<std::string> location;
    Timestamp registered{};

    std::optional<Pole> declared(Characteristic c) const;
    void set_declared(Characteristic c, std::optional<Pole> p);

    bool operator==(const DeclaredProfile&) const = default;
};

struct Post {
    std::string id;
    std::string author;
    Timestamp at{};
    std::string body;

    bool operator==(const Post&) const = default;
};

// A member's declared profile plus everything they posted, ordered by
// (timestamp, post id). Tokenization of every post is done once here and
// shared by the indicator evaluation.
class InformationTrack {
public:
    InformationTrack(DeclaredProfile profile, std::vector<Post> posts);

    const DeclaredProfile& profile() const { return profile_; }
    const std::string& username() const { return profile_.username; }
    const std::vector<Post>& posts() const { return posts_; }
    // Tokens of posts()[i].
    const std::vector<Token>& tokens(std::size_t i) const { return tokens_[i]; }
    // Word-class tokens over all posts.
    std::size_t token_count() const { return token_count_; }

    bool operator==(const InformationTrack& other) const {
        return profile_ == other.profile_ && posts_ == other.posts_;
    }

private:
    DeclaredProfile profile_;
    std::vector<Post> posts_;
    std::vector<std::vector<Token>> tokens_;
    std::size_t token_count_ = 0;
};

struct ExportMetadata {
    std::string source;
    Timestamp exported_at{};

    bool operator==(const ExportMetadata&) const = default;
};

// Immutable after construction; safe to share across threads.
class Corpus {
public:
    using MemberMap = std::map<std::string, InformationTrack, std::less<>>;

    Corpus() = default;
    // Throws DuplicateUsername.
    Corpus(ExportMetadata metadata, std::vector<InformationTrack> tracks);

    const ExportMetadata& metadata() const { return metadata_; }
    const MemberMap& members() const { return members_; }
    const InformationTrack* find(std::string_view username) const;
    std::size_t post_count() const;
    bool empty() const { return members_.empty(); }

    bool operator==(const Corpus&) const = default;

private:
    ExportMetadata metadata_;
    MemberMap members_;
};

struct ParseOptions {
    // Accept (and ignore) fields that are not part of the export schema.
    bool lenient = false;
};

// Throws SyntaxError, SchemaError, UnknownAuthor, InvalidTimestamp,
// DuplicateUsername, DuplicatePostId.
Corpus parse_export(std::string_view document, ParseOptions options = {});
Corpus corpus_from_json(const nlohmann::json& document, ParseOptions options = {});

nlohmann::json corpus_to_json(const Corpus& corpus);
std::string serialize_export(const Corpus& corpus);

// Converts an nlohmann parse failure into a SyntaxError with line/column.
[[noreturn]] void throw_syntax_error(std::string_view document, const nlohmann::json::parse_error& e);

enum class ActivityLevel { low, medium, high };

std::string_view to_string(ActivityLevel a);

struct ActivityThresholds {
    std::size_t low_below = 5;    // count < low_below  -> low
    std::size_t high_from = 50;   // count >= high_from -> high
};

// Posts with timestamp in [now - window_days, now].
std::size_t posts_in_window(const InformationTrack& track, int window_days, Timestamp now);

ActivityLevel activity_level(const InformationTrack& track, int window_days, Timestamp now,
                             ActivityThresholds thresholds = {});

}  // namespace sdprofile
