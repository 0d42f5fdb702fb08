#include <doctest.h>

#include <random>

#include "sdprofile/corpus.hpp"
#include "sdprofile/errors.hpp"
#include "synthetic.hpp"

using namespace sdprofile;
using nlohmann::json;

namespace {

json base_export() {
    return json::parse(R"({
      "export": {"source": "test forum", "exported_at": "2011-06-01T00:00:00Z"},
      "members": [
        {"username": "olena", "role": "member",
         "declared": {"age": "adult", "gender": "woman"},
         "location": "Lviv", "registered": "2005-05-31T00:00:00Z"}
      ],
      "posts": [
        {"id": "p2", "author": "olena", "at": "2011-05-02T10:00:00Z", "body": "Second post, later."},
        {"id": "p1", "author": "olena", "at": "2011-05-01T10:00:00+02:00", "body": "First post!"}
      ]
    })");
}

}  // namespace

TEST_CASE("empty export gives an empty corpus") {
    const auto corpus = parse_export(R"({"export": {"source": "x", "exported_at": "2011-01-01T00:00:00Z"},
                                          "members": [], "posts": []})");
    CHECK(corpus.empty());
    CHECK(corpus.post_count() == 0);
    CHECK(corpus.metadata().source == "x");
}

TEST_CASE("posts are re-sorted by timestamp") {
    const auto corpus = parse_export(base_export().dump());
    const auto* t = corpus.find("olena");
    REQUIRE(t != nullptr);
    REQUIRE(t->posts().size() == 2);
    CHECK(t->posts()[0].id == "p1");
    CHECK(t->posts()[1].id == "p2");
    CHECK(t->profile().age == Pole::adult);
    CHECK(t->profile().gender == Pole::woman);
    CHECK_FALSE(t->profile().education.has_value());
    CHECK(t->profile().location == "Lviv");
    // "first post" + "second post later"
    CHECK(t->token_count() == 5);
}

TEST_CASE("ties on timestamp are broken by post id") {
    auto doc = base_export();
    doc["posts"] = json::array({
        {{"id", "b"}, {"author", "olena"}, {"at", "2011-05-01T00:00:00Z"}, {"body", "x"}},
        {{"id", "a"}, {"author", "olena"}, {"at", "2011-05-01T00:00:00Z"}, {"body", "y"}},
    });
    const auto corpus = parse_export(doc.dump());
    CHECK(corpus.find("olena")->posts()[0].id == "a");
}

TEST_CASE("post by an unknown member") {
    auto doc = base_export();
    doc["posts"].push_back({{"id", "p9"}, {"author", "ghost"}, {"at", "2011-05-03T00:00:00Z"}, {"body", "boo"}});
    try {
        parse_export(doc.dump());
        FAIL("expected UnknownAuthor");
    } catch (const UnknownAuthor& e) {
        CHECK(e.author() == "ghost");
        CHECK(std::string(e.what()).find("ghost") != std::string::npos);
    }
}

TEST_CASE("syntax errors carry line and column") {
    const std::string doc = "{\n  \"export\": {\"source\": \"x\",\n  oops }\n}";
    try {
        parse_export(doc);
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 3);
    }
}

TEST_CASE("timestamp errors") {
    SUBCASE("unparseable") {
        auto doc = base_export();
        doc["posts"][0]["at"] = "yesterday";
        CHECK_THROWS_AS(parse_export(doc.dump()), InvalidTimestamp);
    }
    SUBCASE("missing offset") {
        auto doc = base_export();
        doc["posts"][0]["at"] = "2011-05-02T10:00:00";
        CHECK_THROWS_AS(parse_export(doc.dump()), InvalidTimestamp);
    }
    SUBCASE("post before registration") {
        auto doc = base_export();
        doc["posts"][0]["at"] = "2004-01-01T00:00:00Z";
        CHECK_THROWS_AS(parse_export(doc.dump()), InvalidTimestamp);
    }
    SUBCASE("registration after the export") {
        auto doc = base_export();
        doc["members"][0]["registered"] = "2012-01-01T00:00:00Z";
        doc["posts"] = json::array();
        CHECK_THROWS_AS(parse_export(doc.dump()), InvalidTimestamp);
    }
}

TEST_CASE("duplicates") {
    auto doc = base_export();
    SUBCASE("username") {
        doc["members"].push_back(doc["members"][0]);
        CHECK_THROWS_AS(parse_export(doc.dump()), DuplicateUsername);
    }
    SUBCASE("post id") {
        doc["posts"][1]["id"] = "p2";
        CHECK_THROWS_AS(parse_export(doc.dump()), DuplicatePostId);
    }
}

TEST_CASE("strict and lenient schema") {
    auto doc = base_export();
    doc["members"][0]["avatar"] = "x.png";
    CHECK_THROWS_AS(parse_export(doc.dump()), SchemaError);
    CHECK_NOTHROW(parse_export(doc.dump(), ParseOptions{true}));

    auto bad_pole = base_export();
    bad_pole["members"][0]["declared"]["age"] = "man";
    CHECK_THROWS_AS(parse_export(bad_pole.dump()), SchemaError);

    auto bad_role = base_export();
    bad_role["members"][0]["role"] = "overlord";
    CHECK_THROWS_AS(parse_export(bad_role.dump()), SchemaError);

    auto no_name = base_export();
    no_name["members"][0]["username"] = "";
    CHECK_THROWS_AS(parse_export(no_name.dump()), SchemaError);
}

TEST_CASE("serialization round-trips and is independent of input post order") {
    const auto doc = testing::build_export(testing::forum_members());
    const auto corpus = parse_export(doc.dump());
    CHECK(parse_export(serialize_export(corpus)) == corpus);

    auto shuffled = doc;
    std::mt19937 rng(3);
    std::shuffle(shuffled["posts"].begin(), shuffled["posts"].end(), rng);
    std::shuffle(shuffled["members"].begin(), shuffled["members"].end(), rng);
    CHECK(parse_export(shuffled.dump()) == corpus);
    CHECK(serialize_export(parse_export(shuffled.dump())) == serialize_export(corpus));
}

TEST_CASE("token_count equals the recomputed word-token total") {
    const auto corpus = parse_export(testing::build_export(testing::forum_members()).dump());
    for (const auto& [name, track] : corpus.members()) {
        std::size_t words = 0;
        for (const auto& p : track.posts()) words += count_word_tokens(p.body);
        CHECK(track.token_count() == words);
    }
}

TEST_CASE("activity level over a window") {
    const Timestamp now = parse_rfc3339("2011-06-01T00:00:00Z");
    const auto p = testing::profile("m");
    const auto at_days_ago = [&](std::vector<int> ago) {
        std::vector<Post> posts;
        for (std::size_t i = 0; i < ago.size(); ++i)
            posts.push_back({"p" + std::to_string(i), "m", now - std::chrono::days{ago[i]}, "hi"});
        return InformationTrack(p, std::move(posts));
    };

    CHECK(activity_level(at_days_ago({}), 90, now) == ActivityLevel::low);
    CHECK(activity_level(at_days_ago({100, 200}), 90, now) == ActivityLevel::low);
    CHECK(activity_level(at_days_ago({1, 2, 3, 4}), 90, now) == ActivityLevel::low);
    CHECK(activity_level(at_days_ago({1, 2, 3, 4, 5}), 90, now) == ActivityLevel::medium);
    // window bounds are inclusive
    CHECK(posts_in_window(at_days_ago({0, 90, 91}), 90, now) == 2);

    std::vector<int> sixty;
    for (int i = 0; i < 60; ++i) sixty.push_back(i);
    CHECK(activity_level(at_days_ago(sixty), 90, now) == ActivityLevel::high);
    std::vector<int> fortynine(sixty.begin(), sixty.begin() + 49);
    CHECK(activity_level(at_days_ago(fortynine), 90, now) == ActivityLevel::medium);
}

TEST_CASE("property: activity level is monotone in the in-window count") {
    const Timestamp now = parse_rfc3339("2011-06-01T00:00:00Z");
    const auto p = testing::profile("m");
    std::vector<Post> posts;
    ActivityLevel previous = ActivityLevel::low;
    for (int n = 0; n < 80; ++n) {
        const auto level = activity_level(InformationTrack(p, posts), 90, now);
        CHECK(static_cast<int>(level) >= static_cast<int>(previous));
        previous = level;
        posts.push_back({"p" + std::to_string(n), "m", now - std::chrono::hours{n}, "x"});
    }
}

TEST_CASE("RFC 3339 parsing and formatting") {
    CHECK(format_rfc3339(parse_rfc3339("2011-05-01T10:00:00+02:00")) == "2011-05-01T08:00:00Z");
    CHECK(format_rfc3339(parse_rfc3339("2011-05-01T10:00:00.250Z")) == "2011-05-01T10:00:00.250Z");
    CHECK(format_date(parse_rfc3339("2002-06-19T23:30:00-01:00")) == "2002-06-20");
    CHECK_THROWS_AS(parse_rfc3339("2011-02-30T00:00:00Z"), InvalidTimestamp);
    CHECK_THROWS_AS(parse_rfc3339("2011-02-01T24:00:00Z"), InvalidTimestamp);
    CHECK_THROWS_AS(parse_rfc3339("2011-02-01T00:00:00Zjunk"), InvalidTimestamp);
}
