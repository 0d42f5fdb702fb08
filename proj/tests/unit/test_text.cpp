#include <doctest.h>

#include <random>

#include "sdprofile/text.hpp"

using namespace sdprofile;

namespace {

std::vector<std::string> texts(const std::vector<Token>& tokens) {
    std::vector<std::string> out;
    for (const auto& t : tokens) out.push_back(t.text);
    return out;
}

std::vector<TokenClass> classes(const std::vector<Token>& tokens) {
    std::vector<TokenClass> out;
    for (const auto& t : tokens) out.push_back(t.cls);
    return out;
}

}  // namespace

TEST_CASE("empty input yields no tokens") {
    CHECK(tokenize("").empty());
    CHECK(tokenize("   \n\t ").empty());
}

TEST_CASE("words are folded, punctuation runs are symbols") {
    const auto tokens = tokenize("Lol, OMG!!");
    CHECK(texts(tokens) == std::vector<std::string>{"lol", ",", "omg", "!!"});
    CHECK(classes(tokens) ==
          std::vector<TokenClass>{TokenClass::word, TokenClass::symbol, TokenClass::word, TokenClass::symbol});
}

TEST_CASE("hyphen splits a Cyrillic compound") {
    const auto tokens = tokenize("можна-так");
    CHECK(texts(tokens) == std::vector<std::string>{"можна", "-", "так"});
    CHECK(classes(tokens) == std::vector<TokenClass>{TokenClass::word, TokenClass::symbol, TokenClass::word});
}

TEST_CASE("apostrophes stay inside words") {
    CHECK(texts(tokenize("don't")) == std::vector<std::string>{"don't"});
    CHECK(texts(tokenize("п'ять м’ята обʼєкт")) == std::vector<std::string>{"п'ять", "м’ята", "обʼєкт"});
}

TEST_CASE("emoticons and digits") {
    const auto tokens = tokenize("see u at 5pm :-) ok");
    CHECK(texts(tokens) == std::vector<std::string>{"see", "u", "at", "5pm", ":-)", "ok"});
    CHECK(tokens[4].cls == TokenClass::symbol);
}

TEST_CASE("default case folding") {
    CHECK(texts(tokenize("ПРИВІТ Straße")) == std::vector<std::string>{"привіт", "strasse"});
    CHECK(fold_case("ΣΊΣΥΦΟΣ") == fold_case("σίσυφος"));
}

TEST_CASE("combining marks belong to the word") {
    // e + COMBINING ACUTE ACCENT
    CHECK(tokenize("café ok").size() == 2);
}

TEST_CASE("count_word_tokens agrees with tokenize") {
    const std::string s = "Hi!!! How r u? :) 42 times, ok...";
    std::size_t words = 0;
    for (const auto& t : tokenize(s)) words += t.cls == TokenClass::word;
    CHECK(count_word_tokens(s) == words);
    CHECK(words == 7);
}

TEST_CASE("letters and uppercase") {
    const auto c = count_letters("ABc дЖ 12!");
    CHECK(c.letters == 5);
    CHECK(c.uppercase == 3);
}

TEST_CASE("property: tokenize(a + ' ' + b) == tokenize(a) ++ tokenize(b)") {
    const std::vector<std::string> alphabet{"a", "Z", "ї", "Ж", "'", "’", "-", "!", ",", ".", ":)", "1", " ", "\n",
                                            "é", "日", "?", "́"};
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(0, 12);
    const auto random_text = [&] {
        std::string s;
        for (int i = len(rng); i > 0; --i) s += alphabet[pick(rng)];
        return s;
    };
    for (int trial = 0; trial < 2000; ++trial) {
        const auto a = random_text();
        const auto b = random_text();
        auto expected = tokenize(a);
        const auto tail = tokenize(b);
        expected.insert(expected.end(), tail.begin(), tail.end());
        REQUIRE(tokenize(a + " " + b) == expected);
        REQUIRE(tokenize(a) == tokenize(a));  // deterministic
    }
}
