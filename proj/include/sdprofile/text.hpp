#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sdprofile {

enum class TokenClass { word, symbol };

struct Token {
    std::string text;
    TokenClass cls = TokenClass::word;

    bool operator==(const Token&) const = default;
};

// Splits UTF-8 text into tokens:
//   word   - maximal run of Unicode letters, marks, decimal digits and
//            apostrophes (' U+2019 U+02BC), case-folded (Unicode default folding)
//   symbol - maximal run of anything else that is not white space
//            (punctuation, emoticons such as ":-)"), kept verbatim
// Invalid UTF-8 bytes are treated as symbol characters. Total and deterministic.
std::vector<Token> tokenize(std::string_view body);

std::size_t count_word_tokens(std::string_view body);

// Unicode default case folding of a UTF-8 string.
std::string fold_case(std::string_view text);

// Letters in `text` and how many of them are uppercase.
struct LetterCounts {
    std::size_t letters = 0;
    std::size_t uppercase = 0;
};
LetterCounts count_letters(std::string_view text);

}  // namespace sdprofile
