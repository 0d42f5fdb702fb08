#include "sdprofile/text.hpp"

#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

namespace sdprofile {
namespace {

enum class CharClass { space, word, symbol };

CharClass classify(UChar32 c) {
    if (c < 0) return CharClass::symbol;  // ill-formed byte
    if (u_isUWhiteSpace(c)) return CharClass::space;
    if (c == 0x27 || c == 0x2019 || c == 0x02BC) return CharClass::word;
    if (u_hasBinaryProperty(c, UCHAR_ALPHABETIC) || u_isdigit(c)) return CharClass::word;
    const auto gc = u_charType(c);
    if (gc == U_NON_SPACING_MARK || gc == U_COMBINING_SPACING_MARK) return CharClass::word;
    return CharClass::symbol;
}

template <typename Emit>
void scan(std::string_view body, Emit&& emit) {
    const auto* s = reinterpret_cast<const uint8_t*>(body.data());
    const auto length = static_cast<int32_t>(body.size());
    int32_t i = 0;
    int32_t run_start = 0;
    CharClass run = CharClass::space;
    while (i < length) {
        const int32_t start = i;
        UChar32 c;
        U8_NEXT(s, i, length, c);
        const CharClass cls = classify(c);
        if (cls != run) {
            if (run != CharClass::space) emit(run, body.substr(run_start, start - run_start));
            run = cls;
            run_start = start;
        }
    }
    if (run != CharClass::space) emit(run, body.substr(run_start, length - run_start));
}

}  // namespace

std::string fold_case(std::string_view text) {
    auto u = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    u.foldCase(U_FOLD_CASE_DEFAULT);
    std::string out;
    u.toUTF8String(out);
    return out;
}

std::vector<Token> tokenize(std::string_view body) {
    std::vector<Token> tokens;
    scan(body, [&](CharClass cls, std::string_view run) {
        if (cls == CharClass::word)
            tokens.push_back({fold_case(run), TokenClass::word});
        else
            tokens.push_back({std::string(run), TokenClass::symbol});
    });
    return tokens;
}

std::size_t count_word_tokens(std::string_view body) {
    std::size_t n = 0;
    scan(body, [&](CharClass cls, std::string_view) { n += cls == CharClass::word; });
    return n;
}

LetterCounts count_letters(std::string_view text) {
    LetterCounts counts;
    const auto* s = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t i = 0;
    while (i < length) {
        UChar32 c;
        U8_NEXT(s, i, length, c);
        if (c >= 0 && u_isalpha(c)) {
            ++counts.letters;
            counts.uppercase += u_isupper(c) ? 1 : 0;
        }
    }
    return counts;
}

}  // namespace sdprofile
