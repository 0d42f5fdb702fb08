#include "sdprofile/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <unicode/regex.h>
#include <unicode/utext.h>

#include "sdprofile/errors.hpp"

namespace sdprofile {

using nlohmann::json;

struct CompiledPattern {
    std::unique_ptr<icu::RegexPattern> pattern;
};

namespace {

constexpr std::array<std::string_view, 3> kKindNames{"lexicon", "pattern", "metric"};
constexpr std::array<std::string_view, 6> kStatNames{"avg_post_tokens",  "avg_sentence_length", "symbol_token_ratio",
                                                     "uppercase_ratio",  "misspelling_ratio",   "question_ratio"};
constexpr std::array<std::string_view, 4> kCmpNames{"<", "<=", ">", ">="};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i)
        if (names[i] == s) return static_cast<Enum>(i);
    return std::nullopt;
}

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

bool is_sentence_end(const Token& t) {
    return t.cls == TokenClass::symbol &&
           (t.text.find_first_of(".!?") != std::string::npos || t.text.find("…") != std::string::npos);
}

bool compare(double value, Comparison cmp, double threshold) {
    switch (cmp) {
        case Comparison::less: return value < threshold;
        case Comparison::less_equal: return value <= threshold;
        case Comparison::greater: return value > threshold;
        case Comparison::greater_equal: return value >= threshold;
    }
    return false;
}

std::size_t count_matches(const CompiledPattern& compiled, const std::string& body) {
    UErrorCode status = U_ZERO_ERROR;
    UText* text = utext_openUTF8(nullptr, body.data(), static_cast<int64_t>(body.size()), &status);
    std::unique_ptr<icu::RegexMatcher> matcher(compiled.pattern->matcher(status));
    std::size_t hits = 0;
    if (U_SUCCESS(status)) {
        matcher->reset(text);
        while (matcher->find(status) && U_SUCCESS(status)) {
            // Empty matches carry no evidence.
            if (matcher->end64(status) > matcher->start64(status)) ++hits;
        }
    }
    matcher.reset();
    utext_close(text);
    return hits;
}

double density_normalize(double hits, std::size_t word_tokens, double rho) {
    if (word_tokens == 0 || hits <= 0) return 0.0;
    return std::min(1.0, hits / (rho * static_cast<double>(word_tokens)));
}

// ---- config parsing ----

void check_fields(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(where + ": unknown field \"" + key + "\"");
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) throw ConfigError(where + ": \"" + key + "\" must be a string");
    return it->get<std::string>();
}

double get_number(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) throw ConfigError(where + ": \"" + key + "\" must be a number");
    return it->get<double>();
}

IndicatorRule parse_rule(const json& r, const std::string& where) {
    if (!r.is_object()) throw ConfigError(where + ": rule must be an object");
    check_fields(r, {"id", "characteristic", "pole", "kind", "weight", "terms", "regex", "metric"}, where);

    IndicatorRule rule;
    rule.id = get_string(r, "id", where);
    if (rule.id.empty()) throw ConfigError(where + ": rule id must not be empty");
    const std::string rwhere = where + " (" + rule.id + ")";

    const auto cname = get_string(r, "characteristic", rwhere);
    const auto characteristic = characteristic_from_string(cname);
    if (!characteristic) throw ConfigError(rwhere + ": unknown characteristic \"" + cname + "\"");
    const auto pname = get_string(r, "pole", rwhere);
    const auto pole = pole_from_string(*characteristic, pname);
    if (!pole) throw ConfigError(rwhere + ": \"" + pname + "\" is not a pole of " + cname);
    rule.pole = *pole;
    rule.weight = get_number(r, "weight", rwhere);

    const auto kname = get_string(r, "kind", rwhere);
    const auto kind = lookup<RuleKind>(kKindNames, kname);
    if (!kind) throw ConfigError(rwhere + ": unknown kind \"" + kname + "\"");

    const auto forbid = [&](const char* key) {
        if (r.contains(key)) throw ConfigError(rwhere + ": \"" + key + "\" is not valid for kind " + kname);
    };

    switch (*kind) {
        case RuleKind::lexicon: {
            forbid("regex");
            forbid("metric");
            const auto it = r.find("terms");
            if (it == r.end() || !it->is_array()) throw ConfigError(rwhere + ": lexicon rule needs a \"terms\" array");
            LexiconPayload lex;
            for (const auto& term : *it) {
                if (!term.is_string()) throw ConfigError(rwhere + ": terms must be strings");
                const auto tokens = tokenize(term.get<std::string>());
                if (tokens.size() != 1 || tokens.front().cls != TokenClass::word)
                    throw ConfigError(rwhere + ": term \"" + term.get<std::string>() + "\" is not a single word");
                lex.terms.insert(tokens.front().text);
            }
            rule.payload = std::move(lex);
            break;
        }
        case RuleKind::pattern: {
            forbid("terms");
            forbid("metric");
            PatternPayload pat;
            pat.source = get_string(r, "regex", rwhere);
            if (pat.source.empty()) throw ConfigError(rwhere + ": regex must not be empty");
            pat.compiled = compile_pattern(rule.id, pat.source);
            rule.payload = std::move(pat);
            break;
        }
        case RuleKind::metric: {
            forbid("terms");
            forbid("regex");
            const auto it = r.find("metric");
            if (it == r.end() || !it->is_object()) throw ConfigError(rwhere + ": metric rule needs a \"metric\" object");
            const auto mwhere = rwhere + "/metric";
            check_fields(*it, {"stat", "cmp", "threshold"}, mwhere);
            MetricPayload m;
            const auto sname = get_string(*it, "stat", mwhere);
            const auto stat = lookup<Statistic>(kStatNames, sname);
            if (!stat) throw ConfigError(mwhere + ": unknown statistic \"" + sname + "\"");
            const auto cmpname = get_string(*it, "cmp", mwhere);
            const auto cmp = lookup<Comparison>(kCmpNames, cmpname);
            if (!cmp) throw ConfigError(mwhere + ": unknown comparison \"" + cmpname + "\"");
            m.stat = *stat;
            m.cmp = *cmp;
            m.threshold = get_number(*it, "threshold", mwhere);
            if (!std::isfinite(m.threshold)) throw ConfigError(mwhere + ": threshold must be finite");
            rule.payload = m;
            break;
        }
    }
    return rule;
}

}  // namespace

std::string_view to_string(RuleKind k) { return kKindNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(Statistic s) { return kStatNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(Comparison c) { return kCmpNames[static_cast<std::size_t>(c)]; }

std::shared_ptr<const CompiledPattern> compile_pattern(const std::string& rule_id, const std::string& source) {
    UErrorCode status = U_ZERO_ERROR;
    UParseError perr{};
    auto compiled = std::make_shared<CompiledPattern>();
    compiled->pattern.reset(icu::RegexPattern::compile(icu::UnicodeString::fromUTF8(source), 0, perr, status));
    if (U_FAILURE(status) || !compiled->pattern) {
        throw BadPattern(rule_id, std::string(u_errorName(status)) + " at offset " + std::to_string(perr.offset));
    }
    return compiled;
}

RuleSet::RuleSet(std::vector<IndicatorRule> rules, double saturation_density)
    : rules_(std::move(rules)), saturation_density_(saturation_density) {
    if (rules_.empty()) throw ConfigError("ruleset must contain at least one rule");
    if (!(saturation_density_ > 0) || !std::isfinite(saturation_density_))
        throw ConfigError("saturation_density must be a positive number");
    std::sort(rules_.begin(), rules_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        const auto& rule = rules_[i];
        if (i > 0 && rules_[i - 1].id == rule.id) throw DuplicateRuleId(rule.id);
        if (!(rule.weight > 0) || !std::isfinite(rule.weight))
            throw ConfigError("rule \"" + rule.id + "\": weight must be positive");
        if (const auto* lex = std::get_if<LexiconPayload>(&rule.payload)) {
            if (lex->terms.empty()) throw ConfigError("rule \"" + rule.id + "\": lexicon has no terms");
            for (const auto& term : lex->terms)
                if (term.empty() || term != fold_case(term))
                    throw ConfigError("rule \"" + rule.id + "\": terms must be non-empty and case-folded");
        }
        if (const auto* pat = std::get_if<PatternPayload>(&rule.payload); pat && !pat->compiled)
            throw BadPattern(rule.id, "not compiled");
        by_characteristic_[index_of(rule.characteristic())].push_back(i);
    }
}

bool RuleSet::uses(Statistic stat) const {
    return std::any_of(rules_.begin(), rules_.end(), [&](const IndicatorRule& r) {
        const auto* m = std::get_if<MetricPayload>(&r.payload);
        return m && m->stat == stat;
    });
}

RuleSet load_rules(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("rule config is not valid JSON: ") + e.what());
    }
    return rules_from_json(doc);
}

RuleSet rules_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("rule config must be a JSON object");
    check_fields(doc, {"saturation_density", "rules"}, "rule config");
    double rho = kDefaultSaturationDensity;
    if (doc.contains("saturation_density")) rho = get_number(doc, "saturation_density", "rule config");
    const auto it = doc.find("rules");
    if (it == doc.end() || !it->is_array()) throw ConfigError("rule config: \"rules\" must be an array");

    std::vector<IndicatorRule> rules;
    rules.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i) rules.push_back(parse_rule((*it)[i], "rules[" + std::to_string(i) + "]"));
    return RuleSet(std::move(rules), rho);
}

json rules_to_json(const RuleSet& rules) {
    json out = json::array();
    for (const auto& rule : rules.rules()) {
        json r = {{"id", rule.id},
                  {"characteristic", to_string(rule.characteristic())},
                  {"pole", to_string(rule.pole)},
                  {"kind", to_string(rule.kind())},
                  {"weight", rule.weight}};
        std::visit(
            [&](const auto& p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, LexiconPayload>) {
                    r["terms"] = json(std::vector<std::string>(p.terms.begin(), p.terms.end()));
                } else if constexpr (std::is_same_v<P, PatternPayload>) {
                    r["regex"] = p.source;
                } else {
                    r["metric"] = {{"stat", to_string(p.stat)}, {"cmp", to_string(p.cmp)}, {"threshold", p.threshold}};
                }
            },
            rule.payload);
        out.push_back(std::move(r));
    }
    return {{"saturation_density", rules.saturation_density()}, {"rules", std::move(out)}};
}

Dictionary Dictionary::load(std::istream& in) {
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
        if (!line.empty()) words.insert(fold_case(line));
    }
    return Dictionary(std::move(words));
}

double TrackStatistics::value(Statistic s) const {
    switch (s) {
        case Statistic::avg_post_tokens: return ratio(word_tokens, posts);
        case Statistic::avg_sentence_length: return ratio(word_tokens, sentences);
        case Statistic::symbol_token_ratio: return ratio(symbol_tokens, word_tokens + symbol_tokens);
        case Statistic::uppercase_ratio: return ratio(uppercase, letters);
        case Statistic::misspelling_ratio: return dictionary_available ? ratio(unknown_words, checked_words) : 0.0;
        case Statistic::question_ratio: return ratio(questions, sentences);
    }
    return 0.0;
}

TrackStatistics compute_statistics(const InformationTrack& track, const Dictionary* dictionary) {
    TrackStatistics st;
    st.posts = track.posts().size();
    st.dictionary_available = dictionary != nullptr;
    for (std::size_t i = 0; i < track.posts().size(); ++i) {
        const auto letters = count_letters(track.posts()[i].body);
        st.letters += letters.letters;
        st.uppercase += letters.uppercase;

        std::size_t pending_words = 0;
        for (const auto& tok : track.tokens(i)) {
            if (tok.cls == TokenClass::word) {
                ++st.word_tokens;
                ++pending_words;
                if (dictionary && count_letters(tok.text).letters > 0) {
                    ++st.checked_words;
                    st.unknown_words += dictionary->contains(tok.text) ? 0 : 1;
                }
                continue;
            }
            ++st.symbol_tokens;
            if (is_sentence_end(tok) && pending_words > 0) {
                ++st.sentences;
                st.questions += tok.text.find('?') != std::string::npos ? 1 : 0;
                pending_words = 0;
            }
        }
        if (pending_words > 0) ++st.sentences;
    }
    return st;
}

IndicatorScore evaluate_rule(const IndicatorRule& rule, const EvaluationInput& input, double rho) {
    IndicatorScore score;
    score.rule_id = rule.id;
    const auto& track = input.track;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, LexiconPayload>) {
                std::size_t hits = 0;
                for (std::size_t i = 0; i < track.posts().size(); ++i)
                    for (const auto& tok : track.tokens(i))
                        if (tok.cls == TokenClass::word && p.terms.count(tok.text)) ++hits;
                score.raw_evidence = static_cast<double>(hits);
                score.normalized = density_normalize(score.raw_evidence, input.stats.word_tokens, rho);
            } else if constexpr (std::is_same_v<P, PatternPayload>) {
                std::size_t hits = 0;
                for (const auto& post : track.posts()) hits += count_matches(*p.compiled, post.body);
                score.raw_evidence = static_cast<double>(hits);
                score.normalized = density_normalize(score.raw_evidence, input.stats.word_tokens, rho);
            } else {
                const bool holds = compare(input.stats.value(p.stat), p.cmp, p.threshold);
                score.raw_evidence = score.normalized = holds ? 1.0 : 0.0;
            }
        },
        rule.payload);
    score.weighted = rule.weight * score.normalized;
    return score;
}

IndicatorScore evaluate_rule(const IndicatorRule& rule, const InformationTrack& track, double saturation_density,
                             const Dictionary* dictionary) {
    const EvaluationInput input{track, compute_statistics(track, dictionary)};
    return evaluate_rule(rule, input, saturation_density);
}

IndicatorVectorSet evaluate_all(const RuleSet& rules, const InformationTrack& track, const Dictionary* dictionary) {
    const EvaluationInput input{track, compute_statistics(track, dictionary)};
    IndicatorVectorSet out;
    out.evidence_tokens = input.stats.word_tokens;
    for (const auto c : kCharacteristics) {
        auto& vec = out.vectors[index_of(c)];
        vec.reserve(rules.count(c));
        for (const auto i : rules.indices(c))
            vec.push_back(evaluate_rule(rules.rules()[i], input, rules.saturation_density()));
    }
    return out;
}

std::vector<std::string> rule_warnings(const RuleSet& rules, const Dictionary* dictionary) {
    std::vector<std::string> warnings;
    if (!dictionary && rules.uses(Statistic::misspelling_ratio))
        warnings.emplace_back("misspelling_ratio is used but no dictionary was supplied; the statistic evaluates to 0");
    return warnings;
}

}  // namespace sdprofile
