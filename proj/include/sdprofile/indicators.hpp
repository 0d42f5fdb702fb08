#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sdprofile/characteristics.hpp"
#include "sdprofile/corpus.hpp"

namespace sdprofile {

enum class RuleKind { lexicon, pattern, metric };

enum class Statistic {
    avg_post_tokens,
    avg_sentence_length,
    symbol_token_ratio,
    uppercase_ratio,
    misspelling_ratio,
    question_ratio,
};

enum class Comparison { less, less_equal, greater, greater_equal };

std::string_view to_string(RuleKind k);
std::string_view to_string(Statistic s);
std::string_view to_string(Comparison c);

struct CompiledPattern;  // ICU regex, kept out of the public headers

struct LexiconPayload {
    std::set<std::string, std::less<>> terms;  // case-folded
};

struct PatternPayload {
    std::string source;
    std::shared_ptr<const CompiledPattern> compiled;
};

struct MetricPayload {
    Statistic stat = Statistic::avg_post_tokens;
    Comparison cmp = Comparison::greater_equal;
    double threshold = 0;
};

// One linguistic or communication indicator: evidence for `pole` of the
// characteristic that pole belongs to.
struct IndicatorRule {
    std::string id;
    Pole pole = Pole::adult;
    double weight = 1.0;
    std::variant<LexiconPayload, PatternPayload, MetricPayload> payload;

    Characteristic characteristic() const { return characteristic_of(pole); }
    RuleKind kind() const { return static_cast<RuleKind>(payload.index()); }
};

inline constexpr double kDefaultSaturationDensity = 0.01;

// Immutable set of rules, held sorted by rule id.
class RuleSet {
public:
    // Validates the invariants (unique ids, positive weights, non-empty
    // lexicons, density > 0). Throws ConfigError / DuplicateRuleId.
    RuleSet(std::vector<IndicatorRule> rules, double saturation_density = kDefaultSaturationDensity);

    const std::vector<IndicatorRule>& rules() const { return rules_; }
    // Indices into rules() for one characteristic, ascending by id.
    const std::vector<std::size_t>& indices(Characteristic c) const { return by_characteristic_[index_of(c)]; }
    std::size_t count(Characteristic c) const { return indices(c).size(); }
    double saturation_density() const { return saturation_density_; }
    bool uses(Statistic stat) const;

private:
    std::vector<IndicatorRule> rules_;
    std::array<std::vector<std::size_t>, 4> by_characteristic_;
    double saturation_density_;
};

// Throws ConfigError, BadPattern, DuplicateRuleId.
RuleSet load_rules(std::string_view document);
RuleSet rules_from_json(const nlohmann::json& document);
nlohmann::json rules_to_json(const RuleSet& rules);

// Builds an ICU pattern; throws BadPattern naming `rule_id`.
std::shared_ptr<const CompiledPattern> compile_pattern(const std::string& rule_id, const std::string& source);

// Case-folded word list used by misspelling_ratio.
class Dictionary {
public:
    Dictionary() = default;
    explicit Dictionary(std::unordered_set<std::string> words) : words_(std::move(words)) {}
    static Dictionary load(std::istream& in);

    bool contains(const std::string& word) const { return words_.count(word) != 0; }
    std::size_t size() const { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

struct TrackStatistics {
    std::size_t posts = 0;
    std::size_t word_tokens = 0;
    std::size_t symbol_tokens = 0;
    std::size_t sentences = 0;
    std::size_t questions = 0;
    std::size_t letters = 0;
    std::size_t uppercase = 0;
    std::size_t checked_words = 0;  // word tokens containing a letter
    std::size_t unknown_words = 0;  // ... that are not in the dictionary
    bool dictionary_available = false;

    // Empty denominators give 0.
    double value(Statistic s) const;
};

TrackStatistics compute_statistics(const InformationTrack& track, const Dictionary* dictionary = nullptr);

struct IndicatorScore {
    std::string rule_id;
    double raw_evidence = 0;  // hits for lexicon/pattern, 0 or 1 for metric
    double normalized = 0;    // in [0, 1]
    double weighted = 0;      // weight * normalized

    bool operator==(const IndicatorScore&) const = default;
};

// One vector per characteristic, each ordered by rule id.
struct IndicatorVectorSet {
    std::array<std::vector<IndicatorScore>, 4> vectors;
    std::size_t evidence_tokens = 0;

    const std::vector<IndicatorScore>& operator[](Characteristic c) const { return vectors[index_of(c)]; }

    bool operator==(const IndicatorVectorSet&) const = default;
};

// Per-track inputs shared by every rule of a RuleSet.
struct EvaluationInput {
    const InformationTrack& track;
    TrackStatistics stats;
};

IndicatorScore evaluate_rule(const IndicatorRule& rule, const InformationTrack& track,
                             double saturation_density = kDefaultSaturationDensity,
                             const Dictionary* dictionary = nullptr);
IndicatorScore evaluate_rule(const IndicatorRule& rule, const EvaluationInput& input, double saturation_density);

IndicatorVectorSet evaluate_all(const RuleSet& rules, const InformationTrack& track,
                                const Dictionary* dictionary = nullptr);

// Non-fatal configuration notes, e.g. misspelling_ratio without a dictionary.
std::vector<std::string> rule_warnings(const RuleSet& rules, const Dictionary* dictionary);

}  // namespace sdprofile
