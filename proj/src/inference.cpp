#include "sdprofile/inference.hpp"

#include <cmath>

#include "sdprofile/errors.hpp"

namespace sdprofile {

CharacteristicInference infer_characteristic(const IndicatorVectorSet& vectors, const RuleSet& rules, Characteristic c,
                                             double eps_tie) {
    const auto& scores = vectors[c];
    const auto& indices = rules.indices(c);
    if (scores.size() != indices.size())
        throw ShapeMismatch(std::string(to_string(c)) + " vector has " + std::to_string(scores.size()) +
                            " entries, ruleset has " + std::to_string(indices.size()) + " rules");

    CharacteristicInference out;
    out.characteristic = c;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        const auto& rule = rules.rules()[indices[k]];
        if (scores[k].rule_id != rule.id)
            throw ShapeMismatch("score for \"" + scores[k].rule_id + "\" where rule \"" + rule.id + "\" was expected");
        out.pole_mass[pole_slot(rule.pole)] += scores[k].weighted;
    }

    const auto [first, second] = poles_of(c);
    const double a = out.pole_mass[0];
    const double b = out.pole_mass[1];
    const double total = a + b;
    if (total > 0) out.confidence = std::abs(a - b) / total;
    if (total <= 0 || std::abs(a - b) < eps_tie) {
        out.label.reset();
        out.confidence = 0;
    } else {
        out.label = a > b ? first : second;
    }
    return out;
}

InferredProfile infer_profile(std::string username, const IndicatorVectorSet& vectors, const RuleSet& rules,
                              const InferenceConfig& config) {
    InferredProfile profile;
    profile.username = std::move(username);
    profile.evidence_tokens = vectors.evidence_tokens;
    // Shape is checked even when the result is discarded below.
    for (const auto c : kCharacteristics)
        profile.inferences[index_of(c)] = infer_characteristic(vectors, rules, c, config.eps_tie);

    if (vectors.evidence_tokens < config.min_evidence_tokens) {
        profile.insufficient_evidence = true;
        for (auto& inf : profile.inferences) {
            inf.label.reset();
            inf.confidence = 0;
        }
    }
    return profile;
}

}  // namespace sdprofile
