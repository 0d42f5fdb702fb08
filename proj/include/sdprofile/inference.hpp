#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>

#include "sdprofile/characteristics.hpp"
#include "sdprofile/indicators.hpp"

namespace sdprofile {

struct InferenceConfig {
    double eps_tie = 1e-9;                // absolute, on the pole-mass difference
    std::size_t min_evidence_tokens = 200;
};

struct CharacteristicInference {
    Characteristic characteristic = Characteristic::age;
    std::optional<Pole> label;  // empty = abstain
    double confidence = 0;
    std::array<double, 2> pole_mass{0, 0};  // indexed like poles_of(characteristic)

    double mass(Pole p) const { return pole_mass[pole_slot(p)]; }

    bool operator==(const CharacteristicInference&) const = default;
};

struct InferredProfile {
    std::string username;
    std::array<CharacteristicInference, 4> inferences;
    std::size_t evidence_tokens = 0;
    bool insufficient_evidence = false;

    const CharacteristicInference& operator[](Characteristic c) const { return inferences[index_of(c)]; }

    bool operator==(const InferredProfile&) const = default;
};

// Weighted-mass argmax with normalized-margin confidence
//   confidence = |m_a - m_b| / (m_a + m_b)
// Abstains when the total mass is 0 or the masses are within eps_tie.
// Throws ShapeMismatch when `vectors` was not produced from `rules`.
CharacteristicInference infer_characteristic(const IndicatorVectorSet& vectors, const RuleSet& rules, Characteristic c,
                                             double eps_tie = InferenceConfig{}.eps_tie);

// All four characteristics. Below min_evidence_tokens every inference is
// forced to abstain and the profile is flagged insufficient.
InferredProfile infer_profile(std::string username, const IndicatorVectorSet& vectors, const RuleSet& rules,
                              const InferenceConfig& config = {});

}  // namespace sdprofile
