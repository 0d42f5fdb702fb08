#include "sdprofile/verification.hpp"

#include <cmath>

#include "sdprofile/errors.hpp"

namespace sdprofile {
namespace {
constexpr std::array<std::string_view, 3> kTierNames{"pseudo_user", "suspicion", "reliable"};
}

std::string_view to_string(Tier t) { return kTierNames[static_cast<std::size_t>(t)]; }

std::optional<Tier> tier_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kTierNames.size(); ++i)
        if (kTierNames[i] == s) return static_cast<Tier>(i);
    return std::nullopt;
}

void Thresholds::validate() const {
    if (!(std::isfinite(t_low) && std::isfinite(t_high) && 0 <= t_low && t_low < t_high && t_high <= 100))
        throw BadThresholds("thresholds must satisfy 0 <= t_low < t_high <= 100 (got " + std::to_string(t_low) + ", " +
                            std::to_string(t_high) + ")");
}

VerificationResult verify(const DeclaredProfile& declared, const InferredProfile& inferred, Timestamp computed_at) {
    if (declared.username != inferred.username)
        throw UsernameMismatch("declared profile \"" + declared.username + "\" does not match inferred profile \"" +
                               inferred.username + "\"");

    VerificationResult result;
    result.username = declared.username;
    result.evidence_tokens = inferred.evidence_tokens;
    result.computed_at = computed_at;

    double sum = 0;
    std::size_t scorable = 0;
    for (const auto c : kCharacteristics) {
        auto& rec = result.per_characteristic[index_of(c)];
        const auto& inf = inferred[c];
        rec.declared = declared.declared(c);
        rec.inferred = inf.label;
        rec.confidence = inf.confidence;
        rec.scorable = rec.declared.has_value() && rec.inferred.has_value();
        if (!rec.scorable) continue;
        rec.agreement = *rec.declared == *rec.inferred ? rec.confidence : 1.0 - rec.confidence;
        sum += rec.agreement;
        ++scorable;
    }

    if (scorable == 0) {
        result.reliability_percent = 50;
        result.insufficient_evidence = true;
    } else {
        result.reliability_percent = 100.0 * sum / static_cast<double>(scorable);
        result.insufficient_evidence = inferred.insufficient_evidence;
    }
    return result;
}

Tier classify(const VerificationResult& result, const Thresholds& thresholds) {
    thresholds.validate();
    Tier tier = Tier::reliable;
    if (result.reliability_percent < thresholds.t_low)
        tier = Tier::pseudo_user;
    else if (result.reliability_percent < thresholds.t_high)
        tier = Tier::suspicion;
    if (result.insufficient_evidence && tier == Tier::reliable) tier = Tier::suspicion;
    return tier;
}

}  // namespace sdprofile
