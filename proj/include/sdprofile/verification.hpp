#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "sdprofile/corpus.hpp"
#include "sdprofile/inference.hpp"
#include "sdprofile/time.hpp"

namespace sdprofile {

struct AgreementRecord {
    std::optional<Pole> declared;
    std::optional<Pole> inferred;
    double confidence = 0;
    double agreement = 0;   // meaningful only when scorable
    bool scorable = false;  // declared present and inference not abstaining

    bool operator==(const AgreementRecord&) const = default;
};

struct VerificationResult {
    std::string username;
    std::array<AgreementRecord, 4> per_characteristic;
    double reliability_percent = 50;
    std::size_t evidence_tokens = 0;
    bool insufficient_evidence = true;
    Timestamp computed_at{};

    const AgreementRecord& operator[](Characteristic c) const { return per_characteristic[index_of(c)]; }

    bool operator==(const VerificationResult&) const = default;
};

// Ordered: pseudo_user < suspicion < reliable.
enum class Tier { pseudo_user, suspicion, reliable };

std::string_view to_string(Tier t);
std::optional<Tier> tier_from_string(std::string_view s);

struct Thresholds {
    double t_low = 30;
    double t_high = 70;

    // Throws BadThresholds unless 0 <= t_low < t_high <= 100.
    void validate() const;
};

// Reliability = 100 * mean agreement over scorable characteristics, where
// agreement is the inference confidence on a match and 1 - confidence on a
// mismatch. No scorable characteristic gives 50 and insufficient_evidence.
// Throws UsernameMismatch.
VerificationResult verify(const DeclaredProfile& declared, const InferredProfile& inferred, Timestamp computed_at = {});

// Half-open bands [0, t_low) [t_low, t_high) [t_high, 100]; insufficient
// evidence caps the tier at suspicion. Throws BadThresholds.
Tier classify(const VerificationResult& result, const Thresholds& thresholds = {});

}  // namespace sdprofile
