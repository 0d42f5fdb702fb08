#pragma once

#include <vector>

#include "sdprofile/corpus.hpp"
#include "sdprofile/indicators.hpp"
#include "sdprofile/inference.hpp"
#include "sdprofile/verification.hpp"

namespace sdprofile {

struct PipelineConfig {
    Thresholds thresholds;
    InferenceConfig inference;
    int window_days = 90;
    ActivityThresholds activity;
    Timestamp computed_at{};
    const Dictionary* dictionary = nullptr;  // non-owning; may be null
};

struct MemberOutcome {
    InferredProfile inferred;
    VerificationResult result;
    Tier tier = Tier::suspicion;
    ActivityLevel activity = ActivityLevel::low;

    bool operator==(const MemberOutcome&) const = default;
};

// evaluate_all -> infer_profile -> verify -> classify for one member. The
// activity window ends at the corpus export time `now`.
MemberOutcome analyze_member(const InformationTrack& track, const RuleSet& rules, const PipelineConfig& config,
                             Timestamp now);

// Every member, ordered by username. Members are processed in parallel
// (OpenMP); the output is identical to run_pipeline_serial.
std::vector<MemberOutcome> run_pipeline(const Corpus& corpus, const RuleSet& rules, const PipelineConfig& config);

// Single-threaded reference implementation.
std::vector<MemberOutcome> run_pipeline_serial(const Corpus& corpus, const RuleSet& rules,
                                               const PipelineConfig& config);

}  // namespace sdprofile
