#include "sdprofile/pipeline.hpp"

#include <exception>
#include <mutex>

namespace sdprofile {

MemberOutcome analyze_member(const InformationTrack& track, const RuleSet& rules, const PipelineConfig& config,
                             Timestamp now) {
    MemberOutcome out;
    const auto vectors = evaluate_all(rules, track, config.dictionary);
    out.inferred = infer_profile(track.username(), vectors, rules, config.inference);
    out.result = verify(track.profile(), out.inferred, config.computed_at);
    out.tier = classify(out.result, config.thresholds);
    out.activity = activity_level(track, config.window_days, now, config.activity);
    return out;
}

std::vector<MemberOutcome> run_pipeline_serial(const Corpus& corpus, const RuleSet& rules,
                                               const PipelineConfig& config) {
    config.thresholds.validate();
    std::vector<MemberOutcome> out;
    out.reserve(corpus.members().size());
    for (const auto& [_, track] : corpus.members())
        out.push_back(analyze_member(track, rules, config, corpus.metadata().exported_at));
    return out;
}

std::vector<MemberOutcome> run_pipeline(const Corpus& corpus, const RuleSet& rules, const PipelineConfig& config) {
    config.thresholds.validate();
    std::vector<const InformationTrack*> tracks;
    tracks.reserve(corpus.members().size());
    for (const auto& [_, track] : corpus.members()) tracks.push_back(&track);

    std::vector<MemberOutcome> out(tracks.size());
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto n = static_cast<std::ptrdiff_t>(tracks.size());
    const Timestamp now = corpus.metadata().exported_at;

#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = analyze_member(*tracks[i], rules, config, now);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace sdprofile
