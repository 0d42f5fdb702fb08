// Parallel pipeline against the serial reference on synthetic corpora.

#include <benchmark/benchmark.h>

#include <random>

#include "sdprofile/pipeline.hpp"
#include "synthetic.hpp"

using namespace sdprofile;

namespace {

Corpus make_corpus(std::size_t members) {
    std::mt19937 rng(static_cast<std::uint32_t>(members));
    std::uniform_int_distribution<std::size_t> hits(0, 40);
    std::uniform_int_distribution<int> pattern(0, 3);
    std::bernoulli_distribution coin(0.5);
    std::vector<testing::SyntheticMember> ms;
    for (std::size_t i = 0; i < members; ++i) {
        testing::SyntheticMember m;
        m.username = "member" + std::to_string(i);
        m.registered = "2008-01-01T00:00:00Z";
        for (std::size_t c = 0; c < 4; ++c) m.declared[c] = poles_of(kCharacteristics[c])[coin(rng)];
        m.plan = {hits(rng), hits(rng)};
        m.posting = static_cast<testing::PostingPattern>(pattern(rng));
        m.min_words = 1500;
        ms.push_back(m);
    }
    return parse_export(testing::build_export(ms).dump());
}

// Lexicons plus a pattern and a metric per characteristic, so every rule kind is exercised.
RuleSet bench_rules() {
    auto doc = testing::planted_rules_json(0.02);
    for (const auto c : kCharacteristics) {
        const auto name = std::string(to_string(c));
        const auto poles = poles_of(c);
        doc["rules"].push_back({{"id", name + "-pattern"}, {"characteristic", name},
                                {"pole", to_string(poles[0])}, {"kind", "pattern"}, {"weight", 0.5},
                                {"regex", "(?i)\\b\\w+ing\\b"}});
        doc["rules"].push_back({{"id", name + "-metric"}, {"characteristic", name},
                                {"pole", to_string(poles[1])}, {"kind", "metric"}, {"weight", 0.5},
                                {"metric", {{"stat", "avg_post_tokens"}, {"cmp", ">="}, {"threshold", 40}}}});
    }
    return rules_from_json(doc);
}

template <auto Run>
void BM_pipeline(benchmark::State& state) {
    const auto corpus = make_corpus(static_cast<std::size_t>(state.range(0)));
    const auto rules = bench_rules();
    const PipelineConfig config;
    for (auto _ : state) benchmark::DoNotOptimize(Run(corpus, rules, config));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_pipeline<run_pipeline_serial>)->Name("pipeline/serial")->Arg(50)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_pipeline<run_pipeline>)->Name("pipeline/openmp")->Arg(50)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
