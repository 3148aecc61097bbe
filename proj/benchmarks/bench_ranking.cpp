#include <benchmark/benchmark.h>

#include <random>

#include "pse/corpus.hpp"
#include "pse/embeddings.hpp"
#include "pse/eval.hpp"
#include "pse/rankers.hpp"
#include "pse/synthetic.hpp"

namespace {

using namespace pse;

struct World {
    SyntheticFixture fx;
    Corpus corpus;
    BackgroundLM background;
    EmbeddingTable embeddings;

    World() : fx(make_synthetic_fixture()), corpus(Corpus::build(fx.documents)), background(corpus_background(corpus))
    {
        attach_entity_records(fx.profiles, fx.entities);
        // Random 50-d vectors for the whole vocabulary.
        std::mt19937_64 gen(3);
        std::normal_distribution<double> normal;
        std::vector<std::pair<std::string, std::vector<double>>> rows;
        for (const auto& [term, df] : corpus.stats().doc_freq) {
            std::vector<double> v(50);
            for (auto& x : v) {
                x = normal(gen);
            }
            rows.emplace_back(term, std::move(v));
        }
        embeddings = EmbeddingTable::from_vectors(50, std::move(rows));
    }
};

const World& world()
{
    static const World w;
    return w;
}

void rerank_pool(benchmark::State& state, RankerKind kind, Personalization personalization)
{
    const auto& w = world();
    RankerSpec spec;
    spec.kind = kind;
    const auto& [user, profile] = *w.fx.profiles.begin();
    const RankingResources res{&w.corpus, &w.background, &w.embeddings};
    for (auto _ : state) {
        benchmark::DoNotOptimize(rerank(w.fx.pools.front(), res, spec, user, &profile, personalization));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.fx.pools.front().doc_ids.size()));
}

void BM_RerankLMQueryOnly(benchmark::State& s) { rerank_pool(s, RankerKind::LM, std::nullopt); }
void BM_RerankLMProfile(benchmark::State& s) { rerank_pool(s, RankerKind::LM, ProfileVariant::Full); }
void BM_RerankLMEntities(benchmark::State& s) { rerank_pool(s, RankerKind::LM, ProfileVariant::FullPlusEntities); }
void BM_RerankLMTranslation(benchmark::State& s) { rerank_pool(s, RankerKind::LMWithEmbeddings, ProfileVariant::Full); }
void BM_RerankBM25Profile(benchmark::State& s) { rerank_pool(s, RankerKind::BM25, ProfileVariant::Full); }

BENCHMARK(BM_RerankLMQueryOnly);
BENCHMARK(BM_RerankLMProfile);
BENCHMARK(BM_RerankLMEntities);
BENCHMARK(BM_RerankLMTranslation);
BENCHMARK(BM_RerankBM25Profile);

void BM_NDCG(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 gen(11);
    Judgments j;
    RunList run{"u", "q", {}};
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = "d" + std::to_string(i);
        j.set("u", "q", id, static_cast<int>(gen() % 3));
        run.entries.push_back({id, 0.0, i + 1});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(ndcg_at_k(run, j, 20));
    }
}
BENCHMARK(BM_NDCG)->Arg(20)->Arg(100)->Arg(1000);

void BM_BuildSyntheticCorpus(benchmark::State& state)
{
    const auto fx = make_synthetic_fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(Corpus::build(fx.documents));
    }
}
BENCHMARK(BM_BuildSyntheticCorpus);

}  // namespace

BENCHMARK_MAIN();
