#include "pse/rankers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <set>

#include "pse/error.hpp"

namespace pse {
namespace {

constexpr std::array<std::string_view, 3> kRankerNames = {"lm", "lm-wv", "bm25"};

// Maps each profile term to the first segment (field or entity description)
// that contributes it.
std::map<std::string, std::string> term_sources(const UserProfile& profile, ProfileVariant variant,
                                                bool remove_stopwords)
{
    std::map<std::string, std::string> out;
    for (const auto& seg : profile_segments(profile, variant)) {
        for (auto& t : tokenize(seg.text, remove_stopwords)) {
            out.emplace(std::move(t), seg.source);
        }
    }
    return out;
}

void attribute(std::vector<TermContribution>& terms, const std::map<std::string, std::string>& sources)
{
    for (auto& tc : terms) {
        if (tc.source != kProfileSource) {
            continue;
        }
        if (auto it = sources.find(tc.term); it != sources.end()) {
            tc.source = it->second;
        }
    }
}

ProfileVariant source_variant(QuerySource src, ProfileVariant requested)
{
    return src == QuerySource::ProfilePlusEntities ? ProfileVariant::FullPlusEntities : requested;
}

}  // namespace

void LMScorerConfig::validate() const
{
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw ConfigError("lambda must lie in [0,1], got " + std::to_string(lambda));
    }
    if (mu && !(*mu >= 0.0 && std::isfinite(*mu))) {
        throw ConfigError("mu must be a finite value >= 0, got " + std::to_string(*mu));
    }
}

void BM25Config::validate() const
{
    if (!(k1 >= 0.0) || !std::isfinite(k1)) {
        throw ConfigError("k1 must be >= 0");
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw ConfigError("b must lie in [0,1]");
    }
}

double smoothed_doc_prob(const std::string& w, const EntityDocument& d, const BackgroundLM& bg, double mu,
                         const DocumentTranslation* translation)
{
    const double mass = translation != nullptr ? translation->translated_count(w) : static_cast<double>(d.count(w));
    if (mu == 0.0 && mass == 0.0) {
        throw Error("zero probability under unsmoothed model for term '" + w + "' in '" + d.doc_id + "'");
    }
    return (mass + mu * bg.prob(w)) / (static_cast<double>(d.length) + mu);
}

double lm_score(const UnigramLM& query_lm, const UnigramLM* user_lm, const EntityDocument& d, const BackgroundLM& bg,
                const LMScorerConfig& config, const DocumentTranslation* translation,
                std::vector<TermContribution>* breakdown)
{
    config.validate();
    if (!config.mu) {
        throw ConfigError("mu=auto must be resolved against a candidate pool before scoring");
    }
    if (config.lambda < 1.0 && user_lm == nullptr) {
        throw Error("a user model is required when lambda < 1");
    }
    const double mu = *config.mu;
    double score = 0.0;
    auto add_side = [&](const UnigramLM& model, double weight, std::string_view source) {
        for (const auto& [w, p] : model.probs()) {
            const double addend = weight * p * std::log(p / smoothed_doc_prob(w, d, bg, mu, translation));
            score += addend;
            if (breakdown != nullptr) {
                breakdown->push_back({w, std::string(source), addend});
            }
        }
    };
    if (config.lambda > 0.0) {
        add_side(query_lm, config.lambda, kQuerySource);
    }
    if (config.lambda < 1.0) {
        add_side(*user_lm, 1.0 - config.lambda, kProfileSource);
    }
    return score;
}

double bm25_score(const TermSeq& effective_query, const EntityDocument& d, const CorpusStats& stats,
                  const BM25Config& config, std::vector<TermContribution>* breakdown)
{
    std::map<std::string, std::uint32_t> terms;
    for (const auto& t : effective_query) {
        ++terms[t];
    }
    const double n = static_cast<double>(stats.num_docs);
    const double norm = stats.avg_doc_len > 0.0 ? static_cast<double>(d.length) / stats.avg_doc_len : 1.0;
    double score = 0.0;
    for (const auto& [term, qtf] : terms) {
        const double tf = d.count(term);
        if (tf == 0.0) {
            continue;
        }
        const double df = stats.df(term);
        const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
        const double weight = config.weight_by_multiplicity ? static_cast<double>(qtf) : 1.0;
        const double addend = weight * idf * (tf * (config.k1 + 1.0)) / (tf + config.k1 * (1.0 - config.b + config.b * norm));
        score += addend;
        if (breakdown != nullptr) {
            breakdown->push_back({term, std::string(kQuerySource), addend});
        }
    }
    return score;
}

TermSeq build_effective_query(std::string_view query_text, const UserProfile* profile, ProfileVariant variant,
                              const BM25Config& config, bool remove_stopwords)
{
    if (config.query_source == QuerySource::QueryOnly) {
        return tokenize(query_text, remove_stopwords);
    }
    if (profile == nullptr) {
        throw Error("a user profile is required for profile-as-query BM25");
    }
    return tokenize(profile_text(*profile, source_variant(config.query_source, variant)), remove_stopwords);
}

std::string_view ranker_name(RankerKind kind) noexcept { return kRankerNames[static_cast<std::size_t>(kind)]; }

std::optional<RankerKind> parse_ranker(std::string_view name) noexcept
{
    for (std::size_t i = 0; i < kRankerNames.size(); ++i) {
        if (kRankerNames[i] == name) {
            return static_cast<RankerKind>(i);
        }
    }
    return std::nullopt;
}

namespace {

RerankResult rerank_impl(const CandidatePool& pool, const RankingResources& res, const RankerSpec& ranker,
                         const std::string& user_id, const UserProfile* profile, Personalization personalization,
                         bool explain)
{
    if (res.corpus == nullptr) {
        throw Error("re-ranking needs a corpus");
    }
    const Corpus& corpus = *res.corpus;
    const bool stop = corpus.options().remove_stopwords;

    std::vector<const EntityDocument*> docs;
    docs.reserve(pool.doc_ids.size());
    for (const auto& id : pool.doc_ids) {
        const auto* d = corpus.find(id);
        if (d == nullptr) {
            throw Error("pool '" + pool.query_id + "' references unknown doc_id '" + id + "'");
        }
        docs.push_back(d);
    }
    if (personalization && profile == nullptr) {
        throw Error("no profile for user '" + user_id + "'");
    }

    RerankResult result;
    result.run.user_id = user_id;
    result.run.query_id = pool.query_id;

    struct Scored {
        const EntityDocument* doc;
        double score;
        std::vector<TermContribution> terms;
    };
    std::vector<Scored> scored;
    scored.reserve(docs.size());
    bool ascending = true;

    std::map<std::string, std::string> sources;
    if (explain && personalization) {
        const ProfileVariant v = ranker.kind == RankerKind::BM25
                                     ? source_variant(ranker.bm25.query_source, *personalization)
                                     : *personalization;
        sources = term_sources(*profile, v, stop);
    }

    if (ranker.kind == RankerKind::BM25) {
        ranker.bm25.validate();
        ascending = false;
        BM25Config config = ranker.bm25;
        if (!personalization) {
            config.query_source = QuerySource::QueryOnly;
        } else if (config.query_source == QuerySource::QueryOnly) {
            config.query_source = *personalization == ProfileVariant::FullPlusEntities ? QuerySource::ProfilePlusEntities
                                                                                       : QuerySource::Profile;
        }
        const auto query = build_effective_query(pool.query_text, profile, personalization.value_or(ProfileVariant::Full),
                                                 config, stop);
        for (const auto* d : docs) {
            Scored s{d, 0.0, {}};
            s.score = bm25_score(query, *d, corpus.stats(), config, explain ? &s.terms : nullptr);
            if (explain && personalization) {
                for (auto& tc : s.terms) {
                    tc.source = std::string(kProfileSource);
                }
            }
            scored.push_back(std::move(s));
        }
    } else {
        if (res.background == nullptr) {
            throw Error("LM re-ranking needs a background model");
        }
        LMScorerConfig config = ranker.lm;
        config.validate();
        if (!personalization) {
            config.lambda = 1.0;
        }
        config.use_translation = config.use_translation || ranker.kind == RankerKind::LMWithEmbeddings;
        if (config.use_translation && res.embeddings == nullptr) {
            throw Error("the lm-wv ranker needs an embeddings table");
        }
        if (!config.mu) {
            double total = 0.0;
            for (const auto* d : docs) {
                total += static_cast<double>(d->length);
            }
            config.mu = docs.empty() ? 0.0 : total / static_cast<double>(docs.size());
        }
        result.mu = config.mu;

        UnigramLM query_lm;
        if (config.lambda > 0.0) {
            query_lm = build_lm(tokenize(pool.query_text, stop));
        }
        std::optional<UnigramLM> user_lm;
        if (config.lambda < 1.0) {
            auto text = profile_text(*profile, *personalization);
            auto terms = tokenize(text, stop);
            if (terms.empty()) {
                throw EmptyProfileError("profile of user '" + user_id + "' has no usable text for variant "
                            + std::string(variant_name(*personalization)));
            }
            user_lm = build_lm(terms);
        }
        for (const auto* d : docs) {
            std::unique_ptr<DocumentTranslation> translation;
            if (config.use_translation) {
                translation = std::make_unique<DocumentTranslation>(d->term_counts, *res.embeddings, ranker.similarity);
            }
            Scored s{d, 0.0, {}};
            s.score = lm_score(query_lm, user_lm ? &*user_lm : nullptr, *d, *res.background, config, translation.get(),
                               explain ? &s.terms : nullptr);
            scored.push_back(std::move(s));
        }
    }

    std::sort(scored.begin(), scored.end(), [ascending](const Scored& a, const Scored& b) {
        if (a.score != b.score) {
            return ascending ? a.score < b.score : a.score > b.score;
        }
        return a.doc->doc_id < b.doc->doc_id;
    });

    result.run.entries.reserve(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) {
        result.run.entries.push_back({scored[i].doc->doc_id, scored[i].score, i + 1});
        if (explain) {
            attribute(scored[i].terms, sources);
            result.explanations.push_back(std::move(scored[i].terms));
        }
    }
    return result;
}

}  // namespace

RunList rerank(const CandidatePool& pool, const RankingResources& resources, const RankerSpec& ranker,
               const std::string& user_id, const UserProfile* profile, Personalization personalization)
{
    return rerank_impl(pool, resources, ranker, user_id, profile, personalization, false).run;
}

RerankResult rerank_explained(const CandidatePool& pool, const RankingResources& resources, const RankerSpec& ranker,
                              const std::string& user_id, const UserProfile* profile,
                              Personalization personalization)
{
    return rerank_impl(pool, resources, ranker, user_id, profile, personalization, true);
}

}  // namespace pse
