#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pse/corpus.hpp"
#include "pse/embeddings.hpp"
#include "pse/profiles.hpp"
#include "pse/text.hpp"

namespace pse {

/// Mixture-KL language-model scorer settings.
struct LMScorerConfig {
    /// Weight of the query model against the user model, in [0,1].
    double lambda = 0.0;
    /// Dirichlet prior. std::nullopt means AUTO: the mean length of the
    /// documents in the pool being re-ranked.
    std::optional<double> mu;
    bool use_translation = false;

    /// Throws ConfigError for lambda outside [0,1] or a negative mu.
    void validate() const;
};

enum class QuerySource { QueryOnly, Profile, ProfilePlusEntities };

struct BM25Config {
    double k1 = 1.5;
    double b = 0.75;
    QuerySource query_source = QuerySource::QueryOnly;
    /// Weight each distinct query term by its multiplicity instead of once.
    bool weight_by_multiplicity = false;

    void validate() const;
};

/// One addend of a document score, with the text it came from: "query", a
/// profile field name, or "entity-description".
struct TermContribution {
    std::string term;
    std::string source;
    double contribution = 0.0;
};

inline constexpr std::string_view kQuerySource = "query";
inline constexpr std::string_view kProfileSource = "profile";

/// Dirichlet-smoothed document probability:
///   (m(w,d) + mu * p(w|C)) / (|d| + mu)
/// where m(w,d) is count(w,d), or with `translation` the translated mass
/// sum over u in V_d of p(w|u) * count(u,d). Throws when mu = 0 and m(w,d) = 0.
double smoothed_doc_prob(const std::string& w, const EntityDocument& d, const BackgroundLM& bg, double mu,
                         const DocumentTranslation* translation = nullptr);

/// lambda * KL(query || doc) + (1 - lambda) * KL(user || doc), natural log.
/// Lower is better. A side whose weight is zero is not evaluated, so with
/// lambda = 1 the user model is never touched. `config.mu` must be set.
/// When `breakdown` is given it receives every weighted addend; the returned
/// score is their sum in that order. User-model addends carry kProfileSource.
double lm_score(const UnigramLM& query_lm, const UnigramLM* user_lm, const EntityDocument& d, const BackgroundLM& bg,
                const LMScorerConfig& config, const DocumentTranslation* translation = nullptr,
                std::vector<TermContribution>* breakdown = nullptr);

/// Okapi BM25 over the distinct terms of `effective_query` with the
/// non-negative idf ln((N - df + 0.5)/(df + 0.5) + 1). Higher is better.
/// Breakdown addends carry kQuerySource.
double bm25_score(const TermSeq& effective_query, const EntityDocument& d, const CorpusStats& stats,
                  const BM25Config& config, std::vector<TermContribution>* breakdown = nullptr);

/// QueryOnly: the tokenized query. Profile: the tokenized profile text for
/// `variant`. ProfilePlusEntities: the tokenized FullPlusEntities text.
/// Throws if a profile is needed and `profile` is null.
TermSeq build_effective_query(std::string_view query_text, const UserProfile* profile, ProfileVariant variant,
                              const BM25Config& config, bool remove_stopwords = true);

enum class RankerKind { LM, LMWithEmbeddings, BM25 };

std::string_view ranker_name(RankerKind kind) noexcept;
std::optional<RankerKind> parse_ranker(std::string_view name) noexcept;

struct RankerSpec {
    RankerKind kind = RankerKind::LM;
    LMScorerConfig lm;
    BM25Config bm25;
    SimilarityConfig similarity;
};

/// Shared read-only inputs for scoring. `embeddings` is required by
/// RankerKind::LMWithEmbeddings only.
struct RankingResources {
    const Corpus* corpus = nullptr;
    const BackgroundLM* background = nullptr;
    const EmbeddingTable* embeddings = nullptr;
};

struct RunEntry {
    std::string doc_id;
    double score = 0.0;
    std::size_t rank = 0;  // 1-based
};

struct RunList {
    std::string user_id;
    std::string query_id;
    std::vector<RunEntry> entries;
};

struct RerankResult {
    RunList run;
    /// Parallel to run.entries; filled only by rerank_explained().
    std::vector<std::vector<TermContribution>> explanations;
    /// Dirichlet prior actually used (LM rankers only).
    std::optional<double> mu;
};

/// Which profile text personalizes the ranking; std::nullopt is the
/// non-personalized (query only) mode. For LM rankers query-only mode forces
/// lambda = 1. For BM25 a variant selects the profile-as-query source.
using Personalization = std::optional<ProfileVariant>;

/// Scores every pool document and sorts by polarity (ascending divergence for
/// LM, descending BM25), breaking ties by doc_id ascending.
RunList rerank(const CandidatePool& pool, const RankingResources& resources, const RankerSpec& ranker,
               const std::string& user_id, const UserProfile* profile, Personalization personalization);

/// rerank() plus per-document term contributions attributed to their source.
RerankResult rerank_explained(const CandidatePool& pool, const RankingResources& resources, const RankerSpec& ranker,
                              const std::string& user_id, const UserProfile* profile,
                              Personalization personalization);

}  // namespace pse
