#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pse/text.hpp"

namespace pse {

/// One searchable entity page (e.g. a book page) and its term statistics.
struct EntityDocument {
    std::string doc_id;
    std::string title;
    std::string summary;
    std::vector<std::string> comments;
    std::map<std::string, std::uint32_t> term_counts;
    std::uint64_t length = 0;  // sum of term_counts

    std::uint32_t count(const std::string& term) const
    {
        auto it = term_counts.find(term);
        return it == term_counts.end() ? 0 : it->second;
    }
};

struct CorpusStats {
    std::size_t num_docs = 0;
    std::unordered_map<std::string, std::uint32_t> doc_freq;
    std::uint64_t total_tokens = 0;
    double avg_doc_len = 0.0;

    std::uint32_t df(const std::string& term) const
    {
        auto it = doc_freq.find(term);
        return it == doc_freq.end() ? 0 : it->second;
    }
};

/// How document text is turned into terms. Persisted with the index so that
/// queries and profiles are tokenized the same way as documents.
struct CorpusOptions {
    bool remove_stopwords = true;
    bool include_comments = true;
};

/// Raw record as it appears in a documents file.
struct DocumentRecord {
    std::string doc_id;
    std::string title;
    std::string summary;
    std::vector<std::string> comments;
};

class Corpus {
  public:
    Corpus() = default;

    /// Tokenizes every record and computes statistics. Throws on duplicate ids.
    static Corpus build(std::vector<DocumentRecord> records, CorpusOptions options = {});

    /// Assembles a corpus from already-counted documents (index loading).
    static Corpus from_documents(std::vector<EntityDocument> docs, CorpusOptions options);

    const std::vector<EntityDocument>& documents() const noexcept { return docs_; }
    const CorpusStats& stats() const noexcept { return stats_; }
    const CorpusOptions& options() const noexcept { return options_; }

    const EntityDocument* find(const std::string& doc_id) const;
    /// Throws pse::Error naming the id when it is not in the corpus.
    const EntityDocument& at(const std::string& doc_id) const;

    std::size_t size() const noexcept { return docs_.size(); }

  private:
    void index_documents();

    std::vector<EntityDocument> docs_;
    std::unordered_map<std::string, std::size_t> by_id_;
    CorpusStats stats_;
    CorpusOptions options_;
};

/// Text used for term statistics: title, summary, then comments.
std::string document_text(const DocumentRecord& rec, bool include_comments);

/// JSON-lines documents file: `doc_id`, `title`, `summary`, `comments`.
/// Errors name the offending line number.
std::vector<DocumentRecord> read_document_records(std::istream& in, const std::string& source = "<stream>");
Corpus load_documents(const std::string& path, CorpusOptions options = {});

/// Index file: a single JSON object holding the options, statistics and
/// per-document term counts. Written deterministically.
void save_index(const Corpus& corpus, const std::string& path);
Corpus load_index(const std::string& path);

/// Collection model from the summed term counts of every document, so it
/// shares the index's tokenization.
BackgroundLM corpus_background(const Corpus& corpus);

/// Non-personalized result pool M for one query.
struct CandidatePool {
    std::string query_id;
    std::string query_text;
    std::vector<std::string> doc_ids;
    std::optional<std::vector<std::string>> sampled_ids;
};

/// JSON-lines pools file: `query_id`, `query_text`, `doc_ids`, optional `sampled_ids`.
std::vector<CandidatePool> read_pools(std::istream& in, const std::string& source = "<stream>");
std::vector<CandidatePool> load_pools(const std::string& path);
void write_pools(std::ostream& out, const std::vector<CandidatePool>& pools);

/// Draws `n` ids without replacement: a Fisher-Yates pass over the first n
/// positions of a copy of doc_ids, driven by Xorshift64Star(seed). For
/// i = 0..n-1, j = i + uniform(size - i), swap(ids[i], ids[j]). The chosen
/// ids are returned in their original pool order.
CandidatePool sample_pool(const CandidatePool& pool, std::size_t n, std::uint64_t seed);

}  // namespace pse
