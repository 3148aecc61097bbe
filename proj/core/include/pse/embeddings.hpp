#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pse {

struct SimilarityConfig {
    /// Cosines below this value count as unrelated (similarity 0).
    double threshold = 0.5;
};

/// Pre-computed word vectors, stored unit-normalized for cosine lookups.
class EmbeddingTable {
  public:
    EmbeddingTable() = default;

    /// Builds a table from raw vectors. Terms are lowercased, later duplicates
    /// are ignored and zero vectors are skipped. Throws on a length mismatch.
    static EmbeddingTable from_vectors(std::size_t dim, std::vector<std::pair<std::string, std::vector<double>>> rows);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return unit_.size(); }
    bool contains(const std::string& term) const { return unit_.contains(term); }

    /// Unit-length vector for `term`, or nullptr.
    const std::vector<double>* unit_vector(const std::string& term) const;

  private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::vector<double>> unit_;
};

/// word2vec text format: an optional "<count> <dim>" header, then
/// "<term> v1 ... vdim" per line. Without a header the first row fixes dim.
EmbeddingTable read_embeddings(std::istream& in, const std::string& source = "<stream>");
EmbeddingTable load_embeddings(const std::string& path);

/// Thresholded cosine similarity. 1 for identical terms (even when absent
/// from the table), 0 when either term is missing, 0 below the threshold,
/// and never negative.
double sim(const std::string& w1, const std::string& w2, const EmbeddingTable& table, const SimilarityConfig& config);

/// p(w|u) = sim(w,u) / sum over u' in doc_vocab of sim(u',u).
/// Throws pse::Error if u is not in doc_vocab.
double translation_prob(const std::string& w, const std::string& u, std::span<const std::string> doc_vocab,
                        const EmbeddingTable& table, const SimilarityConfig& config);

/// Per-document translation state: the normalizers of p(.|u) for every
/// document term u, computed once so that many target terms can be scored.
class DocumentTranslation {
  public:
    DocumentTranslation(const std::map<std::string, std::uint32_t>& term_counts, const EmbeddingTable& table,
                        const SimilarityConfig& config);

    /// sum over u in V_d of p(w|u) * count(u, d).
    double translated_count(const std::string& w) const;

  private:
    struct Source {
        const std::string* term;
        const std::vector<double>* unit;
        double count_over_norm;
    };
    const EmbeddingTable* table_;
    SimilarityConfig config_;
    std::vector<Source> sources_;
};

}  // namespace pse
