#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pse {

/// Ordered sequence of lowercase word tokens.
using TermSeq = std::vector<std::string>;

/// Splits on every non-alphanumeric code point (UTF-8 aware), lowercases,
/// and drops empty tokens. With `remove_stopwords` the embedded English
/// stopword list is filtered out. No stemming.
TermSeq tokenize(std::string_view text, bool remove_stopwords);

/// Lowercases UTF-8 text with the same case mapping tokenize() uses.
std::string lowercase(std::string_view text);

/// True if `term` is in the embedded stopword list (exact, lowercase match).
bool is_stopword(std::string_view term);

/// The embedded stopword list, one entry per line of resources/stopwords.txt.
const std::vector<std::string>& stopword_list();

/// Maximum-likelihood unigram language model.
class UnigramLM {
  public:
    UnigramLM() = default;

    double prob(const std::string& term) const;
    bool contains(const std::string& term) const { return probs_.contains(term); }
    const std::map<std::string, double>& probs() const noexcept { return probs_; }
    std::uint64_t total_terms() const noexcept { return total_terms_; }
    std::size_t size() const noexcept { return probs_.size(); }

  private:
    friend UnigramLM build_lm(const TermSeq& terms);
    std::map<std::string, double> probs_;
    std::uint64_t total_terms_ = 0;
};

/// probs[w] = count(w) / |terms|. Throws pse::Error on empty input.
UnigramLM build_lm(const TermSeq& terms);

/// Laplace-smoothed collection model with explicit mass for unseen terms:
/// p(w) = (count(w) + 1) / (T + V + 1), p(unseen) = 1 / (T + V + 1).
class BackgroundLM {
  public:
    BackgroundLM() = default;

    /// Builds from raw collection counts. Throws if the counts are empty.
    static BackgroundLM from_counts(std::map<std::string, std::uint64_t> counts);

    /// Uses externally estimated probabilities as they are. Every value,
    /// including `oov_prob`, must be positive. Such a model has no counts and
    /// cannot be saved with save_background().
    static BackgroundLM from_probabilities(const std::map<std::string, double>& probs, double oov_prob);

    double prob(const std::string& term) const;
    double oov_prob() const noexcept { return oov_prob_; }
    std::size_t vocab_size() const noexcept { return probs_.size(); }
    std::uint64_t total_tokens() const noexcept { return total_tokens_; }
    const std::map<std::string, std::uint64_t>& counts() const noexcept { return counts_; }

  private:
    std::map<std::string, std::uint64_t> counts_;
    std::unordered_map<std::string, double> probs_;
    std::uint64_t total_tokens_ = 0;
    double oov_prob_ = 0.0;
};

BackgroundLM build_background(std::span<const TermSeq> stream);

/// Tab-separated counts file: a `#total_tokens<TAB>T` header, then
/// `term<TAB>count` lines in byte order.
void save_background(const BackgroundLM& lm, const std::string& path);
BackgroundLM load_background(const std::string& path);

}  // namespace pse
