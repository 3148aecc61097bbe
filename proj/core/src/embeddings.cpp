#include "pse/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "pse/error.hpp"
#include "pse/text.hpp"

namespace pse {
namespace {

std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') {
            ++j;
        }
        if (j > i) {
            out.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

bool parse_size(std::string_view s, std::size_t& out)
{
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double thresholded(double cosine, const SimilarityConfig& config)
{
    cosine = std::min(cosine, 1.0);
    if (cosine < config.threshold || cosine <= 0.0) {
        return 0.0;
    }
    return cosine;
}

}  // namespace

EmbeddingTable EmbeddingTable::from_vectors(std::size_t dim,
                                            std::vector<std::pair<std::string, std::vector<double>>> rows)
{
    EmbeddingTable t;
    t.dim_ = dim;
    for (auto& [term, vec] : rows) {
        if (vec.size() != dim) {
            throw Error("embedding for '" + term + "' has " + std::to_string(vec.size()) + " values, expected "
                        + std::to_string(dim));
        }
        auto key = lowercase(term);
        if (t.unit_.contains(key)) {
            continue;
        }
        const double norm = std::sqrt(dot(vec, vec));
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            continue;
        }
        for (auto& v : vec) {
            v /= norm;
        }
        t.unit_.emplace(std::move(key), std::move(vec));
    }
    return t;
}

const std::vector<double>* EmbeddingTable::unit_vector(const std::string& term) const
{
    auto it = unit_.find(term);
    return it == unit_.end() ? nullptr : &it->second;
}

EmbeddingTable read_embeddings(std::istream& in, const std::string& source)
{
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    std::size_t dim = 0;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_ws(line);
        if (fields.empty()) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(line_no);
        if (first) {
            first = false;
            std::size_t count = 0;
            std::size_t header_dim = 0;
            if (fields.size() == 2 && parse_size(fields[0], count) && parse_size(fields[1], header_dim)) {
                if (header_dim == 0) {
                    throw Error(where + ": embedding dimension must be positive");
                }
                dim = header_dim;
                continue;
            }
            if (fields.size() < 2) {
                throw Error(where + ": expected '<term> v1 ... vdim'");
            }
            dim = fields.size() - 1;
        }
        if (fields.size() != dim + 1) {
            throw Error(where + ": expected " + std::to_string(dim) + " values, found "
                        + std::to_string(fields.size() - 1));
        }
        std::vector<double> vec(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            const auto f = fields[i + 1];
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), vec[i]);
            if (ec != std::errc{} || ptr != f.data() + f.size()) {
                throw Error(where + ": invalid number '" + std::string(f) + "'");
            }
        }
        rows.emplace_back(std::string(fields[0]), std::move(vec));
    }
    return EmbeddingTable::from_vectors(dim, std::move(rows));
}

EmbeddingTable load_embeddings(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open embeddings file '" + path + "'");
    }
    return read_embeddings(in, path);
}

double sim(const std::string& w1, const std::string& w2, const EmbeddingTable& table, const SimilarityConfig& config)
{
    if (w1 == w2) {
        return 1.0;
    }
    const auto* a = table.unit_vector(w1);
    const auto* b = table.unit_vector(w2);
    if (a == nullptr || b == nullptr) {
        return 0.0;
    }
    return thresholded(dot(*a, *b), config);
}

double translation_prob(const std::string& w, const std::string& u, std::span<const std::string> doc_vocab,
                        const EmbeddingTable& table, const SimilarityConfig& config)
{
    if (std::find(doc_vocab.begin(), doc_vocab.end(), u) == doc_vocab.end()) {
        throw Error("translation source '" + u + "' is not in the document vocabulary");
    }
    double norm = 0.0;
    for (const auto& other : doc_vocab) {
        norm += sim(other, u, table, config);
    }
    return sim(w, u, table, config) / norm;
}

DocumentTranslation::DocumentTranslation(const std::map<std::string, std::uint32_t>& term_counts,
                                         const EmbeddingTable& table, const SimilarityConfig& config)
    : table_(&table), config_(config)
{
    sources_.reserve(term_counts.size());
    for (const auto& [term, count] : term_counts) {
        sources_.push_back({&term, table.unit_vector(term), static_cast<double>(count)});
    }
    // Normalizer of p(.|u): sum over u' in V_d of sim(u', u).
    for (auto& u : sources_) {
        double norm = 0.0;
        for (const auto& other : sources_) {
            if (other.term == u.term) {
                norm += 1.0;
            } else if (u.unit != nullptr && other.unit != nullptr) {
                norm += thresholded(dot(*other.unit, *u.unit), config_);
            }
        }
        u.count_over_norm /= norm;
    }
}

double DocumentTranslation::translated_count(const std::string& w) const
{
    const auto* wv = table_->unit_vector(w);
    double mass = 0.0;
    for (const auto& u : sources_) {
        if (*u.term == w) {
            mass += u.count_over_norm;
        } else if (wv != nullptr && u.unit != nullptr) {
            mass += thresholded(dot(*wv, *u.unit), config_) * u.count_over_norm;
        }
    }
    return mass;
}

}  // namespace pse
