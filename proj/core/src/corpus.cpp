#include "pse/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "codec.hpp"
#include "pse/error.hpp"
#include "pse/rng.hpp"
#include "pse/text.hpp"

namespace pse {

std::string document_text(const DocumentRecord& rec, bool include_comments)
{
    std::string text = rec.title;
    text += ' ';
    text += rec.summary;
    if (include_comments) {
        for (const auto& c : rec.comments) {
            text += ' ';
            text += c;
        }
    }
    return text;
}

Corpus Corpus::build(std::vector<DocumentRecord> records, CorpusOptions options)
{
    std::vector<EntityDocument> docs;
    docs.reserve(records.size());
    for (auto& rec : records) {
        EntityDocument doc;
        for (auto& term : tokenize(document_text(rec, options.include_comments), options.remove_stopwords)) {
            ++doc.term_counts[std::move(term)];
            ++doc.length;
        }
        doc.doc_id = std::move(rec.doc_id);
        doc.title = std::move(rec.title);
        doc.summary = std::move(rec.summary);
        doc.comments = std::move(rec.comments);
        docs.push_back(std::move(doc));
    }
    return from_documents(std::move(docs), options);
}

Corpus Corpus::from_documents(std::vector<EntityDocument> docs, CorpusOptions options)
{
    Corpus c;
    c.docs_ = std::move(docs);
    c.options_ = options;
    c.index_documents();
    return c;
}

void Corpus::index_documents()
{
    by_id_.clear();
    stats_ = CorpusStats{};
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        const auto& d = docs_[i];
        if (d.doc_id.empty()) {
            throw Error("document at position " + std::to_string(i) + " has an empty doc_id");
        }
        if (!by_id_.emplace(d.doc_id, i).second) {
            throw Error("duplicate doc_id '" + d.doc_id + "'");
        }
        std::uint64_t len = 0;
        for (const auto& [term, count] : d.term_counts) {
            len += count;
            ++stats_.doc_freq[term];
        }
        if (len != d.length) {
            throw Error("document '" + d.doc_id + "' length does not match its term counts");
        }
        stats_.total_tokens += d.length;
    }
    stats_.num_docs = docs_.size();
    stats_.avg_doc_len = docs_.empty()
                             ? 0.0
                             : static_cast<double>(stats_.total_tokens) / static_cast<double>(docs_.size());
}

const EntityDocument* Corpus::find(const std::string& doc_id) const
{
    auto it = by_id_.find(doc_id);
    return it == by_id_.end() ? nullptr : &docs_[it->second];
}

const EntityDocument& Corpus::at(const std::string& doc_id) const
{
    if (const auto* d = find(doc_id)) {
        return *d;
    }
    throw Error("unknown doc_id '" + doc_id + "'");
}

std::vector<DocumentRecord> read_document_records(std::istream& in, const std::string& source)
{
    std::vector<DocumentRecord> out;
    codec::for_each_json_line(in, source, [&](const codec::json& j, const std::string& where) {
        DocumentRecord rec;
        rec.doc_id = codec::required_string(j, "doc_id", where);
        rec.title = codec::optional_string(j, "title", where);
        rec.summary = codec::optional_string(j, "summary", where);
        rec.comments = codec::optional_string_list(j, "comments", where);
        out.push_back(std::move(rec));
    });
    return out;
}

Corpus load_documents(const std::string& path, CorpusOptions options)
{
    auto in = codec::open_input(path);
    auto records = read_document_records(in, path);
    std::unordered_set<std::string> seen;
    for (const auto& r : records) {
        if (!seen.insert(r.doc_id).second) {
            throw Error(path + ": duplicate doc_id '" + r.doc_id + "'");
        }
    }
    return Corpus::build(std::move(records), options);
}

void save_index(const Corpus& corpus, const std::string& path)
{
    codec::json j;
    j["format"] = "pse-index/1";
    j["options"] = {{"remove_stopwords", corpus.options().remove_stopwords},
                    {"include_comments", corpus.options().include_comments}};
    j["stats"] = {{"num_docs", corpus.stats().num_docs},
                  {"total_tokens", corpus.stats().total_tokens},
                  {"avg_doc_len", corpus.stats().avg_doc_len}};
    auto docs = codec::json::array();
    for (const auto& d : corpus.documents()) {
        codec::json counts = codec::json::object();
        for (const auto& [term, c] : d.term_counts) {
            counts[term] = c;
        }
        docs.push_back({{"doc_id", d.doc_id},
                        {"title", d.title},
                        {"summary", d.summary},
                        {"comments", d.comments},
                        {"length", d.length},
                        {"term_counts", std::move(counts)}});
    }
    j["documents"] = std::move(docs);
    codec::write_text_file(path, j.dump() + "\n");
}

Corpus load_index(const std::string& path)
{
    auto in = codec::open_input(path);
    codec::json j;
    try {
        in >> j;
    } catch (const codec::json::exception& e) {
        throw Error(path + ": not a valid index file: " + e.what());
    }
    try {
        if (j.value("format", "") != "pse-index/1") {
            throw Error(path + ": unsupported index format");
        }
        CorpusOptions options;
        options.remove_stopwords = j.at("options").at("remove_stopwords").get<bool>();
        options.include_comments = j.at("options").at("include_comments").get<bool>();
        std::vector<EntityDocument> docs;
        for (const auto& jd : j.at("documents")) {
            EntityDocument d;
            d.doc_id = jd.at("doc_id").get<std::string>();
            d.title = jd.at("title").get<std::string>();
            d.summary = jd.at("summary").get<std::string>();
            d.comments = jd.at("comments").get<std::vector<std::string>>();
            d.length = jd.at("length").get<std::uint64_t>();
            for (const auto& [term, c] : jd.at("term_counts").items()) {
                d.term_counts.emplace(term, c.get<std::uint32_t>());
            }
            docs.push_back(std::move(d));
        }
        return Corpus::from_documents(std::move(docs), options);
    } catch (const codec::json::exception& e) {
        throw Error(path + ": malformed index: " + e.what());
    }
}

std::vector<CandidatePool> read_pools(std::istream& in, const std::string& source)
{
    std::vector<CandidatePool> out;
    std::unordered_set<std::string> seen_queries;
    codec::for_each_json_line(in, source, [&](const codec::json& j, const std::string& where) {
        CandidatePool pool;
        pool.query_id = codec::required_string(j, "query_id", where);
        pool.query_text = codec::optional_string(j, "query_text", where);
        pool.doc_ids = codec::optional_string_list(j, "doc_ids", where);
        if (!seen_queries.insert(pool.query_id).second) {
            throw Error(where + ": duplicate query_id '" + pool.query_id + "'");
        }
        std::unordered_set<std::string> ids(pool.doc_ids.begin(), pool.doc_ids.end());
        if (ids.size() != pool.doc_ids.size()) {
            throw Error(where + ": duplicate doc_id in doc_ids");
        }
        if (j.contains("sampled_ids")) {
            auto sampled = codec::optional_string_list(j, "sampled_ids", where);
            std::unordered_set<std::string> sampled_set;
            for (const auto& id : sampled) {
                if (!ids.contains(id)) {
                    throw Error(where + ": sampled id '" + id + "' is not in doc_ids");
                }
                if (!sampled_set.insert(id).second) {
                    throw Error(where + ": duplicate sampled id '" + id + "'");
                }
            }
            pool.sampled_ids = std::move(sampled);
        }
        out.push_back(std::move(pool));
    });
    return out;
}

std::vector<CandidatePool> load_pools(const std::string& path)
{
    auto in = codec::open_input(path);
    return read_pools(in, path);
}

void write_pools(std::ostream& out, const std::vector<CandidatePool>& pools)
{
    for (const auto& p : pools) {
        codec::json j = codec::json::object();
        j["query_id"] = p.query_id;
        j["query_text"] = p.query_text;
        j["doc_ids"] = p.doc_ids;
        if (p.sampled_ids) {
            j["sampled_ids"] = *p.sampled_ids;
        }
        out << j.dump() << '\n';
    }
}

CandidatePool sample_pool(const CandidatePool& pool, std::size_t n, std::uint64_t seed)
{
    const std::size_t size = pool.doc_ids.size();
    if (n > size) {
        throw Error("cannot sample " + std::to_string(n) + " documents from pool '" + pool.query_id + "' of size "
                    + std::to_string(size));
    }
    std::vector<std::size_t> positions(size);
    for (std::size_t i = 0; i < size; ++i) {
        positions[i] = i;
    }
    Xorshift64Star rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform(size - i));
        std::swap(positions[i], positions[j]);
    }
    positions.resize(n);
    std::sort(positions.begin(), positions.end());

    CandidatePool out = pool;
    std::vector<std::string> sampled;
    sampled.reserve(n);
    for (auto pos : positions) {
        sampled.push_back(pool.doc_ids[pos]);
    }
    out.sampled_ids = std::move(sampled);
    return out;
}

BackgroundLM corpus_background(const Corpus& corpus)
{
    std::map<std::string, std::uint64_t> counts;
    for (const auto& d : corpus.documents()) {
        for (const auto& [term, n] : d.term_counts) {
            counts[term] += n;
        }
    }
    return BackgroundLM::from_counts(std::move(counts));
}

}  // namespace pse
