#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pse/corpus.hpp"
#include "pse/eval.hpp"
#include "pse/profiles.hpp"

namespace pse {

/// Seeded generator for a small topical preference collection: documents
/// spread over topics, users that each prefer one topic, profiles whose
/// favorites fields carry that topic's vocabulary, and judgments that grade
/// preferred-topic documents 2 and everything else 0. Queries use only
/// topic-neutral words, so the query alone carries no preference signal.
struct SyntheticOptions {
    std::uint64_t seed = 42;
    std::size_t num_docs = 200;
    std::size_t num_topics = 5;
    std::size_t num_users = 10;
    std::size_t num_queries = 4;
    std::size_t pool_size = 50;
    std::size_t judged_per_pool = 20;
};

struct SyntheticFixture {
    std::vector<DocumentRecord> documents;
    std::vector<CandidatePool> pools;
    ProfileMap profiles;
    std::vector<EntityRecord> entities;
    Judgments judgments;
    std::map<std::string, std::size_t> doc_topic;
    std::map<std::string, std::size_t> user_topic;
};

SyntheticFixture make_synthetic_fixture(const SyntheticOptions& options = {});

/// Writes docs.jsonl, pools.jsonl, profiles.jsonl, entities.jsonl and
/// qrels.txt into `dir` (which must exist).
void write_synthetic_fixture(const SyntheticFixture& fixture, const std::string& dir);

}  // namespace pse
