#include "pse/synthetic.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "codec.hpp"
#include "pse/error.hpp"
#include "pse/rng.hpp"

namespace pse {
namespace {

const std::vector<std::vector<std::string>>& topic_vocabularies()
{
    static const std::vector<std::vector<std::string>> vocab = {
        {"galaxy", "rocket", "planet", "orbit", "astronaut", "alien", "spaceship", "cosmos", "nebula", "starship",
         "asteroid", "comet"},
        {"love", "kiss", "wedding", "heart", "passion", "romance", "courtship", "bride", "lovers", "affair", "suitor",
         "sweetheart"},
        {"murder", "detective", "police", "crime", "killer", "suspect", "investigation", "clue", "gangster", "heist",
         "victim", "alibi"},
        {"dragon", "wizard", "magic", "sword", "kingdom", "elf", "sorcery", "quest", "spell", "knight", "castle",
         "prophecy"},
        {"war", "empire", "revolution", "monarch", "medieval", "battle", "dynasty", "century", "soldiers", "colonial",
         "ancient", "treaty"},
    };
    return vocab;
}

std::vector<std::string> topic_words(std::size_t topic)
{
    const auto& vocab = topic_vocabularies();
    if (topic < vocab.size()) {
        return vocab[topic];
    }
    std::vector<std::string> words;
    for (int i = 0; i < 12; ++i) {
        words.push_back("topic" + std::to_string(topic) + "word" + std::to_string(i));
    }
    return words;
}

const std::vector<std::string> kGeneric = {"story", "book",   "novel",   "characters", "author", "reader",
                                           "plot",  "tale",   "pages",   "series",     "world",  "life",
                                           "chapter", "writing", "journey", "family",   "friends", "narrative"};
const std::vector<std::string> kQueries = {"story characters", "novel plot", "book series", "tale journey",
                                           "family narrative", "world life"};
const std::vector<std::string> kCities = {"Springfield", "Riverton", "Lakeside", "Brookfield", "Fairview"};
const std::vector<std::string> kHobbies = {"gardening", "cycling", "baking", "chess", "painting", "pottery", "yoga"};
const std::vector<std::string> kMusic = {"jazz", "blues", "techno", "reggae", "opera"};

const std::string& pick(Xorshift64Star& rng, const std::vector<std::string>& words)
{
    return words[static_cast<std::size_t>(rng.uniform(words.size()))];
}

std::string words(Xorshift64Star& rng, const std::vector<std::string>& vocab, std::size_t n)
{
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += pick(rng, vocab);
    }
    return out;
}

std::string padded(const char* prefix, std::size_t i, int width)
{
    auto n = std::to_string(i);
    if (static_cast<int>(n.size()) < width) {
        n.insert(0, static_cast<std::size_t>(width) - n.size(), '0');
    }
    return prefix + n;
}

}  // namespace

SyntheticFixture make_synthetic_fixture(const SyntheticOptions& opt)
{
    if (opt.num_topics == 0 || opt.num_docs == 0 || opt.pool_size > opt.num_docs
        || opt.judged_per_pool > opt.pool_size || opt.num_queries > kQueries.size()) {
        throw Error("inconsistent synthetic fixture options");
    }
    SyntheticFixture fx;
    Xorshift64Star rng(opt.seed);

    for (std::size_t i = 0; i < opt.num_docs; ++i) {
        const std::size_t topic = i % opt.num_topics;
        const auto vocab = topic_words(topic);
        DocumentRecord rec;
        rec.doc_id = padded("d", i, 3);
        rec.title = "Volume " + std::to_string(i);
        const std::size_t generic = 8 + static_cast<std::size_t>(rng.uniform(9));
        const std::size_t topical = 8 + static_cast<std::size_t>(rng.uniform(9));
        rec.summary = words(rng, kGeneric, generic) + " " + words(rng, vocab, topical);
        rec.comments.push_back(words(rng, kGeneric, 4 + static_cast<std::size_t>(rng.uniform(5))));
        fx.doc_topic[rec.doc_id] = topic;
        fx.documents.push_back(std::move(rec));
    }

    CandidatePool all;
    for (const auto& d : fx.documents) {
        all.doc_ids.push_back(d.doc_id);
    }
    for (std::size_t q = 0; q < opt.num_queries; ++q) {
        all.query_id = padded("q", q + 1, 2);
        all.query_text = kQueries[q];
        auto pool = sample_pool(all, opt.pool_size, rng.next());
        pool.doc_ids = *pool.sampled_ids;
        pool.sampled_ids.reset();
        fx.pools.push_back(std::move(pool));
    }

    for (std::size_t u = 0; u < opt.num_users; ++u) {
        const std::size_t topic = u % opt.num_topics;
        const auto vocab = topic_words(topic);
        UserProfile p;
        p.user_id = padded("u", u + 1, 2);
        p.demographics["age"] = std::to_string(20 + rng.uniform(40));
        p.demographics["location"] = pick(rng, kCities);
        p.hobbies = words(rng, kHobbies, 2);
        p.favorite_books = {words(rng, vocab, 3), words(rng, vocab, 3)};
        p.book_genres = {words(rng, vocab, 2)};
        p.favorite_movies = {words(rng, vocab, 2)};
        p.favorite_music = {pick(rng, kMusic)};
        fx.user_topic[p.user_id] = topic;

        EntityRecord ent;
        ent.user_id = p.user_id;
        ent.entity.owner_field = "favorite_books";
        ent.entity.mention = p.favorite_books.front();
        ent.entity.entity_id = "E_" + p.user_id;
        ent.entity.description = words(rng, vocab, 6) + " " + words(rng, kGeneric, 2);
        fx.entities.push_back(ent);
        p = attach_entities(p, std::span(&ent.entity, 1));

        for (const auto& pool : fx.pools) {
            const auto judged = sample_pool(pool, opt.judged_per_pool, rng.next());
            for (const auto& id : *judged.sampled_ids) {
                fx.judgments.set(p.user_id, pool.query_id, id, fx.doc_topic.at(id) == topic ? 2 : 0);
            }
        }
        fx.profiles.emplace(p.user_id, std::move(p));
    }
    return fx;
}

void write_synthetic_fixture(const SyntheticFixture& fx, const std::string& dir)
{
    auto path = [&](const char* name) { return dir + "/" + name; };
    {
        std::ostringstream out;
        for (const auto& d : fx.documents) {
            codec::json j = {{"doc_id", d.doc_id}, {"title", d.title}, {"summary", d.summary}, {"comments", d.comments}};
            out << j.dump() << '\n';
        }
        codec::write_text_file(path("docs.jsonl"), out.str());
    }
    {
        std::ostringstream out;
        write_pools(out, fx.pools);
        codec::write_text_file(path("pools.jsonl"), out.str());
    }
    save_profiles(fx.profiles, path("profiles.jsonl"));
    {
        std::ostringstream out;
        for (const auto& e : fx.entities) {
            auto j = codec::entity_to_json(e.entity);
            j["user_id"] = e.user_id;
            out << j.dump() << '\n';
        }
        codec::write_text_file(path("entities.jsonl"), out.str());
    }
    {
        std::ostringstream out;
        write_qrels(out, fx.judgments);
        codec::write_text_file(path("qrels.txt"), out.str());
    }
}

}  // namespace pse
