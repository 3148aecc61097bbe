// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "pse/corpus.hpp"
#include "pse/embeddings.hpp"
#include "pse/eval.hpp"
#include "pse/experiment.hpp"
#include "pse/rankers.hpp"
#include "pse/synthetic.hpp"
#include "test_support.hpp"

namespace {

using namespace pse;
using Clock = std::chrono::steady_clock;

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what)
{
    if (!ok) {
        throw Failure(what);
    }
}

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

// ---------------------------------------------------------------------------
// Reduction suite

struct RandomCorpus {
    std::vector<DocumentRecord> records;
    std::vector<std::vector<std::string>> tokens;  // per record
    std::vector<std::string> vocab;
    std::string query;
    std::string profile;
};

RandomCorpus random_corpus(std::mt19937_64& gen)
{
    RandomCorpus rc;
    const std::size_t vocab = 4 + gen() % 12;
    for (std::size_t i = 0; i < vocab; ++i) {
        rc.vocab.push_back("w" + std::to_string(i));
    }
    auto word = [&] { return rc.vocab[gen() % rc.vocab.size()]; };
    auto phrase = [&](std::size_t lo, std::size_t hi, bool oov) {
        const std::size_t n = lo + gen() % (hi - lo + 1);
        std::string out;
        for (std::size_t i = 0; i < n; ++i) {
            out += (i ? " " : "") + ((oov && gen() % 6 == 0) ? std::string("zz") + std::to_string(gen() % 3) : word());
        }
        return out;
    };
    const std::size_t docs = 3 + gen() % 13;
    for (std::size_t d = 0; d < docs; ++d) {
        DocumentRecord r{"doc" + std::to_string(d), "", phrase(1, 14, false), {}};
        rc.tokens.push_back(tokenize(r.summary, false));
        rc.records.push_back(std::move(r));
    }
    rc.query = phrase(1, 4, true);
    rc.profile = phrase(1, 10, true);
    return rc;
}

// Query likelihood with Dirichlet smoothing over a Laplace background,
// written directly from the definitions.
std::vector<std::string> query_likelihood_order(const RandomCorpus& rc, double mu, std::map<std::string, double>& score)
{
    std::map<std::string, double> collection;
    double total = 0.0;
    for (const auto& toks : rc.tokens) {
        for (const auto& t : toks) {
            collection[t] += 1.0;
            total += 1.0;
        }
    }
    const double denom = total + static_cast<double>(collection.size()) + 1.0;
    auto bg = [&](const std::string& w) {
        auto it = collection.find(w);
        return ((it == collection.end() ? 0.0 : it->second) + 1.0) / denom;
    };
    const auto q = tokenize(rc.query, false);
    std::vector<std::string> ids;
    for (std::size_t d = 0; d < rc.records.size(); ++d) {
        double s = 0.0;
        const auto& toks = rc.tokens[d];
        for (const auto& w : q) {
            const double c = static_cast<double>(std::count(toks.begin(), toks.end(), w));
            s += std::log((c + mu * bg(w)) / (static_cast<double>(toks.size()) + mu));
        }
        score[rc.records[d].doc_id] = s;
        ids.push_back(rc.records[d].doc_id);
    }
    std::sort(ids.begin(), ids.end(), [&](const std::string& a, const std::string& b) {
        return score[a] != score[b] ? score[a] > score[b] : a < b;
    });
    return ids;
}

void reduction_suite()
{
    const auto start = Clock::now();
    std::mt19937_64 gen(20240611);
    std::size_t comparisons = 0;
    double worst = 0.0;
    for (int round = 0; round < 50; ++round) {
        const auto rc = random_corpus(gen);
        const Corpus corpus = Corpus::build(rc.records, {false, true});
        const BackgroundLM bg = corpus_background(corpus);

        std::vector<std::pair<std::string, std::vector<double>>> rows;
        for (std::size_t i = 0; i < rc.vocab.size(); ++i) {
            std::vector<double> v(rc.vocab.size(), 0.0);
            v[i] = 1.0;
            rows.emplace_back(rc.vocab[i], v);
        }
        const auto identity = EmbeddingTable::from_vectors(rc.vocab.size(), rows);

        CandidatePool pool{"q", rc.query, {}, std::nullopt};
        for (const auto& r : rc.records) {
            pool.doc_ids.push_back(r.doc_id);
        }
        std::shuffle(pool.doc_ids.begin(), pool.doc_ids.end(), gen);
        UserProfile profile;
        profile.user_id = "u";
        profile.hobbies = rc.profile;

        const RankingResources res{&corpus, &bg, &identity};
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int trial = 0; trial < 4; ++trial) {
            RankerSpec plain;
            plain.lm.lambda = trial == 0 ? 1.0 : unit(gen);
            if (trial % 2 == 1) {
                plain.lm.mu = 0.5 + 50.0 * unit(gen);
            }
            RankerSpec translated = plain;
            translated.kind = RankerKind::LMWithEmbeddings;

            const auto a = rerank(pool, res, plain, "u", &profile, ProfileVariant::Full);
            const auto b = rerank(pool, res, translated, "u", &profile, ProfileVariant::Full);
            std::map<std::string, double> by_id;
            for (const auto& e : a.entries) {
                by_id[e.doc_id] = e.score;
            }
            for (const auto& e : b.entries) {
                const double diff = std::abs(by_id.at(e.doc_id) - e.score);
                worst = std::max(worst, diff);
                require(diff <= 1e-9, "identity translation differs by " + fmt(diff) + " on corpus " +
                                          std::to_string(round));
            }
            ++comparisons;
        }

        for (std::optional<double> mu : {std::optional<double>(), std::optional<double>(0.5 + 50.0 * unit(gen))}) {
            RankerSpec spec;
            spec.lm.lambda = 1.0;
            spec.lm.mu = mu;
            const auto run = rerank(pool, res, spec, "u", &profile, ProfileVariant::Full);
            double effective_mu = 0.0;
            if (mu) {
                effective_mu = *mu;
            } else {
                for (const auto& t : rc.tokens) {
                    effective_mu += static_cast<double>(t.size());
                }
                effective_mu /= static_cast<double>(rc.tokens.size());
            }
            std::map<std::string, double> ql;
            const auto expected = query_likelihood_order(rc, effective_mu, ql);
            // Documents whose likelihoods agree to rounding may appear in either order.
            for (std::size_t i = 0; i + 1 < run.entries.size(); ++i) {
                const double hi = ql.at(run.entries[i].doc_id);
                const double lo = ql.at(run.entries[i + 1].doc_id);
                require(hi >= lo - 1e-12, "lambda=1 order disagrees with query likelihood on corpus " +
                                              std::to_string(round));
            }
            require(run.entries.size() == expected.size(), "lambda=1 run has the wrong length");
            ++comparisons;
        }
    }
    const double elapsed = seconds_since(start);
    require(elapsed < 10.0, "took " + fmt(elapsed) + " s");
    std::cout << "  (" << comparisons << " comparisons, max score gap " << fmt(worst) << ", " << fmt(elapsed)
              << " s)\n";
}

// ---------------------------------------------------------------------------
// Hand-computed oracles

void near(double got, double want, const std::string& what)
{
    require(std::abs(got - want) <= 1e-4, what + " = " + fmt(got) + ", expected " + fmt(want));
}

void hand_oracles()
{
    const Corpus one = Corpus::build({{"d", "", "a a b", {}}}, {false, true});
    const auto bg = BackgroundLM::from_probabilities({{"a", 0.5}, {"b", 0.5}}, 1e-6);
    const auto& d = one.at("d");
    near(smoothed_doc_prob("a", d, bg, 1.0), 0.625, "smoothed_doc_prob");

    LMScorerConfig cfg;
    cfg.mu = 1.0;
    cfg.lambda = 1.0;
    const auto q = build_lm({"a"});
    const auto u = build_lm({"b"});
    near(lm_score(q, nullptr, d, bg, cfg), 0.4700, "lm_score(lambda=1)");
    cfg.lambda = 0.5;
    near(lm_score(q, &u, d, bg, cfg), 0.7254, "lm_score(lambda=0.5)");

    std::vector<DocumentRecord> recs;
    for (int i = 0; i < 10; ++i) {
        recs.push_back({"d" + std::to_string(i), "", i < 2 ? "t x" : "x y", {}});
    }
    const Corpus ten = Corpus::build(recs, {false, true});
    std::vector<TermContribution> parts;
    bm25_score({"t"}, ten.at("d0"), ten.stats(), BM25Config{}, &parts);
    require(parts.size() == 1, "bm25 breakdown should have one term");
    near(parts[0].contribution, 1.4816, "bm25 contribution");
    near(parts[0].contribution, std::log(4.4), "bm25 contribution vs ln(4.4)");

    Judgments j;
    j.set("u", "q", "x", 1);
    j.set("u", "q", "y", 2);
    const RunList run{"u", "q", {{"x", 0, 1}, {"y", 0, 2}}};
    near(*ndcg_at_k(run, j, 10), 0.7967, "nDCG");

    const auto t = paired_t_test(std::vector<double>{1, 0, 2}, std::vector<double>{0, 0, 0});
    near(t.t, 1.7321, "t");
    near(t.p_one_sided, 0.1127, "p");
}

// ---------------------------------------------------------------------------
// nDCG against explicit enumeration of orderings

double brute_force_ndcg(const std::vector<int>& grades, std::size_t k)
{
    auto dcg = [k](const std::vector<int>& g) {
        double s = 0.0;
        for (std::size_t i = 0; i < std::min(k, g.size()); ++i) {
            s += (std::pow(2.0, g[i]) - 1.0) / std::log2(static_cast<double>(i + 2));
        }
        return s;
    };
    std::vector<std::size_t> order(grades.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    double ideal = 0.0;
    do {
        std::vector<int> g;
        for (auto i : order) {
            g.push_back(grades[i]);
        }
        ideal = std::max(ideal, dcg(g));
    } while (std::next_permutation(order.begin(), order.end()));
    return ideal == 0.0 ? 0.0 : dcg(grades) / ideal;
}

void ndcg_oracle()
{
    std::mt19937_64 gen(777);
    double worst = 0.0;
    for (int round = 0; round < 1000; ++round) {
        const std::size_t n = 1 + gen() % 8;
        const std::size_t k = 1 + gen() % 10;
        std::vector<int> grades(n);
        Judgments j;
        RunList run{"u", "q", {}};
        for (std::size_t i = 0; i < n; ++i) {
            grades[i] = static_cast<int>(gen() % 3);
            const auto id = "d" + std::to_string(i);
            j.set("u", "q", id, grades[i]);
            run.entries.push_back({id, 0.0, i + 1});
        }
        const double got = *ndcg_at_k(run, j, k);
        const double want = brute_force_ndcg(grades, k);
        worst = std::max(worst, std::abs(got - want));
        require(std::abs(got - want) <= 1e-9, "list " + std::to_string(round) + ": " + fmt(got) + " vs " + fmt(want));
    }
    std::cout << "  (1000 lists, max gap " << fmt(worst) << ")\n";
}

// ---------------------------------------------------------------------------
// Synthetic personalization experiment and ablation

struct SyntheticWorld {
    SyntheticFixture fx = make_synthetic_fixture();
    Corpus corpus = Corpus::build(fx.documents);
    BackgroundLM background = corpus_background(corpus);

    ExperimentInputs inputs() const
    {
        return {&corpus, &background, nullptr, &fx.pools, &fx.profiles, &fx.judgments};
    }
};

void synthetic_experiment()
{
    const auto start = Clock::now();
    SyntheticWorld w;
    require(w.fx.documents.size() == 200, "fixture should have 200 documents");
    require(w.fx.profiles.size() == 10, "fixture should have 10 users");
    const std::vector<MetricSpec> metric = {MetricSpec::parse("ndcg@5")};
    const auto pairs = evaluation_pairs(w.inputs());

    RankerSpec personalized;
    personalized.lm.lambda = 0.0;
    RankerSpec query_only;
    query_only.lm.lambda = 1.0;
    const auto a = run_cell(w.inputs(), personalized, ProfileVariant::Full, pairs, metric);
    const auto b = run_cell(w.inputs(), query_only, ProfileVariant::Full, pairs, metric);
    const auto t = compare_reports(a.report, b.report, 0);
    const double elapsed = seconds_since(start);
    std::cout << "  (nDCG@5 lambda=0 " << fmt(*a.report.averages[0]) << " vs lambda=1 " << fmt(*b.report.averages[0])
              << ", n=" << t.n << ", t=" << fmt(t.t) << ", p=" << fmt(t.p_one_sided) << ", " << fmt(elapsed)
              << " s)\n";
    require(*a.report.averages[0] - *b.report.averages[0] >= 0.05, "improvement below 0.05");
    require(t.p_one_sided < 0.01, "p-value not below 0.01");
    require(elapsed < 30.0, "took " + fmt(elapsed) + " s");
}

void ablation_table()
{
    SyntheticWorld w;
    const auto metrics = default_metrics();
    RankerSpec lm;
    const auto table = run_ablation(w.inputs(), {"lm", lm}, metrics);
    require(table.rows.size() == 3 && table.cells.size() == 3, "expected three rows");
    require(table.rows[0] == variant_name(ProfileVariant::Full) &&
                table.rows[1] == variant_name(ProfileVariant::NoBookFields) &&
                table.rows[2] == variant_name(ProfileVariant::DemographicsHobbiesOnly),
            "unexpected row labels");
    std::ostringstream tsv;
    write_table_tsv(tsv, table);
    std::istringstream lines(tsv.str());
    for (std::string line; std::getline(lines, line);) {
        std::cout << "  " << line << '\n';
    }
    for (std::size_t m = 0; m < metrics.size(); ++m) {
        const double nobook = *table.cells[1].report.averages[m];
        const double demo = *table.cells[2].report.averages[m];
        require(nobook >= demo, metrics[m].name() + ": no-book-fields " + fmt(nobook) + " < demographics-hobbies " +
                                    fmt(demo));
    }
}

// ---------------------------------------------------------------------------
// End-to-end determinism through the command-line tool

std::map<std::string, std::string> pipeline(const std::filesystem::path& dir)
{
    auto f = [&](const std::string& name) { return (dir / name).string(); };
    std::map<std::string, std::string> stdout_of;
    auto pse = [&](const std::string& label, std::vector<std::string> args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        require(code == 0, label + " exited " + std::to_string(code) + ": " + err.str());
        stdout_of[label] = out.str();
    };
    const std::vector<std::string> in = {"--index", f("index.json"), "--pools", f("pools.jsonl"), "--profiles",
                                         f("profiles.jsonl"), "--entities", f("entities.jsonl"), "--qrels",
                                         f("qrels.txt")};
    auto with_inputs = [&](std::vector<std::string> head, std::vector<std::string> tail) {
        head.insert(head.end(), in.begin(), in.end());
        head.insert(head.end(), tail.begin(), tail.end());
        return head;
    };
    pse("synth", {"synth", "--out-dir", dir.string(), "--seed", "42"});
    pse("index", {"index", "--docs", f("docs.jsonl"), "--out", f("index.json")});
    pse("background", {"background", "--index", f("index.json"), "--out", f("background.tsv")});
    pse("sample", {"sample", "--pools", f("pools.jsonl"), "--n", "10", "--out", f("sampled.jsonl")});
    pse("rerank-lm", with_inputs({"rerank"}, {"--out", f("lm.run")}));
    pse("rerank-query", with_inputs({"rerank"}, {"--variant", "query", "--out", f("query.run")}));
    pse("rerank-bm25", with_inputs({"rerank"}, {"--ranker", "bm25", "--out", f("bm25.run")}));
    pse("eval", {"eval", "--run", f("lm.run"), "--qrels", f("qrels.txt"), "--out", f("lm.report.json")});
    pse("compare", {"compare", "--run-a", f("lm.run"), "--run-b", f("query.run"), "--qrels", f("qrels.txt"), "--out",
                    f("compare.json")});
    pse("ablate", with_inputs({"ablate"}, {"--out", f("ablation.json")}));
    pse("experiment", with_inputs({"experiment"}, {"--out", f("experiment.json")}));

    std::map<std::string, std::string> artifacts;
    for (const char* name : {"index.json", "background.tsv", "sampled.jsonl", "lm.run", "query.run", "bm25.run",
                             "lm.report.json", "compare.json", "ablation.json", "experiment.json"}) {
        artifacts[name] = testing::read_file(f(name));
        require(!artifacts[name].empty(), std::string(name) + " is empty");
    }
    for (const char* label : {"eval", "compare", "ablate", "experiment"}) {
        artifacts[std::string("stdout:") + label] = stdout_of[label];
    }
    return artifacts;
}

void end_to_end_determinism()
{
    testing::TempDir one, two;
    const auto a = pipeline(one.path());
    const auto b = pipeline(two.path());
    for (const auto& [name, content] : a) {
        require(b.at(name) == content, name + " differs between runs");
    }
    std::cout << "  (" << a.size() << " artifacts compared)\n";
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<void()>>> checks = {
        {"reduction suite: identity translation and lambda=1 query likelihood", reduction_suite},
        {"hand-computed oracles", hand_oracles},
        {"nDCG matches brute-force ideal enumeration", ndcg_oracle},
        {"synthetic personalization experiment", synthetic_experiment},
        {"ablation table", ablation_table},
        {"end-to-end determinism", end_to_end_determinism},
    };
    int failed = 0;
    for (const auto& [name, check] : checks) {
        try {
            check();
            std::cout << "PASS " << name << '\n';
        } catch (const std::exception& e) {
            ++failed;
            std::cout << "FAIL " << name << ": " << e.what() << '\n';
        }
    }
    std::cout << (checks.size() - static_cast<std::size_t>(failed)) << '/' << checks.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
