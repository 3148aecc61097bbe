#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "cli.hpp"
#include "pse/eval.hpp"
#include "pse/synthetic.hpp"
#include "pse/text.hpp"
#include "test_support.hpp"

namespace pse {
namespace {

using testing::read_file;
using testing::write_file;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome pse_cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

struct CliTest : ::testing::Test {
    testing::TempDir dir;

    void SetUp() override
    {
        SyntheticOptions o;
        o.num_docs = 50;
        o.num_users = 4;
        o.num_queries = 2;
        o.pool_size = 20;
        o.judged_per_pool = 8;
        write_synthetic_fixture(make_synthetic_fixture(o), dir.path());
        const auto r = pse_cli({"index", "--docs", f("docs.jsonl"), "--out", f("index.json")});
        ASSERT_EQ(r.code, 0) << r.err;
    }

    std::string f(const std::string& name) const { return dir.file(name); }

    std::vector<std::string> inputs() const
    {
        return {"--index", f("index.json"), "--pools", f("pools.jsonl"), "--profiles", f("profiles.jsonl"),
                "--entities", f("entities.jsonl")};
    }

    Outcome rerank(const std::string& out, std::vector<std::string> extra)
    {
        std::vector<std::string> args = {"rerank"};
        for (const auto& a : inputs()) {
            args.push_back(a);
        }
        args.insert(args.end(), {"--qrels", f("qrels.txt"), "--out", f(out), "--tag", "t"});
        args.insert(args.end(), extra.begin(), extra.end());
        return pse_cli(args);
    }
};

TEST_F(CliTest, HelpForEveryCommand)
{
    for (const char* cmd : {"index", "background", "rerank", "eval", "compare", "sample", "ablate", "experiment",
                            "serve", "synth"}) {
        const auto r = pse_cli({cmd, "--help"});
        EXPECT_EQ(r.code, 0) << cmd;
        EXPECT_NE(r.out.find("--"), std::string::npos) << cmd;
    }
    EXPECT_EQ(pse_cli({"--help"}).code, 0);
    EXPECT_EQ(pse_cli({"--version"}).code, 0);
}

TEST_F(CliTest, UsageErrorsExitOne)
{
    auto r = pse_cli({"rerank", "--bogus"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(lines(r.err), 1u);
    EXPECT_EQ(r.err.rfind("pse: ", 0), 0u);
    EXPECT_EQ(pse_cli({"index", "--docs", f("docs.jsonl")}).code, 1);
    EXPECT_EQ(pse_cli({}).code, 1);
    EXPECT_EQ(pse_cli({"frobnicate"}).code, 1);
    EXPECT_EQ(rerank("x.run", {"--lambda", "1.5"}).code, 1);
    EXPECT_EQ(rerank("x.run", {"--ranker", "tfidf"}).code, 1);
    EXPECT_EQ(rerank("x.run", {"--variant", "everything"}).code, 1);
    EXPECT_EQ(rerank("x.run", {"--mu", "lots"}).code, 1);
    EXPECT_EQ(rerank("x.run", {"--ranker", "lm-wv"}).code, 1);
}

TEST_F(CliTest, DataErrorsExitTwo)
{
    auto r = pse_cli({"index", "--docs", f("missing.jsonl"), "--out", f("i.json")});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(lines(r.err), 1u);
    EXPECT_NE(r.err.find("missing.jsonl"), std::string::npos);

    write_file(f("bad.jsonl"), "{\"doc_id\": \"a\", \"title\": \"x\"}\n{not json\n");
    r = pse_cli({"index", "--docs", f("bad.jsonl"), "--out", f("i.json")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("bad.jsonl:2"), std::string::npos);
    EXPECT_EQ(lines(r.err), 1u);
}

TEST_F(CliTest, PerfectRunScoresOne)
{
    // A run listing each pair's judged documents best first.
    std::istringstream qrels(read_file(f("qrels.txt")));
    const auto j = read_qrels(qrels);
    std::string run;
    for (const auto& key : j.pairs()) {
        std::vector<std::pair<int, std::string>> docs;
        for (const auto& [doc, grade] : *j.pair(key)) {
            docs.emplace_back(-grade, doc);
        }
        std::sort(docs.begin(), docs.end());
        for (std::size_t i = 0; i < docs.size(); ++i) {
            run += key.first + ":" + key.second + " Q0 " + docs[i].second + " " + std::to_string(i + 1) + " " +
                   std::to_string(100 - static_cast<int>(i)) + " ideal\n";
        }
    }
    write_file(f("ideal.run"), run);
    const auto r = pse_cli({"eval", "--run", f("ideal.run"), "--qrels", f("qrels.txt"), "--metrics", "ndcg@20,ndcg@5",
                            "--out", f("report.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    // Pairs where every judged document is grade 0 score 0 by definition, so only check that none falls below.
    std::istringstream rows(r.out);
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) {
        const auto user = line.substr(0, line.find('\t'));
        if (user == "all") {
            break;
        }
        bool any_relevant = false;
        const auto q = line.substr(line.find('\t') + 1, line.find('\t', line.find('\t') + 1) - line.find('\t') - 1);
        for (const auto& [doc, grade] : *j.pair({user, q})) {
            any_relevant = any_relevant || grade > 0;
        }
        const std::string expected = any_relevant ? "1.0000\t1.0000" : "0.0000\t0.0000";
        EXPECT_NE(line.find(expected), std::string::npos) << line;
    }
    EXPECT_FALSE(read_file(f("report.json")).empty());
}

TEST_F(CliTest, CompareWithItselfIsDegenerate)
{
    ASSERT_EQ(rerank("a.run", {}).code, 0);
    const auto r = pse_cli({"compare", "--run-a", f("a.run"), "--run-b", f("a.run"), "--qrels", f("qrels.txt"),
                            "--metric", "ndcg@5"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream rows(r.out);
    std::string header, values;
    std::getline(rows, header);
    std::getline(rows, values);
    EXPECT_EQ(header, "metric\tn\tmean_diff\tt\tp_one_sided\tdegenerate");
    EXPECT_EQ(values, "ndcg@5\t8\t0.000000\t0.000000\t0.500000\tyes");
}

TEST_F(CliTest, RerankIsDeterministic)
{
    ASSERT_EQ(rerank("one.run", {"--variant", "query"}).code, 0);
    ASSERT_EQ(rerank("two.run", {"--variant", "query"}).code, 0);
    const auto one = read_file(f("one.run"));
    EXPECT_FALSE(one.empty());
    EXPECT_EQ(one, read_file(f("two.run")));
}

TEST_F(CliTest, FlagsOverrideConfigFile)
{
    write_file(f("lambda1.json"), R"({"lambda": 1.0})");
    ASSERT_EQ(rerank("query.run", {"--variant", "query"}).code, 0);
    ASSERT_EQ(rerank("full.run", {}).code, 0);
    ASSERT_EQ(rerank("cfg.run", {"--config", f("lambda1.json")}).code, 0);
    ASSERT_EQ(rerank("flag.run", {"--config", f("lambda1.json"), "--lambda", "0"}).code, 0);
    EXPECT_EQ(read_file(f("cfg.run")), read_file(f("query.run")));
    EXPECT_EQ(read_file(f("flag.run")), read_file(f("full.run")));
    EXPECT_NE(read_file(f("full.run")), read_file(f("query.run")));

    write_file(f("typo.json"), R"({"lamda": 1.0})");
    EXPECT_EQ(rerank("x.run", {"--config", f("typo.json")}).code, 1);
}

TEST_F(CliTest, SampleAndBackground)
{
    auto r = pse_cli({"sample", "--pools", f("pools.jsonl"), "--n", "5", "--out", f("s1.jsonl"), "--seed", "9"});
    ASSERT_EQ(r.code, 0) << r.err;
    ASSERT_EQ(pse_cli({"sample", "--pools", f("pools.jsonl"), "--n", "5", "--out", f("s2.jsonl"), "--seed", "9"}).code,
              0);
    EXPECT_EQ(read_file(f("s1.jsonl")), read_file(f("s2.jsonl")));
    const auto pools = load_pools(f("s1.jsonl"));
    for (const auto& p : pools) {
        ASSERT_TRUE(p.sampled_ids);
        EXPECT_EQ(p.sampled_ids->size(), 5u);
    }
    r = pse_cli({"background", "--index", f("index.json"), "--out", f("bg.tsv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NO_THROW(load_background(f("bg.tsv")));
}

TEST_F(CliTest, AblationAndExperimentTables)
{
    std::vector<std::string> args = {"ablate"};
    for (const auto& a : inputs()) {
        args.push_back(a);
    }
    args.insert(args.end(), {"--qrels", f("qrels.txt")});
    auto r = pse_cli(args);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out), 4u);
    args[0] = "experiment";
    r = pse_cli(args);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out), 1u + 2u * 3u);
}

}  // namespace
}  // namespace pse
