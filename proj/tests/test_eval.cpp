#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pse/error.hpp"
#include "pse/eval.hpp"

namespace pse {
namespace {

// A run whose documents are d0..d(n-1) in order, judged with `grades`
// (negative = unjudged).
struct Graded {
    RunList run;
    Judgments judgments;
};

Graded graded(const std::vector<int>& grades)
{
    Graded g;
    g.run = {"u", "q", {}};
    for (std::size_t i = 0; i < grades.size(); ++i) {
        const auto id = "d" + std::to_string(i);
        g.run.entries.push_back({id, 0.0, i + 1});
        if (grades[i] >= 0) {
            g.judgments.set("u", "q", id, grades[i]);
        }
    }
    return g;
}

TEST(Condense, DropsUnjudgedAndRenumbers)
{
    auto g = graded({-1, 2});
    const auto c = condense(g.run, g.judgments);
    ASSERT_EQ(c.entries.size(), 1u);
    EXPECT_EQ(c.entries[0].doc_id, "d1");
    EXPECT_EQ(c.entries[0].rank, 1u);
}

TEST(Condense, AllJudgedIsIdentity)
{
    auto g = graded({0, 1, 2});
    const auto c = condense(g.run, g.judgments);
    ASSERT_EQ(c.entries.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(c.entries[i].doc_id, g.run.entries[i].doc_id);
        EXPECT_EQ(c.entries[i].rank, g.run.entries[i].rank);
    }
}

TEST(Condense, NoneJudgedIsEmpty)
{
    auto g = graded({-1, -1});
    g.judgments.set("u", "q", "elsewhere", 1);
    EXPECT_TRUE(condense(g.run, g.judgments).entries.empty());
}

TEST(Condense, Idempotent)
{
    auto g = graded({-1, 2, -1, 0, 1, -1});
    const auto once = condense(g.run, g.judgments);
    const auto twice = condense(once, g.judgments);
    ASSERT_EQ(once.entries.size(), twice.entries.size());
    for (std::size_t i = 0; i < once.entries.size(); ++i) {
        EXPECT_EQ(once.entries[i].doc_id, twice.entries[i].doc_id);
        EXPECT_EQ(once.entries[i].rank, twice.entries[i].rank);
    }
}

TEST(NDCG, SingleRelevantDocument)
{
    auto g = graded({2});
    EXPECT_DOUBLE_EQ(*ndcg_at_k(g.run, g.judgments, 5), 1.0);
}

TEST(NDCG, OracleValue)
{
    auto g = graded({1, 2});
    const double expected = (1.0 + 3.0 / std::log2(3.0)) / (3.0 + 1.0 / std::log2(3.0));
    EXPECT_NEAR(*ndcg_at_k(g.run, g.judgments, 5), expected, 1e-12);
    EXPECT_NEAR(*ndcg_at_k(g.run, g.judgments, 5), 0.7967, 1e-4);
}

TEST(NDCG, AllZeroGradesScoreZero)
{
    auto g = graded({0, 0, 0});
    EXPECT_EQ(*ndcg_at_k(g.run, g.judgments, 5), 0.0);
}

TEST(NDCG, EmptyListIsUndefined)
{
    auto g = graded({});
    EXPECT_FALSE(ndcg_at_k(g.run, g.judgments, 5));
    EXPECT_FALSE(precision_at_1(g.run, g.judgments));
}

TEST(NDCG, CutoffTruncatesBothSides)
{
    auto g = graded({0, 0, 2});
    EXPECT_EQ(*ndcg_at_k(g.run, g.judgments, 2), 0.0);
    EXPECT_NEAR(*ndcg_at_k(g.run, g.judgments, 3), 0.5, 1e-12);
}

TEST(NDCG, RequiresCondensedInput)
{
    auto g = graded({-1, 2});
    EXPECT_THROW(ndcg_at_k(g.run, g.judgments, 5), Error);
}

TEST(NDCG, DescendingOrderIsTheUniqueMaximum)
{
    std::mt19937 gen(5);
    for (int round = 0; round < 200; ++round) {
        const int n = 1 + static_cast<int>(gen() % 6);
        std::vector<int> grades(static_cast<std::size_t>(n));
        for (auto& x : grades) {
            x = static_cast<int>(gen() % 3);
        }
        if (std::all_of(grades.begin(), grades.end(), [](int x) { return x == 0; })) {
            grades[0] = 1;
        }
        std::sort(grades.begin(), grades.end());
        double best = -1.0;
        do {
            auto g = graded(grades);
            for (std::size_t k : {1u, 3u, 20u}) {
                const double v = *ndcg_at_k(g.run, g.judgments, k);
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0 + 1e-12);
            }
            best = std::max(best, *ndcg_at_k(g.run, g.judgments, 20));
        } while (std::next_permutation(grades.begin(), grades.end()));
        EXPECT_NEAR(best, 1.0, 1e-12);
        std::sort(grades.rbegin(), grades.rend());
        auto g = graded(grades);
        EXPECT_NEAR(*ndcg_at_k(g.run, g.judgments, 20), 1.0, 1e-12);
    }
}

TEST(PrecisionAt1, BinarizesGrades)
{
    for (auto [grade, expected] : std::vector<std::pair<int, double>>{{1, 1.0}, {0, 0.0}, {2, 1.0}}) {
        auto g = graded({grade, 2});
        EXPECT_EQ(*precision_at_1(g.run, g.judgments), expected);
    }
}

TEST(TTest, IdenticalSamplesAreDegenerate)
{
    const std::vector<double> a = {0.1, 0.5, 0.9};
    const auto r = paired_t_test(a, a);
    EXPECT_EQ(r.t, 0.0);
    EXPECT_EQ(r.p_one_sided, 0.5);
    EXPECT_TRUE(r.degenerate);
}

TEST(TTest, OracleValue)
{
    const std::vector<double> a = {1.0, 0.0, 2.0};
    const std::vector<double> b = {0.0, 0.0, 0.0};
    const auto r = paired_t_test(a, b);
    EXPECT_NEAR(r.t, std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(r.t, 1.7321, 1e-4);
    EXPECT_NEAR(r.p_one_sided, 0.1127, 1e-4);
    EXPECT_FALSE(r.degenerate);
    EXPECT_EQ(r.n, 3u);
    EXPECT_DOUBLE_EQ(r.mean_diff, 1.0);
}

TEST(TTest, SwappingNegatesAndComplements)
{
    std::mt19937 gen(8);
    std::uniform_real_distribution<double> u(0, 1);
    for (int round = 0; round < 50; ++round) {
        std::vector<double> a(6), b(6);
        for (std::size_t i = 0; i < 6; ++i) {
            a[i] = u(gen);
            b[i] = u(gen);
        }
        const auto ab = paired_t_test(a, b);
        const auto ba = paired_t_test(b, a);
        EXPECT_NEAR(ab.t, -ba.t, 1e-12);
        EXPECT_NEAR(ab.p_one_sided, 1.0 - ba.p_one_sided, 1e-12);
    }
}

TEST(TTest, MatchesClosedFormForTwoDegreesOfFreedom)
{
    std::mt19937 gen(13);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int round = 0; round < 500; ++round) {
        std::vector<double> a(3), b(3, 0.0);
        for (auto& x : a) {
            x = u(gen);
        }
        const auto r = paired_t_test(a, b);
        const double t = r.t;
        const double cdf = 0.5 + t / (2.0 * std::sqrt(2.0) * std::sqrt(1.0 + t * t / 2.0));
        EXPECT_NEAR(r.p_one_sided, 1.0 - cdf, 1e-6);
    }
}

TEST(TTest, ConstantPositiveDifferences)
{
    const auto r = paired_t_test(std::vector<double>{2, 3}, std::vector<double>{1, 2});
    EXPECT_TRUE(std::isinf(r.t));
    EXPECT_GT(r.t, 0);
    EXPECT_EQ(r.p_one_sided, 0.0);
    EXPECT_TRUE(r.degenerate);
    const auto s = paired_t_test(std::vector<double>{1, 2}, std::vector<double>{2, 3});
    EXPECT_LT(s.t, 0);
    EXPECT_EQ(s.p_one_sided, 1.0);
}

TEST(TTest, Preconditions)
{
    EXPECT_THROW(paired_t_test(std::vector<double>{1}, std::vector<double>{1}), Error);
    EXPECT_THROW(paired_t_test(std::vector<double>{1, 2}, std::vector<double>{1}), Error);
}

TEST(Qrels, ParseAndWrite)
{
    std::istringstream in("u1:q1 0 d1 2\nu1:q1 0 d2 0\n\nu2:q1 0 d1 1\n");
    const auto j = read_qrels(in, "qrels");
    EXPECT_EQ(j.size(), 3u);
    EXPECT_EQ(j.grade("u1", "q1", "d1"), 2);
    EXPECT_FALSE(j.grade("u1", "q1", "d9"));
    EXPECT_EQ(j.pairs().size(), 2u);
    std::ostringstream out;
    write_qrels(out, j);
    EXPECT_EQ(out.str(), "u1:q1 0 d1 2\nu1:q1 0 d2 0\nu2:q1 0 d1 1\n");
}

TEST(Qrels, Errors)
{
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return read_qrels(in, "qrels");
    };
    EXPECT_THROW(parse("u1:q1 0 d1 3\n"), Error);
    EXPECT_THROW(parse("u1:q1 0 d1\n"), Error);
    EXPECT_THROW(parse("u1q1 0 d1 1\n"), Error);
    try {
        parse("u1:q1 0 d1 1\nu1:q1 0 d2 -1\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("qrels:2"), std::string::npos);
    }
    Judgments j;
    EXPECT_THROW(j.set("u", "q", "d", 5), Error);
}

TEST(Metrics, Names)
{
    EXPECT_EQ(MetricSpec::parse("ndcg@20").name(), "ndcg@20");
    EXPECT_EQ(MetricSpec::parse("p@1").kind, MetricSpec::Kind::P1);
    EXPECT_THROW(MetricSpec::parse("map"), Error);
    EXPECT_THROW(MetricSpec::parse("ndcg@0"), Error);
    const auto d = default_metrics();
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d[0].name(), "ndcg@20");
    EXPECT_EQ(d[1].name(), "ndcg@5");
    EXPECT_EQ(d[2].name(), "p@1");
}

TEST(Report, MacroAverageOverDefinedPairs)
{
    Judgments j;
    // Pair A: relevant doc at rank 1 of 2 -> ndcg 1. Pair B: only grade 0 -> 0.
    j.set("a", "q", "x", 2);
    j.set("a", "q", "y", 0);
    j.set("b", "q", "x", 0);
    j.set("c", "q", "z", 1);
    std::vector<RunList> runs = {{"a", "q", {{"x", 0, 1}, {"y", 0, 2}}},
                                 {"b", "q", {{"x", 0, 1}}},
                                 {"c", "q", {{"unjudged", 0, 1}}},
                                 {"nobody", "q", {{"x", 0, 1}}}};
    const std::vector<MetricSpec> metrics = {MetricSpec::parse("ndcg@5"), MetricSpec::parse("p@1")};
    const auto r = evaluate_runs(runs, j, metrics);
    EXPECT_EQ(r.skipped, 1u);
    ASSERT_EQ(r.pairs.size(), 3u);
    EXPECT_FALSE(r.pairs[2].values[0]);
    EXPECT_DOUBLE_EQ(*r.averages[0], 0.5);
    EXPECT_DOUBLE_EQ(*r.averages[1], 0.5);

    std::ostringstream tsv;
    write_report_tsv(tsv, r);
    EXPECT_EQ(tsv.str(),
              "user_id\tquery_id\tndcg@5\tp@1\n"
              "a\tq\t1.0000\t1.0000\n"
              "b\tq\t0.0000\t0.0000\n"
              "c\tq\t-\t-\n"
              "all\t-\t0.5000\t0.5000\n");
}

TEST(Report, AveragesLieBetweenExtremes)
{
    std::mt19937 gen(21);
    Judgments j;
    std::vector<RunList> runs;
    for (int u = 0; u < 15; ++u) {
        RunList run{"u" + std::to_string(u), "q", {}};
        for (int d = 0; d < 8; ++d) {
            const auto id = "d" + std::to_string(d);
            run.entries.push_back({id, 0.0, static_cast<std::size_t>(d + 1)});
            if (gen() % 3 != 0) {
                j.set(run.user_id, "q", id, static_cast<int>(gen() % 3));
            }
        }
        std::shuffle(run.entries.begin(), run.entries.end(), gen);
        runs.push_back(run);
    }
    const auto metrics = default_metrics();
    const auto r = evaluate_runs(runs, j, metrics);
    for (std::size_t m = 0; m < metrics.size(); ++m) {
        double lo = 2, hi = -1;
        for (const auto& p : r.pairs) {
            if (p.values[m]) {
                lo = std::min(lo, *p.values[m]);
                hi = std::max(hi, *p.values[m]);
            }
        }
        ASSERT_TRUE(r.averages[m]);
        EXPECT_GE(*r.averages[m], lo - 1e-12);
        EXPECT_LE(*r.averages[m], hi + 1e-12);
    }
}

TEST(Report, CompareUsesCommonPairs)
{
    MetricReport a, b;
    a.metrics = b.metrics = {"ndcg@5"};
    a.pairs = {{"u1", "q", {0.9}}, {"u2", "q", {0.8}}, {"u3", "q", {0.7}}, {"u4", "q", {0.1}}};
    b.pairs = {{"u1", "q", {0.5}}, {"u2", "q", {0.6}}, {"u3", "q", {0.4}}, {"u5", "q", {0.1}}};
    const auto r = compare_reports(a, b, 0);
    EXPECT_EQ(r.n, 3u);
    EXPECT_NEAR(r.mean_diff, (0.4 + 0.2 + 0.3) / 3.0, 1e-12);
}

}  // namespace
}  // namespace pse
