#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pse/rankers.hpp"

namespace pse {

/// (user_id, query_id)
using PairKey = std::pair<std::string, std::string>;

/// Graded interestingness labels: 0 not interesting, 1 interesting,
/// 2 very interesting. "Don't know" judgments are simply absent.
class Judgments {
  public:
    /// Throws pse::Error for grades outside {0,1,2}.
    void set(const std::string& user_id, const std::string& query_id, const std::string& doc_id, int grade);

    std::optional<int> grade(const std::string& user_id, const std::string& query_id, const std::string& doc_id) const;

    /// Labels for one pair, or nullptr.
    const std::map<std::string, int>* pair(const PairKey& key) const;

    /// Every judged pair, sorted.
    std::vector<PairKey> pairs() const;
    std::size_t size() const noexcept;

  private:
    std::map<PairKey, std::map<std::string, int>> labels_;
};

/// Qrels lines: `<user_id>:<query_id> 0 <doc_id> <grade>`.
Judgments read_qrels(std::istream& in, const std::string& source = "<stream>");
Judgments load_qrels(const std::string& path);
void write_qrels(std::ostream& out, const Judgments& judgments);

/// Drops unjudged entries, keeps relative order and renumbers ranks 1..m.
RunList condense(const RunList& run, const Judgments& judgments);

/// nDCG@k with gain 2^g - 1 and discount log2(i + 1) over a condensed list.
/// 0 when the ideal DCG is 0; std::nullopt for an empty list.
std::optional<double> ndcg_at_k(const RunList& condensed, const Judgments& judgments, std::size_t k);

/// 1 when the top document has grade >= 1, else 0; std::nullopt for an empty list.
std::optional<double> precision_at_1(const RunList& condensed, const Judgments& judgments);

struct TTestResult {
    double t = 0.0;
    /// Upper-tail p-value for H1: mean(a - b) > 0.
    double p_one_sided = 0.5;
    std::size_t n = 0;
    double mean_diff = 0.0;
    /// Set when the differences have zero variance.
    bool degenerate = false;
};

/// Paired t-test on d = a - b with the sample standard deviation and n - 1
/// degrees of freedom. Throws pse::Error if the sizes differ or n < 2.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// A metric name such as "ndcg@20", "ndcg@5" or "p@1".
struct MetricSpec {
    enum class Kind { NDCG, P1 } kind = Kind::NDCG;
    std::size_t k = 0;

    std::string name() const;
    static MetricSpec parse(const std::string& name);
};

/// The three metrics reported throughout: nDCG@20, nDCG@5 and P@1.
std::vector<MetricSpec> default_metrics();

std::optional<double> compute_metric(const MetricSpec& metric, const RunList& condensed, const Judgments& judgments);

struct PairMetrics {
    std::string user_id;
    std::string query_id;
    std::vector<std::optional<double>> values;  // parallel to MetricReport::metrics
};

struct MetricReport {
    std::vector<std::string> metrics;
    std::vector<PairMetrics> pairs;                  // sorted by (user, query)
    std::vector<std::optional<double>> averages;     // macro-average over defined values
    std::size_t skipped = 0;                         // runs without any judgments

    /// Values of metric `m` keyed by pair, undefined entries omitted.
    std::map<PairKey, double> by_pair(std::size_t m) const;
};

/// Condenses every run against `judgments` and computes the metrics. Runs
/// whose pair has no judgments at all are skipped and counted.
MetricReport evaluate_runs(std::span<const RunList> runs, const Judgments& judgments,
                           std::span<const MetricSpec> metrics);

/// Pairs the per-pair values of metric `m` present in both reports and tests
/// candidate against baseline.
TTestResult compare_reports(const MetricReport& candidate, const MetricReport& baseline, std::size_t m);

/// Tab-separated summary: a header, one line per pair and an average line.
void write_report_tsv(std::ostream& out, const MetricReport& report);

/// Machine-readable report with per-pair values and averages.
std::string report_json(const MetricReport& report);

}  // namespace pse
