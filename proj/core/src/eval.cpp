#include "pse/eval.hpp"

#include <algorithm>
#include <functional>
#include <tuple>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "codec.hpp"
#include "pse/error.hpp"

namespace pse {
namespace {

std::string format_value(const std::optional<double>& v)
{
    if (!v) {
        return "-";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

}  // namespace

void Judgments::set(const std::string& user_id, const std::string& query_id, const std::string& doc_id, int grade)
{
    if (grade < 0 || grade > 2) {
        throw Error("grade for (" + user_id + ", " + query_id + ", " + doc_id + ") must be 0, 1 or 2");
    }
    labels_[{user_id, query_id}][doc_id] = grade;
}

std::optional<int> Judgments::grade(const std::string& user_id, const std::string& query_id,
                                    const std::string& doc_id) const
{
    auto it = labels_.find({user_id, query_id});
    if (it == labels_.end()) {
        return std::nullopt;
    }
    auto jt = it->second.find(doc_id);
    if (jt == it->second.end()) {
        return std::nullopt;
    }
    return jt->second;
}

const std::map<std::string, int>* Judgments::pair(const PairKey& key) const
{
    auto it = labels_.find(key);
    return it == labels_.end() ? nullptr : &it->second;
}

std::vector<PairKey> Judgments::pairs() const
{
    std::vector<PairKey> out;
    out.reserve(labels_.size());
    for (const auto& [key, docs] : labels_) {
        out.push_back(key);
    }
    return out;
}

std::size_t Judgments::size() const noexcept
{
    std::size_t n = 0;
    for (const auto& [key, docs] : labels_) {
        n += docs.size();
    }
    return n;
}

Judgments read_qrels(std::istream& in, const std::string& source)
{
    Judgments j;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string topic, iter, doc, grade_text, extra;
        if (!(fields >> topic)) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(line_no);
        if (!(fields >> iter >> doc >> grade_text) || (fields >> extra)) {
            throw Error(where + ": expected '<user>:<query> 0 <doc_id> <grade>'");
        }
        auto colon = topic.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == topic.size()) {
            throw Error(where + ": topic '" + topic + "' is not of the form <user>:<query>");
        }
        if (grade_text != "0" && grade_text != "1" && grade_text != "2") {
            throw Error(where + ": grade must be 0, 1 or 2, got '" + grade_text + "'");
        }
        j.set(topic.substr(0, colon), topic.substr(colon + 1), doc, grade_text[0] - '0');
    }
    return j;
}

Judgments load_qrels(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open qrels file '" + path + "'");
    }
    return read_qrels(in, path);
}

void write_qrels(std::ostream& out, const Judgments& judgments)
{
    for (const auto& key : judgments.pairs()) {
        for (const auto& [doc, grade] : *judgments.pair(key)) {
            out << key.first << ':' << key.second << " 0 " << doc << ' ' << grade << '\n';
        }
    }
}

RunList condense(const RunList& run, const Judgments& judgments)
{
    RunList out{run.user_id, run.query_id, {}};
    const auto* labels = judgments.pair({run.user_id, run.query_id});
    if (labels == nullptr) {
        return out;
    }
    for (const auto& e : run.entries) {
        if (labels->contains(e.doc_id)) {
            out.entries.push_back({e.doc_id, e.score, out.entries.size() + 1});
        }
    }
    return out;
}

std::optional<double> ndcg_at_k(const RunList& condensed, const Judgments& judgments, std::size_t k)
{
    if (condensed.entries.empty()) {
        return std::nullopt;
    }
    std::vector<int> grades;
    grades.reserve(condensed.entries.size());
    for (const auto& e : condensed.entries) {
        auto g = judgments.grade(condensed.user_id, condensed.query_id, e.doc_id);
        if (!g) {
            throw Error("ndcg_at_k expects a condensed list; '" + e.doc_id + "' is unjudged");
        }
        grades.push_back(*g);
    }
    auto dcg = [k](const std::vector<int>& gs) {
        double s = 0.0;
        const std::size_t n = std::min(k, gs.size());
        for (std::size_t i = 0; i < n; ++i) {
            s += (std::exp2(gs[i]) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
        }
        return s;
    };
    const double actual = dcg(grades);
    std::sort(grades.begin(), grades.end(), std::greater<>());
    const double ideal = dcg(grades);
    if (ideal == 0.0) {
        return 0.0;
    }
    return actual / ideal;
}

std::optional<double> precision_at_1(const RunList& condensed, const Judgments& judgments)
{
    if (condensed.entries.empty()) {
        return std::nullopt;
    }
    auto g = judgments.grade(condensed.user_id, condensed.query_id, condensed.entries.front().doc_id);
    if (!g) {
        throw Error("precision_at_1 expects a condensed list");
    }
    return *g >= 1 ? 1.0 : 0.0;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw Error("paired t-test needs samples of equal size");
    }
    if (a.size() < 2) {
        throw Error("paired t-test needs at least two pairs");
    }
    const std::size_t n = a.size();
    std::vector<double> d(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = a[i] - b[i];
        mean += d[i];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : d) {
        ss += (x - mean) * (x - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    TTestResult r;
    r.n = n;
    r.mean_diff = mean;
    if (sd == 0.0) {
        r.degenerate = true;
        if (mean > 0.0) {
            r.t = std::numeric_limits<double>::infinity();
            r.p_one_sided = 0.0;
        } else if (mean < 0.0) {
            r.t = -std::numeric_limits<double>::infinity();
            r.p_one_sided = 1.0;
        } else {
            r.t = 0.0;
            r.p_one_sided = 0.5;
        }
        return r;
    }
    r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    const double df = static_cast<double>(n - 1);
    // P(T > |t|) = I_{df/(df+t^2)}(df/2, 1/2) / 2
    const double tail = 0.5 * boost::math::ibeta(df / 2.0, 0.5, df / (df + r.t * r.t));
    r.p_one_sided = r.t >= 0.0 ? tail : 1.0 - tail;
    return r;
}

std::string MetricSpec::name() const
{
    return kind == Kind::P1 ? "p@1" : "ndcg@" + std::to_string(k);
}

MetricSpec MetricSpec::parse(const std::string& name)
{
    if (name == "p@1" || name == "P@1") {
        return {Kind::P1, 1};
    }
    const std::string prefix = "ndcg@";
    if (name.rfind(prefix, 0) == 0 && name.size() > prefix.size()) {
        const auto digits = name.substr(prefix.size());
        if (digits.find_first_not_of("0123456789") == std::string::npos) {
            const auto k = std::stoul(digits);
            if (k > 0) {
                return {Kind::NDCG, k};
            }
        }
    }
    throw Error("unknown metric '" + name + "' (expected ndcg@<k> or p@1)");
}

std::vector<MetricSpec> default_metrics()
{
    return {{MetricSpec::Kind::NDCG, 20}, {MetricSpec::Kind::NDCG, 5}, {MetricSpec::Kind::P1, 1}};
}

std::optional<double> compute_metric(const MetricSpec& metric, const RunList& condensed, const Judgments& judgments)
{
    return metric.kind == MetricSpec::Kind::P1 ? precision_at_1(condensed, judgments)
                                               : ndcg_at_k(condensed, judgments, metric.k);
}

std::map<PairKey, double> MetricReport::by_pair(std::size_t m) const
{
    std::map<PairKey, double> out;
    for (const auto& p : pairs) {
        if (p.values.at(m)) {
            out.emplace(PairKey{p.user_id, p.query_id}, *p.values[m]);
        }
    }
    return out;
}

MetricReport evaluate_runs(std::span<const RunList> runs, const Judgments& judgments,
                           std::span<const MetricSpec> metrics)
{
    MetricReport report;
    for (const auto& m : metrics) {
        report.metrics.push_back(m.name());
    }
    for (const auto& run : runs) {
        if (judgments.pair({run.user_id, run.query_id}) == nullptr) {
            ++report.skipped;
            continue;
        }
        const auto condensed = condense(run, judgments);
        PairMetrics pm{run.user_id, run.query_id, {}};
        for (const auto& m : metrics) {
            pm.values.push_back(compute_metric(m, condensed, judgments));
        }
        report.pairs.push_back(std::move(pm));
    }
    std::sort(report.pairs.begin(), report.pairs.end(), [](const PairMetrics& a, const PairMetrics& b) {
        return std::tie(a.user_id, a.query_id) < std::tie(b.user_id, b.query_id);
    });
    for (std::size_t m = 0; m < metrics.size(); ++m) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& p : report.pairs) {
            if (p.values[m]) {
                sum += *p.values[m];
                ++n;
            }
        }
        report.averages.push_back(n == 0 ? std::nullopt : std::optional<double>(sum / static_cast<double>(n)));
    }
    return report;
}

TTestResult compare_reports(const MetricReport& candidate, const MetricReport& baseline, std::size_t m)
{
    const auto a = candidate.by_pair(m);
    const auto b = baseline.by_pair(m);
    std::vector<double> xs, ys;
    for (const auto& [key, value] : a) {
        if (auto it = b.find(key); it != b.end()) {
            xs.push_back(value);
            ys.push_back(it->second);
        }
    }
    return paired_t_test(xs, ys);
}

void write_report_tsv(std::ostream& out, const MetricReport& report)
{
    out << "user_id\tquery_id";
    for (const auto& m : report.metrics) {
        out << '\t' << m;
    }
    out << '\n';
    for (const auto& p : report.pairs) {
        out << p.user_id << '\t' << p.query_id;
        for (const auto& v : p.values) {
            out << '\t' << format_value(v);
        }
        out << '\n';
    }
    out << "all\t-";
    for (const auto& v : report.averages) {
        out << '\t' << format_value(v);
    }
    out << '\n';
}

std::string report_json(const MetricReport& report)
{
    using codec::json;
    auto value = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json pairs = json::array();
    for (const auto& p : report.pairs) {
        json values = json::object();
        for (std::size_t m = 0; m < report.metrics.size(); ++m) {
            values[report.metrics[m]] = value(p.values[m]);
        }
        pairs.push_back({{"user_id", p.user_id}, {"query_id", p.query_id}, {"values", std::move(values)}});
    }
    json averages = json::object();
    for (std::size_t m = 0; m < report.metrics.size(); ++m) {
        averages[report.metrics[m]] = value(report.averages[m]);
    }
    json j = {{"metrics", report.metrics},
              {"pairs", std::move(pairs)},
              {"averages", std::move(averages)},
              {"num_pairs", report.pairs.size()},
              {"skipped", report.skipped}};
    return j.dump(2) + "\n";
}

}  // namespace pse
