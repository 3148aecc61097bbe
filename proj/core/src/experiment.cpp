#include "pse/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "codec.hpp"
#include "pse/error.hpp"

namespace pse {
namespace {

const CandidatePool* find_pool(const std::vector<CandidatePool>& pools, const std::string& query_id)
{
    for (const auto& p : pools) {
        if (p.query_id == query_id) {
            return &p;
        }
    }
    return nullptr;
}

void check_inputs(const ExperimentInputs& in)
{
    if (in.corpus == nullptr || in.pools == nullptr || in.profiles == nullptr || in.judgments == nullptr) {
        throw Error("experiment inputs need a corpus, pools, profiles and judgments");
    }
}

std::vector<std::optional<TTestResult>> significance_against(const MetricReport& candidate,
                                                             const MetricReport& baseline)
{
    std::vector<std::optional<TTestResult>> out;
    for (std::size_t m = 0; m < candidate.metrics.size(); ++m) {
        try {
            out.emplace_back(compare_reports(candidate, baseline, m));
        } catch (const Error&) {
            out.emplace_back(std::nullopt);  // fewer than two comparable pairs
        }
    }
    return out;
}

std::string fmt(double v, const char* spec)
{
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

codec::json number_or_string(double v)
{
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

}  // namespace

std::vector<PairKey> evaluation_pairs(const ExperimentInputs& inputs, std::size_t* skipped)
{
    check_inputs(inputs);
    std::vector<PairKey> out;
    std::size_t missing = 0;
    for (const auto& key : inputs.judgments->pairs()) {
        if (find_pool(*inputs.pools, key.second) == nullptr || !inputs.profiles->contains(key.first)) {
            ++missing;
            continue;
        }
        out.push_back(key);
    }
    if (skipped != nullptr) {
        *skipped = missing;
    }
    return out;
}

ExperimentCell run_cell(const ExperimentInputs& inputs, const RankerSpec& ranker, Personalization personalization,
                        std::span<const PairKey> pairs, std::span<const MetricSpec> metrics)
{
    check_inputs(inputs);
    const RankingResources resources{inputs.corpus, inputs.background, inputs.embeddings};
    ExperimentCell cell;
    for (const auto& [user, query] : pairs) {
        const auto* pool = find_pool(*inputs.pools, query);
        const auto* profile = &inputs.profiles->at(user);
        try {
            cell.runs.push_back(rerank(*pool, resources, ranker, user, profile, personalization));
        } catch (const EmptyProfileError&) {
            ++cell.empty_profiles;
        }
    }
    cell.report = evaluate_runs(cell.runs, *inputs.judgments, metrics);
    return cell;
}

ExperimentTable run_experiment(const ExperimentInputs& inputs, const std::vector<ExperimentRow>& rows,
                               const std::vector<ExperimentColumn>& columns, std::span<const MetricSpec> metrics)
{
    ExperimentTable table;
    for (const auto& m : metrics) {
        table.metrics.push_back(m.name());
    }
    const auto pairs = evaluation_pairs(inputs, &table.skipped_pairs);
    for (const auto& r : rows) {
        table.rows.push_back(r.label);
    }
    for (const auto& c : columns) {
        table.columns.push_back(c.label);
    }
    for (const auto& row : rows) {
        std::size_t first = table.cells.size();
        for (const auto& col : columns) {
            auto cell = run_cell(inputs, row.ranker, col.personalization, pairs, metrics);
            cell.row = row.label;
            cell.column = col.label;
            if (table.cells.size() > first) {
                cell.significance = significance_against(cell.report, table.cells[first].report);
            }
            table.cells.push_back(std::move(cell));
        }
    }
    return table;
}

ExperimentTable run_ablation(const ExperimentInputs& inputs, const ExperimentRow& ranker,
                             std::span<const MetricSpec> metrics)
{
    ExperimentTable table;
    for (const auto& m : metrics) {
        table.metrics.push_back(m.name());
    }
    const auto pairs = evaluation_pairs(inputs, &table.skipped_pairs);
    const auto baseline = run_cell(inputs, ranker.ranker, std::nullopt, pairs, metrics);
    table.columns.push_back(ranker.label);
    for (auto v : {ProfileVariant::Full, ProfileVariant::NoBookFields, ProfileVariant::DemographicsHobbiesOnly}) {
        auto cell = run_cell(inputs, ranker.ranker, v, pairs, metrics);
        cell.row = std::string(variant_name(v));
        cell.column = ranker.label;
        cell.significance = significance_against(cell.report, baseline.report);
        table.rows.push_back(cell.row);
        table.cells.push_back(std::move(cell));
    }
    return table;
}

std::vector<ExperimentColumn> standard_columns()
{
    return {{"query", std::nullopt},
            {"+profile", ProfileVariant::Full},
            {"+profile+entities", ProfileVariant::FullPlusEntities}};
}

void write_table_tsv(std::ostream& out, const ExperimentTable& table)
{
    out << "row\tcolumn\tpairs";
    for (const auto& m : table.metrics) {
        out << '\t' << m;
    }
    for (const auto& m : table.metrics) {
        out << "\tp(" << m << ')';
    }
    out << '\n';
    for (const auto& cell : table.cells) {
        out << cell.row << '\t' << cell.column << '\t' << cell.report.pairs.size();
        for (const auto& avg : cell.report.averages) {
            out << '\t' << (avg ? fmt(*avg, "%.4f") : "-");
        }
        for (std::size_t m = 0; m < table.metrics.size(); ++m) {
            const bool has = m < cell.significance.size() && cell.significance[m];
            out << '\t' << (has ? fmt(cell.significance[m]->p_one_sided, "%.4g") : "-");
        }
        out << '\n';
    }
}

std::string table_json(const ExperimentTable& table)
{
    using codec::json;
    json cells = json::array();
    for (const auto& cell : table.cells) {
        json sig = json::object();
        for (std::size_t m = 0; m < cell.significance.size(); ++m) {
            if (const auto& t = cell.significance[m]) {
                sig[table.metrics[m]] = {{"t", number_or_string(t->t)},
                                         {"p_one_sided", t->p_one_sided},
                                         {"n", t->n},
                                         {"mean_diff", t->mean_diff},
                                         {"degenerate", t->degenerate}};
            } else {
                sig[table.metrics[m]] = nullptr;
            }
        }
        cells.push_back({{"row", cell.row},
                         {"column", cell.column},
                         {"empty_profiles", cell.empty_profiles},
                         {"report", json::parse(report_json(cell.report))},
                         {"significance", std::move(sig)}});
    }
    json j = {{"metrics", table.metrics},
              {"rows", table.rows},
              {"columns", table.columns},
              {"skipped_pairs", table.skipped_pairs},
              {"cells", std::move(cells)}};
    return j.dump(2) + "\n";
}

}  // namespace pse
