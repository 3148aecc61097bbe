#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pse/eval.hpp"

namespace pse {

/// Read-only inputs shared by every cell of an experiment.
struct ExperimentInputs {
    const Corpus* corpus = nullptr;
    const BackgroundLM* background = nullptr;
    const EmbeddingTable* embeddings = nullptr;
    const std::vector<CandidatePool>* pools = nullptr;
    const ProfileMap* profiles = nullptr;
    const Judgments* judgments = nullptr;
};

struct ExperimentRow {
    std::string label;
    RankerSpec ranker;
};

struct ExperimentColumn {
    std::string label;
    Personalization personalization;
};

struct ExperimentCell {
    std::string row;
    std::string column;
    MetricReport report;
    std::vector<RunList> runs;
    /// Per metric: paired test of this cell against the baseline, where the
    /// baseline is the query-only run of the same ranker. Empty for the
    /// baseline cell itself.
    std::vector<std::optional<TTestResult>> significance;
    /// Pairs whose profile had no usable text for this variant.
    std::size_t empty_profiles = 0;
};

struct ExperimentTable {
    std::vector<std::string> metrics;
    std::vector<std::string> rows;
    std::vector<std::string> columns;
    std::vector<ExperimentCell> cells;  // row-major
    /// Judged pairs skipped because their pool or profile is missing.
    std::size_t skipped_pairs = 0;

    const ExperimentCell& cell(std::size_t row, std::size_t column) const
    {
        return cells.at(row * columns.size() + column);
    }
};

/// Every judged (user, query) pair that has a pool and a profile, sorted.
/// `skipped` receives the number of judged pairs left out.
std::vector<PairKey> evaluation_pairs(const ExperimentInputs& inputs, std::size_t* skipped = nullptr);

/// Re-ranks every evaluation pair with one ranker and personalization mode,
/// then condenses and scores the runs.
ExperimentCell run_cell(const ExperimentInputs& inputs, const RankerSpec& ranker, Personalization personalization,
                        std::span<const PairKey> pairs, std::span<const MetricSpec> metrics);

/// Ranker x personalization grid, macro-averaged over pairs. Column 0 is
/// the baseline every other column of its row is tested against; it should
/// be the query-only column.
ExperimentTable run_experiment(const ExperimentInputs& inputs, const std::vector<ExperimentRow>& rows,
                               const std::vector<ExperimentColumn>& columns, std::span<const MetricSpec> metrics);

/// The three profile restrictions on one ranker: full profile, no book fields,
/// demographics and hobbies only. One row per variant; each row is tested
/// against the query-only run of the same ranker.
ExperimentTable run_ablation(const ExperimentInputs& inputs, const ExperimentRow& ranker,
                             std::span<const MetricSpec> metrics);

/// Default grid: columns Query / +Profile / +Profile+Entities.
std::vector<ExperimentColumn> standard_columns();

void write_table_tsv(std::ostream& out, const ExperimentTable& table);
std::string table_json(const ExperimentTable& table);

}  // namespace pse
