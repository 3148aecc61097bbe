#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pse/corpus.hpp"
#include "pse/error.hpp"
#include "pse/eval.hpp"
#include "pse/experiment.hpp"
#include "pse/profiles.hpp"
#include "pse/rankers.hpp"
#include "pse/runfile.hpp"
#include "pse/service.hpp"
#include "pse/synthetic.hpp"

namespace pse::cli {
namespace {

using json = nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Settings shared by the ranking commands. Built-in defaults, then the
// --config file, then explicit flags.
struct RunConfig {
    std::string ranker = "lm";
    std::string variant = "full";
    std::optional<double> lambda;
    std::optional<double> mu;  // unset = auto
    double k1 = 1.5;
    double b = 0.75;
    double threshold = 0.5;
    bool weight_by_multiplicity = false;
    bool remove_stopwords = true;
    bool include_comments = true;
    std::uint64_t seed = 42;
};

std::optional<double> parse_mu(const std::string& text)
{
    if (text == "auto" || text == "AUTO") {
        return std::nullopt;
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw UsageError("mu must be a number or 'auto', got '" + text + "'");
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    out << content;
    out.close();
    if (!out) {
        throw Error("failed writing '" + path + "'");
    }
}

void apply_config_file(RunConfig& c, const std::string& path)
{
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": invalid JSON config: " + e.what());
    }
    if (!j.is_object()) {
        throw UsageError(path + ": config must be a JSON object");
    }
    for (const auto& [key, v] : j.items()) {
        auto need = [&](bool ok, const char* what) {
            if (!ok) {
                throw UsageError(path + ": config key '" + key + "' must be " + what);
            }
        };
        if (key == "ranker") {
            need(v.is_string(), "a string");
            c.ranker = v.get<std::string>();
        } else if (key == "variant") {
            need(v.is_string(), "a string");
            c.variant = v.get<std::string>();
        } else if (key == "lambda") {
            need(v.is_number(), "a number");
            c.lambda = v.get<double>();
        } else if (key == "mu") {
            need(v.is_number() || v.is_string(), "a number or \"auto\"");
            c.mu = v.is_number() ? std::optional<double>(v.get<double>()) : parse_mu(v.get<std::string>());
        } else if (key == "k1") {
            need(v.is_number(), "a number");
            c.k1 = v.get<double>();
        } else if (key == "b") {
            need(v.is_number(), "a number");
            c.b = v.get<double>();
        } else if (key == "threshold") {
            need(v.is_number(), "a number");
            c.threshold = v.get<double>();
        } else if (key == "weight_by_multiplicity") {
            need(v.is_boolean(), "a boolean");
            c.weight_by_multiplicity = v.get<bool>();
        } else if (key == "remove_stopwords") {
            need(v.is_boolean(), "a boolean");
            c.remove_stopwords = v.get<bool>();
        } else if (key == "include_comments") {
            need(v.is_boolean(), "a boolean");
            c.include_comments = v.get<bool>();
        } else if (key == "seed") {
            need(v.is_number_unsigned(), "a non-negative integer");
            c.seed = v.get<std::uint64_t>();
        } else {
            throw UsageError(path + ": unknown config key '" + key + "'");
        }
    }
}

// Registers the configuration flags on a subcommand and resolves them.
class ConfigFlags {
  public:
    void add_config(CLI::App* cmd)
    {
        cmd->add_option("--config", config_path_, "JSON file with defaults; explicit flags take precedence");
    }

    void add_ranking(CLI::App* cmd, bool with_variant)
    {
        add(cmd->add_option("--ranker", raw_.ranker, "Ranker: lm, lm-wv or bm25 (default lm)"),
            [this](RunConfig& c) { c.ranker = raw_.ranker; });
        if (with_variant) {
            add(cmd->add_option("--variant", raw_.variant,
                                "Profile variant: query, full, full+entities, no-book-fields or "
                                "demographics-hobbies (default full)"),
                [this](RunConfig& c) { c.variant = raw_.variant; });
        }
        add(cmd->add_option("--lambda", lambda_,
                            "Weight of the query model in [0,1] for LM rankers (default 0 when personalized; "
                            "forced to 1 for the query variant)"),
            [this](RunConfig& c) { c.lambda = lambda_; });
        add(cmd->add_option("--mu", mu_, "Dirichlet prior: a number or 'auto' (mean pool document length; default)"),
            [this](RunConfig& c) { c.mu = parse_mu(mu_); });
        add(cmd->add_option("--k1", raw_.k1, "BM25 k1 (default 1.5)"), [this](RunConfig& c) { c.k1 = raw_.k1; });
        add(cmd->add_option("--b", raw_.b, "BM25 b (default 0.75)"), [this](RunConfig& c) { c.b = raw_.b; });
        add(cmd->add_option("--threshold", raw_.threshold,
                            "Cosine threshold T for the lm-wv translation model (default 0.5)"),
            [this](RunConfig& c) { c.threshold = raw_.threshold; });
        add(cmd->add_flag("--weight-by-multiplicity", raw_.weight_by_multiplicity,
                          "BM25: weight each distinct query term by its multiplicity"),
            [this](RunConfig& c) { c.weight_by_multiplicity = raw_.weight_by_multiplicity; });
    }

    void add_tokenization(CLI::App* cmd)
    {
        add(cmd->add_flag("--keep-stopwords", keep_stopwords_, "Do not remove English stopwords"),
            [this](RunConfig& c) { c.remove_stopwords = !keep_stopwords_; });
        add(cmd->add_flag("--no-comments", no_comments_, "Index title and summary only"),
            [this](RunConfig& c) { c.include_comments = !no_comments_; });
    }

    void add_seed(CLI::App* cmd)
    {
        add(cmd->add_option("--seed", raw_.seed, "Seed for the xorshift64* generator (default 42)"),
            [this](RunConfig& c) { c.seed = raw_.seed; });
    }

    RunConfig resolve() const
    {
        RunConfig c;
        if (!config_path_.empty()) {
            apply_config_file(c, config_path_);
        }
        for (const auto& [opt, set] : setters_) {
            if (opt->count() > 0) {
                set(c);
            }
        }
        return c;
    }

  private:
    void add(CLI::Option* opt, std::function<void(RunConfig&)> set) { setters_.emplace_back(opt, std::move(set)); }

    std::string config_path_;
    RunConfig raw_;
    double lambda_ = 0.0;
    std::string mu_;
    bool keep_stopwords_ = false;
    bool no_comments_ = false;
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters_;
};

struct RankingSetup {
    RankerSpec spec;
    Personalization personalization;
};

RankingSetup ranking_setup(const RunConfig& c)
{
    RankingSetup s;
    auto kind = parse_ranker(c.ranker);
    if (!kind) {
        throw UsageError("unknown ranker '" + c.ranker + "' (expected lm, lm-wv or bm25)");
    }
    s.spec.kind = *kind;
    s.spec.lm.lambda = c.lambda.value_or(0.0);
    s.spec.lm.mu = c.mu;
    s.spec.bm25.k1 = c.k1;
    s.spec.bm25.b = c.b;
    s.spec.bm25.weight_by_multiplicity = c.weight_by_multiplicity;
    s.spec.similarity.threshold = c.threshold;
    if (c.variant == "query") {
        s.personalization.reset();
    } else if (auto v = parse_variant(c.variant)) {
        s.personalization = *v;
    } else {
        throw UsageError("unknown variant '" + c.variant
                         + "' (expected query, full, full+entities, no-book-fields or demographics-hobbies)");
    }
    s.spec.lm.validate();
    s.spec.bm25.validate();
    if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) {
        throw ConfigError("threshold must lie in [0,1]");
    }
    return s;
}

// Input files for the ranking commands.
struct InputFlags {
    std::string index;
    std::string pools;
    std::string profiles;
    std::string entities;
    std::string embeddings;
    std::string background;
    std::string qrels;

    void add(CLI::App* cmd, bool qrels_required, bool with_qrels = true)
    {
        cmd->add_option("--index", index, "Index file written by 'pse index'")->required();
        cmd->add_option("--pools", pools, "Candidate pools (JSON lines)")->required();
        cmd->add_option("--profiles", profiles, "User profiles (JSON lines)")->required();
        cmd->add_option("--entities", entities, "Entity descriptions (JSON lines) attached to the profiles")
            ;
        cmd->add_option("--embeddings", embeddings, "Word vectors in word2vec text format (needed by lm-wv)")
            ;
        cmd->add_option("--background", background,
                        "Background model written by 'pse background' (default: derived from the index)");
        if (with_qrels) {
            auto* q = cmd->add_option("--qrels", qrels,
                                      qrels_required ? "Graded judgments"
                                                     : "Graded judgments; restricts output to judged pairs");
            if (qrels_required) {
                q->required();
            }
        }
    }
};

struct LoadedInputs {
    Corpus corpus;
    BackgroundLM background;
    std::optional<EmbeddingTable> embeddings;
    std::vector<CandidatePool> pools;
    ProfileMap profiles;
    std::optional<Judgments> judgments;

    ExperimentInputs view() const
    {
        return {&corpus,   &background, embeddings ? &*embeddings : nullptr,
                &pools,    &profiles,   judgments ? &*judgments : nullptr};
    }
    RankingResources resources() const { return {&corpus, &background, embeddings ? &*embeddings : nullptr}; }
};

std::unique_ptr<LoadedInputs> load_inputs(const InputFlags& f)
{
    auto in = std::make_unique<LoadedInputs>();
    in->corpus = load_index(f.index);
    in->background = f.background.empty() ? corpus_background(in->corpus) : load_background(f.background);
    if (!f.embeddings.empty()) {
        in->embeddings = load_embeddings(f.embeddings);
    }
    in->pools = load_pools(f.pools);
    in->profiles = load_profiles(f.profiles);
    if (!f.entities.empty()) {
        attach_entity_records(in->profiles, load_entity_records(f.entities));
    }
    if (!f.qrels.empty()) {
        in->judgments = load_qrels(f.qrels);
    }
    return in;
}

void require_embeddings(const RankerSpec& spec, const LoadedInputs& in)
{
    if (spec.kind == RankerKind::LMWithEmbeddings && !in.embeddings) {
        throw UsageError("the lm-wv ranker needs --embeddings");
    }
}

std::vector<MetricSpec> parse_metrics(const std::string& list)
{
    std::vector<MetricSpec> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            try {
                out.push_back(MetricSpec::parse(item));
            } catch (const Error& e) {
                throw UsageError(e.what());
            }
        }
    }
    if (out.empty()) {
        throw UsageError("no metrics given");
    }
    return out;
}

std::string format_double(double v)
{
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string one_line(std::string s)
{
    for (auto& c : s) {
        if (c == '\n' || c == '\r') {
            c = ' ';
        }
    }
    while (!s.empty() && s.back() == ' ') {
        s.pop_back();
    }
    return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Personalized entity search: indexing, re-ranking, evaluation and an HTTP service", "pse"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "pse 0.1.0");

    // index
    auto* index_cmd = app.add_subcommand("index", "Tokenize a documents file and write the term-count index");
    std::string docs_path, out_path;
    ConfigFlags index_cfg;
    index_cmd->add_option("--docs", docs_path, "Documents (JSON lines: doc_id, title, summary, comments)")
        ->required()
        ;
    index_cmd->add_option("--out", out_path, "Index file to write")->required();
    index_cfg.add_config(index_cmd);
    index_cfg.add_tokenization(index_cmd);

    // background
    auto* bg_cmd = app.add_subcommand("background", "Estimate the Laplace-smoothed background model");
    std::string bg_docs, bg_index, bg_out;
    ConfigFlags bg_cfg;
    auto* bg_docs_opt = bg_cmd->add_option("--docs", bg_docs, "Documents file");
    auto* bg_index_opt = bg_cmd->add_option("--index", bg_index, "Index file (alternative to --docs)")
                             ;
    bg_docs_opt->excludes(bg_index_opt);
    bg_cmd->add_option("--out", bg_out, "Counts file to write (TSV)")->required();
    bg_cfg.add_config(bg_cmd);
    bg_cfg.add_tokenization(bg_cmd);

    // rerank
    auto* rerank_cmd = app.add_subcommand(
        "rerank", "Re-rank every pool for every user (or every judged pair with --qrels) and write a run file");
    InputFlags rerank_in;
    ConfigFlags rerank_cfg;
    std::string rerank_out, rerank_tag;
    rerank_in.add(rerank_cmd, false);
    rerank_cfg.add_config(rerank_cmd);
    rerank_cfg.add_ranking(rerank_cmd, true);
    rerank_cmd->add_option("--out", rerank_out, "Run file to write")->required();
    rerank_cmd->add_option("--tag", rerank_tag, "Run tag (default <ranker>-<variant>)");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Score a run on condensed lists; TSV to stdout, JSON with --out");
    std::string eval_run, eval_qrels, eval_metrics = "ndcg@20,ndcg@5,p@1", eval_out;
    eval_cmd->add_option("--run", eval_run, "Run file")->required();
    eval_cmd->add_option("--qrels", eval_qrels, "Graded judgments")->required();
    eval_cmd->add_option("--metrics", eval_metrics, "Comma-separated metrics: ndcg@<k>, p@1")->capture_default_str();
    eval_cmd->add_option("--out", eval_out, "JSON report to write");

    // compare
    auto* cmp_cmd = app.add_subcommand("compare", "One-sided paired t-test of run A against run B");
    std::string cmp_a, cmp_b, cmp_qrels, cmp_metric = "ndcg@20", cmp_out;
    cmp_cmd->add_option("--run-a", cmp_a, "Candidate run (H1: A better than B)")->required();
    cmp_cmd->add_option("--run-b", cmp_b, "Baseline run")->required();
    cmp_cmd->add_option("--qrels", cmp_qrels, "Graded judgments")->required();
    cmp_cmd->add_option("--metric", cmp_metric, "Metric to compare")->capture_default_str();
    cmp_cmd->add_option("--out", cmp_out, "JSON result to write");

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "Draw a seeded judging sample from every pool");
    std::string sample_pools, sample_out;
    std::size_t sample_n = 0;
    ConfigFlags sample_cfg;
    sample_cmd->add_option("--pools", sample_pools, "Candidate pools")->required();
    sample_cmd->add_option("--n", sample_n, "Documents to draw per pool")->required();
    sample_cmd->add_option("--out", sample_out, "Pools file to write, with sampled_ids filled in")->required();
    sample_cfg.add_config(sample_cmd);
    sample_cfg.add_seed(sample_cmd);

    // ablate
    auto* ablate_cmd = app.add_subcommand(
        "ablate", "Profile ablation on one ranker: full, no-book-fields, demographics-hobbies vs. query only");
    InputFlags ablate_in;
    ConfigFlags ablate_cfg;
    std::string ablate_metrics = "ndcg@20,ndcg@5,p@1", ablate_out;
    ablate_in.add(ablate_cmd, true);
    ablate_cfg.add_config(ablate_cmd);
    ablate_cfg.add_ranking(ablate_cmd, false);
    ablate_cmd->add_option("--metrics", ablate_metrics, "Comma-separated metrics")->capture_default_str();
    ablate_cmd->add_option("--out", ablate_out, "JSON table to write");

    // experiment
    auto* exp_cmd = app.add_subcommand(
        "experiment", "Ranker x {query, +profile, +profile+entities} table with significance against query");
    InputFlags exp_in;
    ConfigFlags exp_cfg;
    std::string exp_rankers, exp_metrics = "ndcg@20,ndcg@5,p@1", exp_out;
    exp_in.add(exp_cmd, true);
    exp_cfg.add_config(exp_cmd);
    exp_cfg.add_ranking(exp_cmd, false);
    exp_cmd->add_option("--rankers", exp_rankers,
                        "Comma-separated rankers (default lm,bm25 plus lm-wv when --embeddings is given)");
    exp_cmd->add_option("--metrics", exp_metrics, "Comma-separated metrics")->capture_default_str();
    exp_cmd->add_option("--out", exp_out, "JSON table to write");

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Start the JSON HTTP API");
    InputFlags serve_in;
    ConfigFlags serve_cfg;
    std::string serve_host = "127.0.0.1", serve_static;
    int serve_port = 8080;
    std::size_t serve_k = 10;
    serve_in.add(serve_cmd, false, false);
    serve_cfg.add_config(serve_cmd);
    serve_cfg.add_ranking(serve_cmd, false);
    serve_cmd->add_option("--host", serve_host, "Address to bind")->capture_default_str();
    serve_cmd->add_option("--port", serve_port, "Port to listen on")->capture_default_str()->check(
        CLI::Range(0, 65535));
    serve_cmd->add_option("--static-dir", serve_static, "Directory served at / (e.g. the web UI bundle)")
        ->check(CLI::ExistingDirectory);
    serve_cmd->add_option("--k", serve_k, "Default number of results per rerank request")->capture_default_str();

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Write the seeded synthetic preference collection");
    std::string synth_dir;
    SyntheticOptions synth;
    synth_cmd->add_option("--out-dir", synth_dir, "Directory to create and fill")->required();
    synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
    synth_cmd->add_option("--docs", synth.num_docs, "Number of documents")->capture_default_str();
    synth_cmd->add_option("--topics", synth.num_topics, "Number of topics")->capture_default_str();
    synth_cmd->add_option("--users", synth.num_users, "Number of users")->capture_default_str();
    synth_cmd->add_option("--queries", synth.num_queries, "Number of queries (at most 6)")->capture_default_str();
    synth_cmd->add_option("--pool-size", synth.pool_size, "Documents per pool")->capture_default_str();
    synth_cmd->add_option("--judged", synth.judged_per_pool, "Judged documents per (user, query)")
        ->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "pse: " << one_line(e.what()) << '\n';
        return kUsageError;
    }

    try {
        if (index_cmd->parsed()) {
            const auto cfg = index_cfg.resolve();
            const auto corpus = load_documents(docs_path, {cfg.remove_stopwords, cfg.include_comments});
            save_index(corpus, out_path);
            out << "indexed " << corpus.size() << " documents, " << corpus.stats().total_tokens << " tokens -> "
                << out_path << '\n';
        } else if (bg_cmd->parsed()) {
            const auto cfg = bg_cfg.resolve();
            if (bg_docs.empty() && bg_index.empty()) {
                throw UsageError("background needs --docs or --index");
            }
            const auto corpus = bg_docs.empty() ? load_index(bg_index)
                                                : load_documents(bg_docs, {cfg.remove_stopwords, cfg.include_comments});
            const auto bg = corpus_background(corpus);
            save_background(bg, bg_out);
            out << "background: " << bg.vocab_size() << " terms, " << bg.total_tokens() << " tokens -> " << bg_out
                << '\n';
        } else if (rerank_cmd->parsed()) {
            const auto cfg = rerank_cfg.resolve();
            const auto setup = ranking_setup(cfg);
            const auto in = load_inputs(rerank_in);
            require_embeddings(setup.spec, *in);
            std::vector<PairKey> pairs;
            if (in->judgments) {
                pairs = evaluation_pairs(in->view());
            } else {
                for (const auto& [user, profile] : in->profiles) {
                    for (const auto& pool : in->pools) {
                        pairs.emplace_back(user, pool.query_id);
                    }
                }
            }
            std::map<std::string, const CandidatePool*> pools;
            for (const auto& p : in->pools) {
                pools.emplace(p.query_id, &p);
            }
            std::vector<RunList> runs;
            std::size_t empty = 0;
            for (const auto& [user, query] : pairs) {
                try {
                    runs.push_back(rerank(*pools.at(query), in->resources(), setup.spec, user,
                                          &in->profiles.at(user), setup.personalization));
                } catch (const EmptyProfileError&) {
                    ++empty;
                }
            }
            const std::string tag = rerank_tag.empty() ? cfg.ranker + "-" + cfg.variant : rerank_tag;
            std::ostringstream buf;
            write_runs(buf, runs, tag);
            write_file(rerank_out, buf.str());
            if (empty > 0) {
                err << "pse: warning: skipped " << empty << " pairs whose profile has no usable text\n";
            }
            out << "wrote " << runs.size() << " ranked lists -> " << rerank_out << '\n';
        } else if (eval_cmd->parsed()) {
            const auto metrics = parse_metrics(eval_metrics);
            const auto runs = load_runs(eval_run);
            const auto judgments = load_qrels(eval_qrels);
            const auto report = evaluate_runs(runs, judgments, metrics);
            write_report_tsv(out, report);
            if (report.skipped > 0) {
                err << "pse: warning: " << report.skipped << " runs have no judgments and were skipped\n";
            }
            if (!eval_out.empty()) {
                write_file(eval_out, report_json(report));
            }
        } else if (cmp_cmd->parsed()) {
            const std::vector<MetricSpec> metric = parse_metrics(cmp_metric);
            if (metric.size() != 1) {
                throw UsageError("--metric takes exactly one metric");
            }
            const auto judgments = load_qrels(cmp_qrels);
            const auto a = evaluate_runs(load_runs(cmp_a), judgments, metric);
            const auto b = evaluate_runs(load_runs(cmp_b), judgments, metric);
            const auto t = compare_reports(a, b, 0);
            out << "metric\tn\tmean_diff\tt\tp_one_sided\tdegenerate\n"
                << metric[0].name() << '\t' << t.n << '\t' << format_double(t.mean_diff) << '\t' << format_double(t.t)
                << '\t' << format_double(t.p_one_sided) << '\t' << (t.degenerate ? "yes" : "no") << '\n';
            if (!cmp_out.empty()) {
                json j = {{"metric", metric[0].name()},
                          {"n", t.n},
                          {"mean_diff", t.mean_diff},
                          {"t", std::isinf(t.t) ? json(format_double(t.t)) : json(t.t)},
                          {"p_one_sided", t.p_one_sided},
                          {"degenerate", t.degenerate}};
                write_file(cmp_out, j.dump(2) + "\n");
            }
        } else if (sample_cmd->parsed()) {
            const auto cfg = sample_cfg.resolve();
            auto pools = load_pools(sample_pools);
            for (auto& p : pools) {
                p = sample_pool(p, sample_n, cfg.seed);
            }
            std::ostringstream buf;
            write_pools(buf, pools);
            write_file(sample_out, buf.str());
            out << "sampled " << sample_n << " of each of " << pools.size() << " pools (seed " << cfg.seed << ") -> "
                << sample_out << '\n';
        } else if (ablate_cmd->parsed()) {
            const auto cfg = ablate_cfg.resolve();
            const auto setup = ranking_setup(cfg);
            const auto metrics = parse_metrics(ablate_metrics);
            const auto in = load_inputs(ablate_in);
            require_embeddings(setup.spec, *in);
            const auto table = run_ablation(in->view(), {cfg.ranker, setup.spec}, metrics);
            write_table_tsv(out, table);
            if (!ablate_out.empty()) {
                write_file(ablate_out, table_json(table));
            }
        } else if (exp_cmd->parsed()) {
            const auto cfg = exp_cfg.resolve();
            const auto base = ranking_setup(cfg);
            const auto metrics = parse_metrics(exp_metrics);
            const auto in = load_inputs(exp_in);
            std::string names = exp_rankers;
            if (names.empty()) {
                names = in->embeddings ? "lm,lm-wv,bm25" : "lm,bm25";
            }
            std::vector<ExperimentRow> rows;
            std::stringstream ss(names);
            std::string name;
            while (std::getline(ss, name, ',')) {
                auto kind = parse_ranker(name);
                if (!kind) {
                    throw UsageError("unknown ranker '" + name + "' in --rankers");
                }
                RankerSpec spec = base.spec;
                spec.kind = *kind;
                require_embeddings(spec, *in);
                rows.push_back({name, spec});
            }
            const auto table = run_experiment(in->view(), rows, standard_columns(), metrics);
            write_table_tsv(out, table);
            if (!exp_out.empty()) {
                write_file(exp_out, table_json(table));
            }
        } else if (serve_cmd->parsed()) {
            const auto cfg = serve_cfg.resolve();
            const auto setup = ranking_setup(cfg);
            auto in = load_inputs(serve_in);
            ServiceData data{std::move(in->corpus), std::move(in->background), std::move(in->embeddings),
                             std::move(in->pools), std::move(in->profiles)};
            ServiceOptions options{serve_in.profiles, serve_static, setup.spec, serve_k};
            Service service(std::move(data), std::move(options));
            const int port = service.bind(serve_host, serve_port);
            out << "listening on http://" << serve_host << ':' << port << '\n' << std::flush;
            service.listen();
        } else if (synth_cmd->parsed()) {
            std::filesystem::create_directories(synth_dir);
            const auto fixture = make_synthetic_fixture(synth);
            write_synthetic_fixture(fixture, synth_dir);
            out << "wrote " << fixture.documents.size() << " documents, " << fixture.profiles.size() << " users, "
                << fixture.pools.size() << " pools -> " << synth_dir << '\n';
        }
    } catch (const UsageError& e) {
        err << "pse: " << one_line(e.what()) << '\n';
        return kUsageError;
    } catch (const ConfigError& e) {
        err << "pse: " << one_line(e.what()) << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "pse: " << one_line(e.what()) << '\n';
        return kDataError;
    }
    return kOk;
}

}  // namespace pse::cli
