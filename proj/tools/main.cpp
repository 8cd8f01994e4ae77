// tetun: command-line front end for indexing, retrieval, evaluation, stemming,
// stopword detection, pooling, the judgment service and the experiment grid.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tetun/corpus.hpp"
#include "tetun/error.hpp"
#include "tetun/grid.hpp"
#include "tetun/index.hpp"
#include "tetun/ireval.hpp"
#include "tetun/judge_server.hpp"
#include "tetun/judge_store.hpp"
#include "tetun/pool.hpp"
#include "tetun/rank.hpp"
#include "tetun/stemeval.hpp"
#include "tetun/stemmer.hpp"
#include "tetun/stopword_list.hpp"
#include "tetun/stopwords.hpp"
#include "tetun/textnorm.hpp"

using namespace tetun;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_internal = 1;
constexpr int exit_usage = 2;

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error("cannot write " + path);
}

NormConfig norm_from(const std::string& file, const std::string& strategy)
{
    if (!file.empty() && !strategy.empty()) throw ValidationError("give --norm or --strategy, not both");
    if (!file.empty()) return NormConfig::parse(read_text(file));
    if (!strategy.empty()) return parse_strategy(strategy);
    return NormConfig{};
}

struct ModelFlags {
    std::string model = "bm25";
    RankParams defaults;
    double k1 = defaults.k1;
    double b = defaults.b;
    double mu = defaults.mu;
    double lambda = defaults.lambda;

    void attach(CLI::App* app)
    {
        app->add_option("--model", model, "tfidf, bm25, dfr_bm25, dirichlet_lm or hiemstra_lm")->capture_default_str();
        app->add_option("--k1", k1, "term-frequency saturation")->capture_default_str();
        app->add_option("--b", b, "length normalisation")->capture_default_str();
        app->add_option("--mu", mu, "Dirichlet prior")->capture_default_str();
        app->add_option("--lambda", lambda, "Hiemstra mixing weight")->capture_default_str();
    }

    [[nodiscard]] RankParams params() const
    {
        RankParams p{parse_model(model), k1, b, mu, lambda};
        p.validate();
        return p;
    }
};

std::string query_text(const Topic& t, const std::string& fields)
{
    if (fields == "title") return t.title;
    if (fields == "title+description") return t.title + " " + t.description;
    throw ValidationError("--query-fields must be title or title+description");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Tetun retrieval toolkit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every subcommand");

    // index
    auto* index_cmd = app.add_subcommand("index", "build and save an inverted index");
    std::string docs_path, index_out, norm_file, strategy, field_name = "content", compare_dir;
    unsigned threads = 1;
    index_cmd->add_option("--docs", docs_path, "document collection")->required()->check(CLI::ExistingFile);
    index_cmd->add_option("--field", field_name, "title or content")->capture_default_str();
    index_cmd->add_option("--norm", norm_file, "preprocessing config (key=value lines)")->check(CLI::ExistingFile);
    index_cmd->add_option("--strategy", strategy, "preprocessing label, e.g. no-apostrophes+stem-light");
    index_cmd->add_option("--threads", threads, "tokenizer threads")->capture_default_str();
    index_cmd->add_option("--out", index_out, "index directory")->required();
    index_cmd->add_option("--compare-to", compare_dir, "baseline index; prints the compression factor")
        ->check(CLI::ExistingDirectory);

    // search
    auto* search_cmd = app.add_subcommand("search", "rank documents and write a TREC run");
    std::string index_dir, topics_path, query, query_fields = "title", run_tag, out_path;
    std::size_t k = 1000;
    ModelFlags search_model;
    search_cmd->add_option("--index", index_dir, "index directory")->required()->check(CLI::ExistingDirectory);
    auto* topics_opt = search_cmd->add_option("--topics", topics_path, "topic file")->check(CLI::ExistingFile);
    auto* query_opt = search_cmd->add_option("--query", query, "single query text (topic id 1)");
    topics_opt->excludes(query_opt);
    search_cmd->add_option("--query-fields", query_fields, "title or title+description")->capture_default_str();
    search_cmd->add_option("--k", k, "documents per topic")->capture_default_str();
    search_cmd->add_option("--tag", run_tag, "run tag (default: model name)");
    search_cmd->add_option("--out", out_path, "run file (default: stdout)");
    search_model.attach(search_cmd);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "score a run against qrels");
    std::string run_path, qrels_path, gain_name = "linear", format = "text";
    std::vector<std::size_t> cutoffs{std::begin(default_cutoffs), std::end(default_cutoffs)};
    eval_cmd->add_option("--run", run_path, "TREC run")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--qrels", qrels_path, "TREC qrels")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--cutoffs", cutoffs, "comma-separated cutoffs")->delimiter(',')->capture_default_str();
    eval_cmd->add_option("--gain", gain_name, "linear or exponential")->capture_default_str();
    eval_cmd->add_option("--format", format, "text or csv")->capture_default_str();
    eval_cmd->add_option("--out", out_path, "report file (default: stdout)");

    // stem
    auto* stem_cmd = app.add_subcommand("stem", "stem words, or evaluate the stemmers on concept groups");
    std::string variant = "light", groups_path;
    std::vector<std::string> words;
    stem_cmd->add_option("--variant", variant, "light, moderate or heavy")->capture_default_str();
    stem_cmd->add_option("--groups", groups_path, "concept groups; prints the Paice report for all variants")
        ->check(CLI::ExistingFile);
    stem_cmd->add_option("--format", format, "report format: text or csv")->capture_default_str();
    stem_cmd->add_option("words", words, "words to stem");

    // stopwords
    auto* stop_cmd = app.add_subcommand("stopwords", "rank stopword candidates from a collection");
    std::string method = "tf", truth;
    std::size_t top_n = 100;
    std::vector<std::size_t> stop_cutoffs{std::begin(default_precision_cutoffs), std::end(default_precision_cutoffs)};
    stop_cmd->add_option("--docs", docs_path, "document collection")->required()->check(CLI::ExistingFile);
    stop_cmd->add_option("--method", method, "tf, idf, tfidf, in_degree, out_degree or degree")->capture_default_str();
    stop_cmd->add_option("--n", top_n, "candidates to list")->capture_default_str();
    stop_cmd->add_option("--truth", truth, "stopword list to score against, or 'bundled'");
    stop_cmd->add_option("--cutoffs", stop_cutoffs, "precision cutoffs")->delimiter(',')->capture_default_str();

    // pool
    auto* pool_cmd = app.add_subcommand("pool", "interleave two models' rankings into judgment pools");
    std::size_t depth = default_pool_depth;
    std::string model_a = "bm25", model_b = "dirichlet_lm";
    pool_cmd->add_option("--index", index_dir, "index directory")->required()->check(CLI::ExistingDirectory);
    pool_cmd->add_option("--topics", topics_path, "topic file")->required()->check(CLI::ExistingFile);
    pool_cmd->add_option("--depth", depth, "documents per pool")->capture_default_str();
    pool_cmd->add_option("--model-a", model_a, "first model; its list leads")->capture_default_str();
    pool_cmd->add_option("--model-b", model_b, "second model")->capture_default_str();
    pool_cmd->add_option("--threads", threads, "query threads")->capture_default_str();
    pool_cmd->add_option("--out", out_path, "pool JSON file")->required();

    // judge-serve
    auto* serve_cmd = app.add_subcommand("judge-serve", "serve the relevance judgment API");
    std::string pools_path, judge_config, store_dir, host = "127.0.0.1";
    int port = 8080;
    ExportRule rule;
    serve_cmd->add_option("--pools", pools_path, "pool JSON from `pool`")->required()->check(CLI::ExistingFile);
    serve_cmd->add_option("--config", judge_config, "assessor config JSON")->required()->check(CLI::ExistingFile);
    serve_cmd->add_option("--store", store_dir, "journal directory")->required();
    serve_cmd->add_option("--docs", docs_path, "documents shown to assessors")->check(CLI::ExistingFile);
    serve_cmd->add_option("--topics", topics_path, "topic descriptions")->check(CLI::ExistingFile);
    serve_cmd->add_option("--host", host, "bind address")->capture_default_str();
    serve_cmd->add_option("--port", port, "port; 0 picks a free one")->capture_default_str();
    serve_cmd->add_option("--min-relevant", rule.min_relevant, "drop topics with fewer relevant documents")
        ->capture_default_str();
    serve_cmd->add_option("--max-relevant", rule.max_relevant, "drop topics with at least this many")
        ->capture_default_str();

    // grid
    auto* grid_cmd = app.add_subcommand("grid", "run the preprocessing x model experiment grid");
    std::string grid_config, grid_out = "grid-out";
    std::vector<std::string> overrides;
    unsigned workers = 1;
    grid_cmd->add_option("--config", grid_config, "grid config (key = value lines)")->required()->check(
        CLI::ExistingFile);
    grid_cmd->add_option("--out", grid_out, "output directory")->capture_default_str();
    grid_cmd->add_option("--workers", workers, "parallel cells")->capture_default_str();
    grid_cmd->add_option("--set", overrides, "override a config key, e.g. --set depth=100");
    grid_cmd->footer("Relative data paths resolve against $TETUN_DATA_DIR when set, else the config's directory.");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (index_cmd->parsed()) {
            const auto docs = read_documents(docs_path);
            const auto idx = build_index(docs, parse_field(field_name), norm_from(norm_file, strategy), threads);
            idx.save(index_out);
            const auto s = idx.stats();
            std::cout << "documents: " << s.documents << "\ntokens: " << s.total_tokens
                      << "\nvocabulary: " << s.vocabulary << "\navdl: " << format_score(s.avdl) << "\n";
            if (!compare_dir.empty()) {
                const auto base = InvertedIndex::load(compare_dir);
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.2f", icf(base.stats().vocabulary, s.vocabulary));
                std::cout << "icf: " << buf << "\n";
            }
        } else if (search_cmd->parsed()) {
            if (topics_path.empty() && query.empty()) throw ValidationError("search needs --topics or --query");
            const auto idx = InvertedIndex::load(index_dir);
            const auto params = search_model.params();
            const auto tag = run_tag.empty() ? std::string(to_string(params.model)) : run_tag;
            std::vector<Topic> topics = topics_path.empty() ? std::vector<Topic>{{1, query, "", ""}}
                                                            : read_topics(topics_path);
            std::vector<RunEntry> run;
            for (const auto& t : topics) {
                auto list = search(idx, topics_path.empty() ? query : query_text(t, query_fields), params, k);
                list.topic_id = t.topic_id;
                const auto lines = to_run(list, tag);
                run.insert(run.end(), lines.begin(), lines.end());
            }
            std::ostringstream text;
            write_run(text, run);
            emit(out_path, text.str());
        } else if (eval_cmd->parsed()) {
            const auto run = read_run(run_path);
            const auto qrels = read_qrels(qrels_path);
            const auto tag = run.empty() ? std::filesystem::path(run_path).filename().string() : run.front().run_tag;
            const auto report = evaluate_run(run, qrels, cutoffs, parse_gain(gain_name), tag,
                                             std::filesystem::path(qrels_path).filename().string());
            if (format != "text" && format != "csv") throw ValidationError("--format must be text or csv");
            emit(out_path, format == "csv" ? report.to_csv() : report.to_text());
        } else if (stem_cmd->parsed()) {
            if (!groups_path.empty()) {
                const auto groups = ConceptGroups::load(groups_path);
                std::vector<NamedStemmer> stemmers;
                for (auto v : {StemVariant::light, StemVariant::moderate, StemVariant::heavy}) {
                    stemmers.push_back({std::string(to_string(v)), [v](std::string_view w) { return stem(w, v); }});
                }
                const auto report = evaluate_stemmers(groups, stemmers);
                if (format != "text" && format != "csv") throw ValidationError("--format must be text or csv");
                std::cout << (format == "csv" ? report.to_csv() : report.to_text());
            } else {
                if (words.empty()) throw ValidationError("stem needs words or --groups");
                const Stemmer stemmer(parse_stem_variant(variant));
                for (const auto& w : words) std::cout << stemmer.stem(std::string_view(w)) << "\n";
            }
        } else if (stop_cmd->parsed()) {
            const auto docs = read_documents(docs_path);
            std::vector<TokenStream> corpus;
            for (const auto& d : docs) corpus.push_back(normalize(d.title + "\n" + d.content, NormConfig{}));
            const auto m = parse_candidate_method(method);
            const bool graph_method =
                m == CandidateMethod::in_degree || m == CandidateMethod::out_degree || m == CandidateMethod::degree;
            const auto candidates = graph_method ? rank_candidates(build_graph(corpus), m, top_n)
                                                 : rank_candidates(score_terms(corpus), m, top_n);
            for (const auto& c : candidates) std::cout << c << "\n";
            if (!truth.empty()) {
                const auto list = truth == "bundled" ? StopwordList::bundled() : StopwordList::load(truth);
                for (const auto& [n, p] : precision_at(candidates, list, stop_cutoffs)) {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "%.4f", p);
                    std::cerr << "P@" << n << " " << buf << "\n";
                }
            }
        } else if (pool_cmd->parsed()) {
            const auto idx = InvertedIndex::load(index_dir);
            const auto topics = read_topics(topics_path);
            RankParams a;
            a.model = parse_model(model_a);
            RankParams b;
            b.model = parse_model(model_b);
            const auto pools = build_pools(topics, idx, depth, a, b, threads);
            write_pools(out_path, pools);
            std::cout << "pools: " << pools.pools.size() << "\nempty topics: " << pools.empty_topics.size() << "\n";
        } else if (serve_cmd->parsed()) {
            JudgeStore store(store_dir, read_pools(pools_path), JudgeConfig::load(judge_config));
            JudgeServer server(store, topics_path.empty() ? std::vector<Topic>{} : read_topics(topics_path),
                               docs_path.empty() ? std::vector<Document>{} : read_documents(docs_path), rule);
            const int bound = server.bind(host, port);
            std::cout << "listening on http://" << host << ":" << bound << std::endl;
            server.run();
        } else if (grid_cmd->parsed()) {
            const char* env = std::getenv("TETUN_DATA_DIR");
            const std::filesystem::path data_dir =
                env && *env ? std::filesystem::path(env) : std::filesystem::path(grid_config).parent_path();
            const auto config = GridConfig::load(grid_config, data_dir, overrides);
            std::filesystem::create_directories(grid_out);
            std::ofstream log(std::filesystem::path(grid_out) / "grid.log", std::ios::app);
            const auto result = run_grid(config, grid_out, {workers, &log});
            std::cout << result.markdown;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
    return exit_ok;
}
