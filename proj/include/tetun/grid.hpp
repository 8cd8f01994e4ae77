#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tetun/index.hpp"
#include "tetun/ireval.hpp"
#include "tetun/rank.hpp"
#include "tetun/textnorm.hpp"

namespace tetun {

inline constexpr int grid_config_version = 1;

/// Inverse of NormConfig::label(): "baseline", or parts such as "no-apostrophes",
/// "no-accents", "no-hyphens", "no-stopwords", "stem-light", "maxlen-40" joined by '+'.
NormConfig parse_strategy(std::string_view label);

enum class QueryFields { title, title_description };

/// Flat `key = value` experiment description. Lists are comma separated.
///
///   version    = 1
///   documents  = corpus.xml            (relative paths resolve against the data dir)
///   topics     = topics.xml
///   qrels      = qrels.txt
///   fields     = title, content
///   strategies = baseline, no-apostrophes, no-apostrophes+no-hyphens
///   models     = bm25, dfr_bm25, tfidf, dirichlet_lm, hiemstra_lm
///   cutoffs    = 5, 10, 20
///   depth      = 1000
///   query      = title                 (or title+description)
///   gain       = linear
///   k1, b, mu, lambda                  model parameters
struct GridConfig {
    std::filesystem::path documents;
    std::filesystem::path topics;
    std::filesystem::path qrels;
    std::vector<Field> fields{Field::title};
    /// The baseline is always evaluated; it is put first when missing here.
    std::vector<NormConfig> strategies{NormConfig{}};
    std::vector<Model> models{Model::bm25, Model::dfr_bm25, Model::tfidf, Model::dirichlet_lm, Model::hiemstra_lm};
    RankParams params;
    std::vector<std::size_t> cutoffs{std::begin(default_cutoffs), std::end(default_cutoffs)};
    std::size_t depth = 1000;
    QueryFields query = QueryFields::title;
    Gain gain = Gain::linear;

    /// Later lines override earlier ones. Throws ValidationError on unknown keys, bad
    /// values, a missing data path or an empty list.
    static GridConfig parse(std::string_view text, const std::filesystem::path& data_dir);
    /// Reads `path`, then applies each `key=value` override.
    static GridConfig load(const std::filesystem::path& path, const std::filesystem::path& data_dir,
                           const std::vector<std::string>& overrides = {});
};

struct GridCell {
    Field field = Field::title;
    NormConfig norm;
    RankParams params;

    /// `title-no-apostrophes-bm25`; also the cell's directory name.
    [[nodiscard]] std::string id() const;
};

/// Field-major, then strategy, then model, in config order.
std::vector<GridCell> grid_cells(const GridConfig& config);

struct CellResult {
    GridCell cell;
    MetricReport report;
    /// Retrieval was skipped because a finished run with the same inputs was on disk.
    bool reused = false;
};

struct GridResult {
    std::vector<CellResult> cells;
    std::string markdown;
    std::string csv;
};

struct GridOptions {
    unsigned workers = 1;
    /// Progress lines with timestamps; never part of the reports.
    std::ostream* log = nullptr;
};

/// Indexes, retrieves and evaluates every cell under `out_dir`:
///   indexes/<field>-<strategy>/   saved index
///   cells/<cell id>/run.txt, metrics.csv, cell.json
///   report.md, report.csv
/// A cell whose cell.json key matches its inputs keeps its run and is only re-evaluated.
GridResult run_grid(const GridConfig& config, const std::filesystem::path& out_dir, const GridOptions& options = {});

/// One table per field in the layout Strategy | Model | P@k... | MAP@k... | NDCG@k... | MAP | NDCG
/// plus MAP and NDCG change against the baseline row of the same model. Values under
/// the baseline are wrapped in a red span.
std::string render_markdown(const GridConfig& config, const std::vector<CellResult>& cells);
std::string render_csv(const GridConfig& config, const std::vector<CellResult>& cells);

}  // namespace tetun
