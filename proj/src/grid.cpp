#include "tetun/grid.hpp"

#include <zlib.h>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tetun/corpus.hpp"
#include "tetun/error.hpp"
#include "tetun/parallel.hpp"

namespace tetun {

namespace {

using nlohmann::json;

constexpr int cell_schema = 1;

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::vector<std::string> split_list(std::string_view key, std::string_view value, char sep = ',')
{
    std::vector<std::string> out;
    while (true) {
        const auto at = value.find(sep);
        const auto item = trim(value.substr(0, at));
        if (item.empty()) throw ValidationError("grid config: empty item in " + std::string(key));
        out.emplace_back(item);
        if (at == std::string_view::npos) break;
        value.remove_prefix(at + 1);
    }
    return out;
}

std::size_t parse_count(std::string_view key, std::string_view v)
{
    std::size_t n = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc{} || p != v.data() + v.size() || n == 0) {
        throw ValidationError("grid config: " + std::string(key) + " must be a positive integer, got '" +
                              std::string(v) + "'");
    }
    return n;
}

double parse_real(std::string_view key, std::string_view v)
{
    double x = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size()) {
        throw ValidationError("grid config: " + std::string(key) + " must be a number, got '" + std::string(v) + "'");
    }
    return x;
}

template <class T>
void require_unique(std::string_view key, const std::vector<T>& items)
{
    for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t j = i + 1; j < items.size(); ++j) {
            if (items[i] == items[j]) throw ValidationError("grid config: repeated entry in " + std::string(key));
        }
    }
}

std::uint32_t crc_of(std::string_view bytes)
{
    return static_cast<std::uint32_t>(
        ::crc32(0, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::string hex32(std::uint32_t v)
{
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", v);
    return buf;
}

std::string timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    ::gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_atomic(const std::filesystem::path& path, std::string_view text)
{
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw Error("cannot write " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string params_key(const RankParams& p)
{
    return std::string(to_string(p.model)) + " k1=" + format_score(p.k1) + " b=" + format_score(p.b) +
           " mu=" + format_score(p.mu) + " lambda=" + format_score(p.lambda);
}

std::string display_name(Model m)
{
    switch (m) {
        case Model::tfidf: return "TF-IDF";
        case Model::bm25: return "BM25";
        case Model::dfr_bm25: return "DFR BM25";
        case Model::dirichlet_lm: return "Dirichlet LM";
        case Model::hiemstra_lm: return "Hiemstra LM";
    }
    return "?";
}

std::string index_name(Field f, const NormConfig& n)
{
    return std::string(to_string(f)) + "-" + n.label();
}

// Mean values in column order: P@k..., MAP@k..., NDCG@k..., MAP, NDCG.
std::vector<double> metric_row(const MetricReport& r)
{
    std::vector<double> v(r.mean.precision);
    v.insert(v.end(), r.mean.map.begin(), r.mean.map.end());
    v.insert(v.end(), r.mean.ndcg.begin(), r.mean.ndcg.end());
    v.push_back(r.mean.map_all);
    v.push_back(r.mean.ndcg_all);
    return v;
}

std::vector<std::string> metric_names(const GridConfig& c)
{
    std::vector<std::string> out;
    for (const char* m : {"P", "MAP", "NDCG"}) {
        for (auto k : c.cutoffs) out.push_back(std::string(m) + "@" + std::to_string(k));
    }
    out.emplace_back("MAP");
    out.emplace_back("NDCG");
    return out;
}

const CellResult* baseline_for(const std::vector<CellResult>& cells, const GridCell& c)
{
    for (const auto& r : cells) {
        if (r.cell.field == c.field && r.cell.params == c.params && r.cell.norm == NormConfig{}) return &r;
    }
    return nullptr;
}

std::optional<double> change(double value, double base)
{
    if (base == 0.0) return std::nullopt;
    return 100.0 * (value - base) / base;
}

std::string decimals(double v, int places)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    return buf;
}

}  // namespace

NormConfig parse_strategy(std::string_view label)
{
    NormConfig c;
    label = trim(label);
    if (label == "baseline") return c;
    if (label.empty()) throw ValidationError("empty strategy label");
    std::set<std::string> seen;
    for (const auto& part : split_list("strategy", label, '+')) {
        if (!seen.insert(part.rfind("stem-", 0) == 0 ? "stem-" : part.rfind("maxlen-", 0) == 0 ? "maxlen-" : part)
                 .second) {
            throw ValidationError("strategy '" + std::string(label) + "' repeats " + part);
        }
        if (part == "no-apostrophes") {
            c.strip_apostrophes = true;
        } else if (part == "no-accents") {
            c.fold_accents = true;
        } else if (part == "no-hyphens") {
            c.split_hyphens = true;
        } else if (part == "no-stopwords") {
            c.remove_stopwords = true;
        } else if (part.rfind("stem-", 0) == 0) {
            c.stemmer = parse_stemmer_choice(std::string_view(part).substr(5));
            if (c.stemmer == StemmerChoice::none) throw ValidationError("strategy part '" + part + "' stems nothing");
        } else if (part.rfind("maxlen-", 0) == 0) {
            c.max_token_len = parse_count("maxlen", std::string_view(part).substr(7));
        } else {
            throw ValidationError("unknown strategy part '" + part + "'");
        }
    }
    c.validate();
    return c;
}

GridConfig GridConfig::parse(std::string_view text, const std::filesystem::path& data_dir)
{
    GridConfig c;
    std::optional<int> version;
    const auto path = [&](std::string_view v) {
        std::filesystem::path p{std::string(v)};
        return p.is_absolute() ? p : data_dir / p;
    };
    std::size_t line_no = 0;
    std::istringstream lines{std::string(text)};
    std::string raw;
    while (std::getline(lines, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("grid config line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = std::string(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        if (key == "version") {
            version = static_cast<int>(parse_count(key, value));
        } else if (key == "documents") {
            c.documents = path(value);
        } else if (key == "topics") {
            c.topics = path(value);
        } else if (key == "qrels") {
            c.qrels = path(value);
        } else if (key == "fields") {
            c.fields.clear();
            for (const auto& f : split_list(key, value)) c.fields.push_back(parse_field(f));
        } else if (key == "strategies") {
            c.strategies.clear();
            for (const auto& s : split_list(key, value)) c.strategies.push_back(parse_strategy(s));
        } else if (key == "models") {
            c.models.clear();
            for (const auto& m : split_list(key, value)) c.models.push_back(parse_model(m));
        } else if (key == "cutoffs") {
            c.cutoffs.clear();
            for (const auto& k : split_list(key, value)) c.cutoffs.push_back(parse_count(key, k));
        } else if (key == "depth") {
            c.depth = parse_count(key, value);
        } else if (key == "query") {
            if (value == "title") {
                c.query = QueryFields::title;
            } else if (value == "title+description") {
                c.query = QueryFields::title_description;
            } else {
                throw ValidationError("grid config: query must be title or title+description");
            }
        } else if (key == "gain") {
            c.gain = parse_gain(value);
        } else if (key == "k1") {
            c.params.k1 = parse_real(key, value);
        } else if (key == "b") {
            c.params.b = parse_real(key, value);
        } else if (key == "mu") {
            c.params.mu = parse_real(key, value);
        } else if (key == "lambda") {
            c.params.lambda = parse_real(key, value);
        } else {
            throw ValidationError("grid config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (!version) throw ValidationError("grid config: missing version");
    if (*version != grid_config_version) {
        throw ValidationError("grid config: version " + std::to_string(*version) + " is not supported");
    }
    if (c.documents.empty() || c.topics.empty() || c.qrels.empty()) {
        throw ValidationError("grid config: documents, topics and qrels are required");
    }
    require_unique("fields", c.fields);
    require_unique("strategies", c.strategies);
    require_unique("models", c.models);
    require_unique("cutoffs", c.cutoffs);
    c.params.validate();
    return c;
}

GridConfig GridConfig::load(const std::filesystem::path& path, const std::filesystem::path& data_dir,
                            const std::vector<std::string>& overrides)
{
    auto text = read_text(path);
    if (!text.empty() && text.back() != '\n') text += '\n';
    for (const auto& o : overrides) {
        if (o.find('=') == std::string::npos) throw ValidationError("override '" + o + "' is not key=value");
        text += o + '\n';
    }
    return parse(text, data_dir);
}

std::string GridCell::id() const
{
    return std::string(to_string(field)) + "-" + norm.label() + "-" + std::string(to_string(params.model));
}

std::vector<GridCell> grid_cells(const GridConfig& config)
{
    auto strategies = config.strategies;
    if (std::find(strategies.begin(), strategies.end(), NormConfig{}) == strategies.end()) {
        strategies.insert(strategies.begin(), NormConfig{});
    }
    std::vector<GridCell> out;
    for (auto f : config.fields) {
        for (const auto& s : strategies) {
            for (auto m : config.models) {
                auto p = config.params;
                p.model = m;
                out.push_back({f, s, p});
            }
        }
    }
    return out;
}

GridResult run_grid(const GridConfig& config, const std::filesystem::path& out_dir, const GridOptions& options)
{
    std::mutex log_mutex;
    const auto log = [&](const std::string& line) {
        if (!options.log) return;
        std::lock_guard lock(log_mutex);
        *options.log << timestamp() << ' ' << line << '\n' << std::flush;
    };

    const auto docs = read_documents(config.documents);
    const auto topics_text = read_text(config.topics);
    const auto topics = parse_topics(topics_text);
    const auto qrels = read_qrels(config.qrels);
    const auto qrels_tag = config.qrels.filename().string();
    log("grid start: " + std::to_string(docs.size()) + " documents, " + std::to_string(topics.size()) + " topics");

    std::map<Field, std::uint32_t> corpus;
    for (auto f : config.fields) corpus[f] = corpus_hash(docs, f);

    const auto cells = grid_cells(config);
    std::vector<std::string> keys;
    for (const auto& c : cells) {
        const std::string material = "cell-v1\n" + std::string(to_string(c.field)) + "\n" + c.norm.serialize() +
                                     params_key(c.params) + "\ndepth=" + std::to_string(config.depth) +
                                     "\nquery=" + (config.query == QueryFields::title ? "title" : "title+description") +
                                     "\ncorpus=" + hex32(corpus[c.field]) + "\ntopics=" + hex32(crc_of(topics_text));
        keys.push_back(hex32(crc_of(material)));
    }

    const auto cell_dir = [&](std::size_t i) { return out_dir / "cells" / cells[i].id(); };
    std::vector<std::vector<RunEntry>> runs(cells.size());
    std::vector<bool> reused(cells.size(), false);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto dir = cell_dir(i);
        try {
            if (!std::filesystem::exists(dir / "cell.json") || !std::filesystem::exists(dir / "run.txt")) continue;
            const auto meta = json::parse(read_text(dir / "cell.json"));
            if (meta.at("schema_version").get<int>() != cell_schema || meta.at("key").get<std::string>() != keys[i]) {
                continue;
            }
            runs[i] = read_run(dir / "run.txt");
            reused[i] = true;
            log("cell " + cells[i].id() + ": reusing finished run");
        } catch (const std::exception& e) {
            log("cell " + cells[i].id() + ": stored run unusable (" + e.what() + "), recomputing");
        }
    }

    // Indexes needed by the cells that still have to run.
    std::vector<std::pair<Field, NormConfig>> wanted;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (reused[i]) continue;
        const std::pair<Field, NormConfig> k{cells[i].field, cells[i].norm};
        if (std::find(wanted.begin(), wanted.end(), k) == wanted.end()) wanted.push_back(k);
    }
    std::vector<std::unique_ptr<InvertedIndex>> indexes(wanted.size());
    parallel_for(wanted.size(), options.workers, [&](std::size_t i) {
        const auto& [field, norm] = wanted[i];
        const auto dir = out_dir / "indexes" / index_name(field, norm);
        if (std::filesystem::exists(dir / "manifest.json")) {
            try {
                auto idx = InvertedIndex::load(dir);
                if (idx.field() == field && idx.config() == norm && idx.corpus_hash() == corpus.at(field)) {
                    indexes[i] = std::make_unique<InvertedIndex>(std::move(idx));
                    log("index " + index_name(field, norm) + ": loaded");
                    return;
                }
            } catch (const std::exception& e) {
                log("index " + index_name(field, norm) + ": stored copy unusable (" + e.what() + ")");
            }
        }
        indexes[i] = std::make_unique<InvertedIndex>(build_index(docs, field, norm, 1));
        const auto tmp = dir.string() + ".tmp";
        std::filesystem::remove_all(tmp);
        indexes[i]->save(tmp);
        std::filesystem::remove_all(dir);
        std::filesystem::rename(tmp, dir);
        log("index " + index_name(field, norm) + ": built");
    });

    parallel_for(cells.size(), options.workers, [&](std::size_t i) {
        if (reused[i]) return;
        const auto& cell = cells[i];
        const auto at = std::find(wanted.begin(), wanted.end(), std::pair{cell.field, cell.norm});
        const auto& index = *indexes[static_cast<std::size_t>(at - wanted.begin())];
        std::vector<RunEntry> run;
        for (const auto& t : topics) {
            const auto q = config.query == QueryFields::title ? t.title : t.title + " " + t.description;
            auto list = search(index, q, cell.params, config.depth);
            list.topic_id = t.topic_id;
            const auto entries = to_run(list, cell.id());
            run.insert(run.end(), entries.begin(), entries.end());
        }
        const auto dir = cell_dir(i);
        std::filesystem::create_directories(dir);
        std::ostringstream text;
        write_run(text, run);
        write_atomic(dir / "run.txt", text.str());
        const json meta{{"schema_version", cell_schema},
                        {"key", keys[i]},
                        {"cell", cell.id()},
                        {"field", std::string(to_string(cell.field))},
                        {"strategy", cell.norm.label()},
                        {"params", params_key(cell.params)},
                        {"run_entries", run.size()}};
        write_atomic(dir / "cell.json", meta.dump(2) + "\n");
        runs[i] = std::move(run);
        log("cell " + cell.id() + ": retrieved " + std::to_string(runs[i].size()) + " entries");
    });

    GridResult result;
    result.cells.resize(cells.size());
    parallel_for(cells.size(), options.workers, [&](std::size_t i) {
        auto report = evaluate_run(runs[i], qrels, config.cutoffs, config.gain, cells[i].id(), qrels_tag);
        write_atomic(cell_dir(i) / "metrics.csv", report.to_csv());
        result.cells[i] = {cells[i], std::move(report), reused[i]};
    });

    result.markdown = render_markdown(config, result.cells);
    result.csv = render_csv(config, result.cells);
    write_atomic(out_dir / "report.md", result.markdown);
    write_atomic(out_dir / "report.csv", result.csv);
    log("grid done: " + std::to_string(cells.size()) + " cells");
    return result;
}

std::string render_markdown(const GridConfig& config, const std::vector<CellResult>& cells)
{
    const auto names = metric_names(config);
    std::ostringstream out;
    out << "# Retrieval grid\n\n"
        << "query: " << (config.query == QueryFields::title ? "title" : "title+description")
        << "; depth: " << config.depth << "; ndcg gain: " << to_string(config.gain)
        << "; relevant: grade >= 1; values under the baseline are red\n";

    for (auto field : config.fields) {
        std::vector<std::vector<std::string>> rows;
        std::vector<std::string> header{"Strategy", "Model"};
        header.insert(header.end(), names.begin(), names.end());
        header.emplace_back("ΔMAP");
        header.emplace_back("ΔNDCG");
        rows.push_back(header);
        for (const auto& r : cells) {
            if (r.cell.field != field) continue;
            const auto* base = baseline_for(cells, r.cell);
            const auto values = metric_row(r.report);
            const auto base_values = base ? metric_row(base->report) : std::vector<double>{};
            std::vector<std::string> row{r.cell.norm.label(), display_name(r.cell.params.model)};
            for (std::size_t j = 0; j < values.size(); ++j) {
                const auto shown = decimals(values[j], 4);
                const bool below = base && values[j] < base_values[j];
                row.push_back(below ? "<span style=\"color:#CC0000\">" + shown + "</span>" : shown);
            }
            for (std::size_t j = values.size() - 2; j < values.size(); ++j) {
                if (!base || base == &r) {
                    row.emplace_back("");
                    continue;
                }
                const auto d = change(values[j], base_values[j]);
                row.push_back(d ? (*d >= 0 ? "+" : "") + decimals(*d, 2) + "%" : "n/a");
            }
            rows.push_back(std::move(row));
        }

        // Column widths counted in code points so the pipes line up in a terminal.
        const auto width = [](const std::string& s) {
            std::size_t n = 0;
            for (unsigned char ch : s) n += (ch & 0xC0) != 0x80 ? 1 : 0;
            return n;
        };
        std::vector<std::size_t> widths(header.size(), 3);
        for (const auto& row : rows) {
            for (std::size_t j = 0; j < row.size(); ++j) widths[j] = std::max(widths[j], width(row[j]));
        }
        out << "\n## " << to_string(field) << "\n\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out << '|';
            for (std::size_t j = 0; j < rows[i].size(); ++j) {
                const auto pad = std::string(widths[j] - width(rows[i][j]), ' ');
                out << ' ' << (j < 2 ? rows[i][j] + pad : pad + rows[i][j]) << " |";
            }
            out << '\n';
            if (i == 0) {
                out << '|';
                for (std::size_t j = 0; j < widths.size(); ++j) {
                    out << (j < 2 ? " " + std::string(widths[j], '-') + " |" : " " + std::string(widths[j] - 1, '-') + ": |");
                }
                out << '\n';
            }
        }
    }
    return out.str();
}

std::string render_csv(const GridConfig& config, const std::vector<CellResult>& cells)
{
    std::ostringstream out;
    out << "field,strategy,model";
    for (const auto& n : metric_names(config)) out << ',' << n;
    out << ",map_change_pct,ndcg_change_pct\n";
    for (const auto& r : cells) {
        const auto* base = baseline_for(cells, r.cell);
        const auto values = metric_row(r.report);
        out << to_string(r.cell.field) << ',' << r.cell.norm.label() << ',' << to_string(r.cell.params.model);
        for (double v : values) out << ',' << format_score(v);
        for (std::size_t j = values.size() - 2; j < values.size(); ++j) {
            out << ',';
            if (!base) continue;
            const auto d = change(values[j], metric_row(base->report)[j]);
            if (d) out << format_score(*d);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace tetun
