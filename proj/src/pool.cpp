#include "tetun/pool.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "tetun/error.hpp"
#include "tetun/parallel.hpp"

namespace tetun {

namespace {

using nlohmann::json;

std::unordered_map<std::string_view, std::size_t> rank_map(std::span<const std::string> list, char name)
{
    std::unordered_map<std::string_view, std::size_t> ranks;
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (!ranks.emplace(list[i], i + 1).second) {
            throw ValidationError(std::string("list ") + name + " repeats docno " + list[i]);
        }
    }
    return ranks;
}

json params_json(const RankParams& p)
{
    return {{"model", std::string(to_string(p.model))}, {"k1", p.k1}, {"b", p.b}, {"mu", p.mu}, {"lambda", p.lambda}};
}

RankParams params_from_json(const json& j)
{
    RankParams p;
    p.model = parse_model(j.at("model").get<std::string>());
    p.k1 = j.at("k1").get<double>();
    p.b = j.at("b").get<double>();
    p.mu = j.at("mu").get<double>();
    p.lambda = j.at("lambda").get<double>();
    p.validate();
    return p;
}

json optional_rank(const std::optional<std::size_t>& r)
{
    return r ? json(*r) : json(nullptr);
}

std::optional<std::size_t> rank_from_json(const json& j)
{
    if (j.is_null()) return std::nullopt;
    return j.get<std::size_t>();
}

}  // namespace

std::vector<std::string> Pool::docnos() const
{
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.docno);
    return out;
}

Pool balanced_interleave(std::span<const std::string> a, std::span<const std::string> b, std::size_t depth)
{
    const auto ranks_a = rank_map(a, 'A');
    const auto ranks_b = rank_map(b, 'B');
    Pool pool;
    std::unordered_set<std::string_view> pooled;
    std::size_t ia = 0;
    std::size_t ib = 0;
    const auto skip = [&](std::span<const std::string> list, std::size_t& i) {
        while (i < list.size() && pooled.contains(list[i])) ++i;
        return i < list.size();
    };
    auto turn = PoolSide::a;
    while (pool.entries.size() < depth) {
        const bool has_a = skip(a, ia);
        const bool has_b = skip(b, ib);
        if (!has_a && !has_b) break;
        const auto side = turn == PoolSide::a ? (has_a ? PoolSide::a : PoolSide::b) : (has_b ? PoolSide::b : PoolSide::a);
        const auto& docno = side == PoolSide::a ? a[ia++] : b[ib++];
        pooled.insert(docno);
        PoolEntry e{docno, side, std::nullopt, std::nullopt};
        if (const auto it = ranks_a.find(docno); it != ranks_a.end()) e.rank_a = it->second;
        if (const auto it = ranks_b.find(docno); it != ranks_b.end()) e.rank_b = it->second;
        pool.entries.push_back(std::move(e));
        turn = turn == PoolSide::a ? PoolSide::b : PoolSide::a;
    }
    return pool;
}

std::string PoolSet::to_json() const
{
    json j;
    j["schema_version"] = pool_schema_version;
    j["depth"] = depth;
    j["first_turn"] = "a";
    j["model_a"] = params_json(model_a);
    j["model_b"] = params_json(model_b);
    j["empty_topics"] = empty_topics;
    j["pools"] = json::array();
    for (const auto& p : pools) {
        json entry;
        entry["topic_id"] = p.topic_id;
        entry["docnos"] = p.docnos();
        entry["provenance"] = json::array();
        for (const auto& e : p.entries) {
            entry["provenance"].push_back({{"docno", e.docno},
                                           {"drawn_from", e.drawn_from == PoolSide::a ? "a" : "b"},
                                           {"rank_a", optional_rank(e.rank_a)},
                                           {"rank_b", optional_rank(e.rank_b)}});
        }
        j["pools"].push_back(std::move(entry));
    }
    return j.dump(2) + "\n";
}

PoolSet PoolSet::from_json(std::string_view text)
{
    try {
        const auto j = json::parse(text);
        if (j.at("schema_version").get<int>() != pool_schema_version) {
            throw ValidationError("pool file schema_version " + j.at("schema_version").dump() + " is not supported");
        }
        PoolSet set;
        set.depth = j.at("depth").get<std::size_t>();
        set.model_a = params_from_json(j.at("model_a"));
        set.model_b = params_from_json(j.at("model_b"));
        set.empty_topics = j.at("empty_topics").get<std::vector<int>>();
        std::set<int> seen;
        for (const auto& p : j.at("pools")) {
            Pool pool;
            pool.topic_id = p.at("topic_id").get<int>();
            if (!seen.insert(pool.topic_id).second) {
                throw ValidationError("pool file lists topic " + std::to_string(pool.topic_id) + " twice");
            }
            const auto docnos = p.at("docnos").get<std::vector<std::string>>();
            const auto& prov = p.at("provenance");
            if (prov.size() != docnos.size()) {
                throw ValidationError("topic " + std::to_string(pool.topic_id) + ": provenance and docnos differ in length");
            }
            std::unordered_set<std::string> unique;
            for (std::size_t i = 0; i < docnos.size(); ++i) {
                if (!unique.insert(docnos[i]).second) {
                    throw ValidationError("topic " + std::to_string(pool.topic_id) + ": duplicate docno " + docnos[i]);
                }
                const auto& e = prov[i];
                if (e.at("docno").get<std::string>() != docnos[i]) {
                    throw ValidationError("topic " + std::to_string(pool.topic_id) + ": provenance out of order at " +
                                          docnos[i]);
                }
                const auto from = e.at("drawn_from").get<std::string>();
                if (from != "a" && from != "b") {
                    throw ValidationError("drawn_from must be a or b, got " + from);
                }
                pool.entries.push_back({docnos[i], from == "a" ? PoolSide::a : PoolSide::b,
                                        rank_from_json(e.at("rank_a")), rank_from_json(e.at("rank_b"))});
            }
            if (pool.entries.size() > set.depth) {
                throw ValidationError("topic " + std::to_string(pool.topic_id) + ": pool deeper than depth " +
                                      std::to_string(set.depth));
            }
            set.pools.push_back(std::move(pool));
        }
        return set;
    } catch (const json::exception& e) {
        throw ParseError(std::string("pool file: ") + e.what(), 0);
    }
}

PoolSet build_pools(std::span<const Topic> topics, const InvertedIndex& index, std::size_t depth, RankParams model_a,
                    RankParams model_b, unsigned threads)
{
    model_a.validate();
    model_b.validate();
    if (depth == 0) {
        throw ValidationError("pool depth must be at least 1");
    }
    std::vector<const Topic*> sorted;
    for (const auto& t : topics) sorted.push_back(&t);
    std::sort(sorted.begin(), sorted.end(), [](auto* x, auto* y) { return x->topic_id < y->topic_id; });

    PoolSet set;
    set.depth = depth;
    set.model_a = model_a;
    set.model_b = model_b;
    set.pools.resize(sorted.size());
    const Normalizer norm(index.config());
    parallel_for(sorted.size(), threads, [&](std::size_t i) {
        const auto terms = norm(sorted[i]->title);
        const auto ra = search_terms(index, terms, model_a, depth);
        const auto rb = search_terms(index, terms, model_b, depth);
        std::vector<std::string> a, b;
        for (const auto& d : ra.docs) a.push_back(d.docno);
        for (const auto& d : rb.docs) b.push_back(d.docno);
        set.pools[i] = balanced_interleave(a, b, depth);
        set.pools[i].topic_id = sorted[i]->topic_id;
    });
    for (const auto& p : set.pools) {
        if (p.entries.empty()) set.empty_topics.push_back(p.topic_id);
    }
    return set;
}

PoolSet read_pools(const std::filesystem::path& path)
{
    return PoolSet::from_json(read_text(path));
}

void write_pools(const std::filesystem::path& path, const PoolSet& pools)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << pools.to_json();
    if (!out) {
        throw Error("cannot write " + path.string());
    }
}

}  // namespace tetun
