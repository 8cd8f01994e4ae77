#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tetun/corpus.hpp"
#include "tetun/index.hpp"
#include "tetun/rank.hpp"

namespace tetun {

inline constexpr std::size_t default_pool_depth = 100;
inline constexpr int pool_schema_version = 1;

enum class PoolSide { a, b };

struct PoolEntry {
    std::string docno;
    /// The list whose turn added this document.
    PoolSide drawn_from = PoolSide::a;
    /// 1-based rank in each source list, when present there.
    std::optional<std::size_t> rank_a;
    std::optional<std::size_t> rank_b;

    friend bool operator==(const PoolEntry&, const PoolEntry&) = default;
};

struct Pool {
    int topic_id = 0;
    std::vector<PoolEntry> entries;

    [[nodiscard]] std::vector<std::string> docnos() const;
    friend bool operator==(const Pool&, const Pool&) = default;
};

/// Takes turns starting with A. On its turn a list contributes its highest-ranked
/// document not yet pooled; once a list has nothing left the other one keeps going.
/// Stops at `depth` documents or when both lists are used up. Throws ValidationError
/// when either list repeats a docno.
Pool balanced_interleave(std::span<const std::string> a, std::span<const std::string> b, std::size_t depth);

struct PoolSet {
    std::size_t depth = default_pool_depth;
    RankParams model_a;
    RankParams model_b;
    std::vector<Pool> pools;  ///< ascending topic id
    /// Topics for which neither model retrieved anything.
    std::vector<int> empty_topics;

    [[nodiscard]] std::string to_json() const;
    static PoolSet from_json(std::string_view text);
    friend bool operator==(const PoolSet&, const PoolSet&) = default;
};

/// Queries each topic title with both models at k = depth and interleaves the results.
PoolSet build_pools(std::span<const Topic> topics, const InvertedIndex& index, std::size_t depth = default_pool_depth,
                    RankParams model_a = RankParams{Model::bm25}, RankParams model_b = RankParams{Model::dirichlet_lm},
                    unsigned threads = 1);

PoolSet read_pools(const std::filesystem::path& path);
void write_pools(const std::filesystem::path& path, const PoolSet& pools);

}  // namespace tetun
