#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tetun/corpus.hpp"
#include "tetun/index.hpp"

namespace tetun {

enum class Model { tfidf, bm25, dfr_bm25, dirichlet_lm, hiemstra_lm };

inline constexpr Model all_models[] = {Model::tfidf, Model::bm25, Model::dfr_bm25, Model::dirichlet_lm,
                                       Model::hiemstra_lm};

std::string_view to_string(Model m) noexcept;
Model parse_model(std::string_view name);

struct RankParams {
    Model model = Model::bm25;
    double k1 = 1.2;
    double b = 0.75;
    double mu = 2500.0;
    double lambda = 0.15;

    /// Throws ValidationError unless k1 > 0, 0 <= b <= 1, mu > 0 and 0 < lambda < 1.
    void validate() const;

    friend bool operator==(const RankParams&, const RankParams&) = default;
};

struct TermStats {
    std::uint64_t df = 0;
    std::uint64_t cf = 0;
    /// Must equal CollectionStats::fingerprint.
    std::uint32_t fingerprint = 0;
};

/// Weight of one query term in one document:
///   bm25       qtf * max(0, ln((N-df+0.5)/(df+0.5))) * tf(k1+1)/(tf+K)
///   tfidf      qtf * tf/(tf+K) * ln(1+N/df)
///   dfr_bm25   qtf * log2((N+1)/(df+0.5)) * tf(k1+1)/(tf+K)
///   dirichlet  qtf * ln((tf + mu*cf/|C|)/(dl+mu))
///   hiemstra   qtf * ln(1 + lambda*tf*|C|/((1-lambda)*cf*dl))
/// with K = k1(1-b+b*dl/avdl). A term with df = 0 weighs 0. Throws Error when the
/// term statistics carry a different fingerprint than the collection statistics.
double term_weight(const RankParams& p, const CollectionStats& c, const TermStats& t, std::uint64_t qtf,
                   std::uint64_t tf, std::uint64_t dl);

struct ScoredDoc {
    std::string docno;
    double score = 0.0;

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

struct RankedList {
    int topic_id = 0;
    /// Ordered by score descending, then docno ascending.
    std::vector<ScoredDoc> docs;
    /// Set when the query normalized to nothing.
    bool empty_query = false;
};

/// Scores every document that contains at least one query term and keeps the top k.
/// The language models also add the smoothed weight of query terms absent from a
/// candidate document. Throws ValidationError for k = 0 or bad parameters.
RankedList search_terms(const InvertedIndex& index, std::span<const std::string> query_terms,
                        const RankParams& params, std::size_t k);

/// Normalizes the query with the index's configuration, then search_terms.
RankedList search(const InvertedIndex& index, std::string_view query, const RankParams& params, std::size_t k);

/// One TREC run line per retrieved document, ranks from 1.
std::vector<RunEntry> to_run(const RankedList& list, const std::string& run_tag);

}  // namespace tetun
