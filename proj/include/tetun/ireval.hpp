#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tetun/corpus.hpp"

namespace tetun {

/// NDCG gain: the raw grade, or 2^grade - 1.
enum class Gain { linear, exponential };

std::string_view to_string(Gain g) noexcept;
Gain parse_gain(std::string_view name);

/// docno -> grade for one topic. Unjudged documents count as grade 0.
using Judgments = std::map<std::string, int, std::less<>>;

inline constexpr std::size_t default_cutoffs[] = {5, 10, 20};

/// Fraction of the first k positions holding a document of grade >= 1. A ranking
/// shorter than k is padded with non-relevant documents. Throws for k = 0.
double precision_at_k(std::span<const std::string> ranked, const Judgments& qrels, std::size_t k);

/// Sum of P@i over relevant hits at ranks i <= k, divided by the number of relevant
/// documents in qrels. No cutoff means the whole ranking. Throws ValidationError when
/// the topic has no relevant documents.
double average_precision(std::span<const std::string> ranked, const Judgments& qrels,
                         std::optional<std::size_t> k = std::nullopt);

/// DCG@k / IDCG@k with discount log2(i+1); 0 when IDCG is 0.
double ndcg_at_k(std::span<const std::string> ranked, const Judgments& qrels, std::optional<std::size_t> k = std::nullopt,
                 Gain gain = Gain::linear);

struct TopicMetrics {
    int topic_id = 0;
    std::vector<double> precision;  ///< one per cutoff
    std::vector<double> map;        ///< one per cutoff
    std::vector<double> ndcg;       ///< one per cutoff
    double map_all = 0.0;
    double ndcg_all = 0.0;

    friend bool operator==(const TopicMetrics&, const TopicMetrics&) = default;
};

struct MetricReport {
    std::string run_tag;
    std::string qrels_tag;
    Gain gain = Gain::linear;
    std::vector<std::size_t> cutoffs;
    /// Topics with at least one relevant judgment, ascending id.
    std::vector<TopicMetrics> topics;
    /// Arithmetic mean over `topics`; topic_id is 0.
    TopicMetrics mean;
    /// Run topics that have no judgments at all.
    std::vector<int> not_in_qrels;
    /// Judged topics without a relevant document; not evaluated.
    std::vector<int> no_relevant;
    /// Evaluated topics that the run never retrieved for; they score 0.
    std::vector<int> no_results;

    [[nodiscard]] std::vector<std::string> columns() const;
    /// `topic,P@5,...,NDCG`; one row per topic and a final `all` row.
    [[nodiscard]] std::string to_csv() const;
    /// Aligned table with a header naming the run, qrels and gain, four decimals.
    [[nodiscard]] std::string to_text() const;
};

MetricReport evaluate_run(std::span<const RunEntry> run, std::span<const Qrel> qrels,
                          std::span<const std::size_t> cutoffs = default_cutoffs, Gain gain = Gain::linear,
                          std::string run_tag = {}, std::string qrels_tag = {});

}  // namespace tetun
