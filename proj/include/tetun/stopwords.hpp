#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tetun/stopword_list.hpp"
#include "tetun/textnorm.hpp"

namespace tetun {

/// Corpus-level weights of one term. idf = ln(N / df), tfidf = tf * idf.
struct TermScore {
    std::string term;
    std::uint64_t tf = 0;
    std::uint64_t df = 0;
    double idf = 0.0;
    double tfidf = 0.0;

    friend bool operator==(const TermScore&, const TermScore&) = default;
};

/// Accumulates tf/df counts. Partial accumulators over disjoint document sets merge
/// to the same result as one accumulator over their union.
class TermStatistics {
  public:
    void add_document(std::span<const std::string> tokens);
    void merge(const TermStatistics& other);

    [[nodiscard]] std::uint64_t documents() const noexcept { return m_documents; }
    [[nodiscard]] std::size_t vocabulary_size() const noexcept { return m_counts.size(); }

    /// Scores sorted by term. Throws ValidationError when no document was added.
    [[nodiscard]] std::vector<TermScore> scores() const;

  private:
    struct Counts {
        std::uint64_t tf = 0;
        std::uint64_t df = 0;
    };
    std::unordered_map<std::string, Counts> m_counts;
    std::uint64_t m_documents = 0;
};

/// Throws ValidationError on an empty corpus.
std::vector<TermScore> score_terms(std::span<const TokenStream> corpus);

/// Directed word-adjacency graph. Each adjacent token pair (a, b) inside a document
/// contributes the edge a -> b once, however often it occurs; degrees count distinct
/// neighbours.
class CooccurrenceGraph {
  public:
    struct NodeDegree {
        std::string term;
        std::size_t in_degree = 0;
        std::size_t out_degree = 0;
        std::size_t degree = 0;

        friend bool operator==(const NodeDegree&, const NodeDegree&) = default;
    };

    void add_document(std::span<const std::string> tokens);
    void merge(const CooccurrenceGraph& other);

    [[nodiscard]] std::size_t node_count() const noexcept { return m_names.size(); }
    [[nodiscard]] std::size_t edge_count() const noexcept { return m_edges.size(); }
    [[nodiscard]] bool has_node(std::string_view term) const;
    [[nodiscard]] bool has_edge(std::string_view from, std::string_view to) const;
    /// Zero for unknown terms.
    [[nodiscard]] NodeDegree degrees(std::string_view term) const;
    /// All nodes sorted by term.
    [[nodiscard]] std::vector<NodeDegree> nodes() const;

  private:
    std::uint32_t intern(const std::string& term);
    void add_edge(std::uint32_t from, std::uint32_t to);

    std::unordered_map<std::string, std::uint32_t> m_ids;
    std::vector<std::string> m_names;
    std::vector<std::size_t> m_in;
    std::vector<std::size_t> m_out;
    std::unordered_set<std::uint64_t> m_edges;
};

CooccurrenceGraph build_graph(std::span<const TokenStream> corpus);

enum class CandidateMethod { tf, idf, tfidf, in_degree, out_degree, degree };

std::string_view to_string(CandidateMethod m) noexcept;
CandidateMethod parse_candidate_method(std::string_view name);

/// Top-n terms by tf or tfidf descending, or by idf ascending (most widespread first).
/// Ties break lexicographically ascending. Throws ValidationError for a graph method or n < 1.
std::vector<std::string> rank_candidates(std::span<const TermScore> scores, CandidateMethod method, std::size_t n);
/// Top-n terms by in-, out- or total degree descending, ties lexicographic.
std::vector<std::string> rank_candidates(const CooccurrenceGraph& graph, CandidateMethod method, std::size_t n);

inline constexpr std::size_t default_precision_cutoffs[] = {10, 25, 50, 75, 100, 250, 500, 750, 1000};

/// P@n = |top-n ∩ truth| / n for each cutoff; a candidate list shorter than n
/// still divides by n. Throws ValidationError on an empty truth list or a zero cutoff.
std::map<std::size_t, double> precision_at(std::span<const std::string> candidates, const StopwordList& truth,
                                           std::span<const std::size_t> cutoffs = default_precision_cutoffs);

}  // namespace tetun
