#include "tetun/stopwords.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tetun/error.hpp"

namespace tetun {

void TermStatistics::add_document(std::span<const std::string> tokens)
{
    ++m_documents;
    std::unordered_set<std::string_view> seen;
    for (const auto& t : tokens) {
        auto& c = m_counts[t];
        ++c.tf;
        if (seen.insert(t).second) {
            ++c.df;
        }
    }
}

void TermStatistics::merge(const TermStatistics& other)
{
    m_documents += other.m_documents;
    for (const auto& [term, c] : other.m_counts) {
        auto& mine = m_counts[term];
        mine.tf += c.tf;
        mine.df += c.df;
    }
}

std::vector<TermScore> TermStatistics::scores() const
{
    if (m_documents == 0) {
        throw ValidationError("cannot score terms of an empty corpus");
    }
    std::vector<TermScore> out;
    out.reserve(m_counts.size());
    const auto n = static_cast<double>(m_documents);
    for (const auto& [term, c] : m_counts) {
        const double idf = std::log(n / static_cast<double>(c.df));
        out.push_back({term, c.tf, c.df, idf, static_cast<double>(c.tf) * idf});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.term < b.term; });
    return out;
}

std::vector<TermScore> score_terms(std::span<const TokenStream> corpus)
{
    TermStatistics stats;
    for (const auto& doc : corpus) {
        stats.add_document(doc);
    }
    return stats.scores();
}

std::uint32_t CooccurrenceGraph::intern(const std::string& term)
{
    auto [it, inserted] = m_ids.try_emplace(term, static_cast<std::uint32_t>(m_names.size()));
    if (inserted) {
        m_names.push_back(term);
        m_in.push_back(0);
        m_out.push_back(0);
    }
    return it->second;
}

void CooccurrenceGraph::add_edge(std::uint32_t from, std::uint32_t to)
{
    const std::uint64_t key = (static_cast<std::uint64_t>(from) << 32) | to;
    if (m_edges.insert(key).second) {
        ++m_out[from];
        ++m_in[to];
    }
}

void CooccurrenceGraph::add_document(std::span<const std::string> tokens)
{
    std::uint32_t prev = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto id = intern(tokens[i]);
        if (i > 0) {
            add_edge(prev, id);
        }
        prev = id;
    }
}

void CooccurrenceGraph::merge(const CooccurrenceGraph& other)
{
    std::vector<std::uint32_t> remap(other.m_names.size());
    for (std::size_t i = 0; i < other.m_names.size(); ++i) {
        remap[i] = intern(other.m_names[i]);
    }
    // Insert in sorted key order so the result does not depend on hash iteration order.
    std::vector<std::uint64_t> keys(other.m_edges.begin(), other.m_edges.end());
    std::sort(keys.begin(), keys.end());
    for (auto key : keys) {
        add_edge(remap[key >> 32], remap[key & 0xFFFFFFFFu]);
    }
}

bool CooccurrenceGraph::has_node(std::string_view term) const { return m_ids.contains(std::string(term)); }

bool CooccurrenceGraph::has_edge(std::string_view from, std::string_view to) const
{
    auto a = m_ids.find(std::string(from));
    auto b = m_ids.find(std::string(to));
    if (a == m_ids.end() || b == m_ids.end()) {
        return false;
    }
    return m_edges.contains((static_cast<std::uint64_t>(a->second) << 32) | b->second);
}

CooccurrenceGraph::NodeDegree CooccurrenceGraph::degrees(std::string_view term) const
{
    auto it = m_ids.find(std::string(term));
    if (it == m_ids.end()) {
        return {std::string(term), 0, 0, 0};
    }
    const auto id = it->second;
    return {m_names[id], m_in[id], m_out[id], m_in[id] + m_out[id]};
}

std::vector<CooccurrenceGraph::NodeDegree> CooccurrenceGraph::nodes() const
{
    std::vector<NodeDegree> out;
    out.reserve(m_names.size());
    for (std::size_t id = 0; id < m_names.size(); ++id) {
        out.push_back({m_names[id], m_in[id], m_out[id], m_in[id] + m_out[id]});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.term < b.term; });
    return out;
}

CooccurrenceGraph build_graph(std::span<const TokenStream> corpus)
{
    CooccurrenceGraph g;
    for (const auto& doc : corpus) {
        g.add_document(doc);
    }
    return g;
}

std::string_view to_string(CandidateMethod m) noexcept
{
    switch (m) {
    case CandidateMethod::tf: return "tf";
    case CandidateMethod::idf: return "idf";
    case CandidateMethod::tfidf: return "tfidf";
    case CandidateMethod::in_degree: return "in_degree";
    case CandidateMethod::out_degree: return "out_degree";
    case CandidateMethod::degree: return "degree";
    }
    return "?";
}

CandidateMethod parse_candidate_method(std::string_view name)
{
    for (auto m : {CandidateMethod::tf, CandidateMethod::idf, CandidateMethod::tfidf, CandidateMethod::in_degree,
                   CandidateMethod::out_degree, CandidateMethod::degree}) {
        if (name == to_string(m)) {
            return m;
        }
    }
    throw ValidationError("unknown candidate method '" + std::string(name) + "'");
}

namespace {

template <typename T, typename Better>
std::vector<std::string> top_n(std::vector<std::pair<T, std::string>> scored, std::size_t n, Better better)
{
    const auto cmp = [&](const auto& a, const auto& b) {
        if (better(a.first, b.first)) return true;
        if (better(b.first, a.first)) return false;
        return a.second < b.second;
    };
    n = std::min(n, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), cmp);
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(std::move(scored[i].second));
    }
    return out;
}

}  // namespace

std::vector<std::string> rank_candidates(std::span<const TermScore> scores, CandidateMethod method, std::size_t n)
{
    if (n < 1) {
        throw ValidationError("candidate count must be at least 1");
    }
    if (method != CandidateMethod::tf && method != CandidateMethod::idf && method != CandidateMethod::tfidf) {
        throw ValidationError(std::string(to_string(method)) + " ranks a co-occurrence graph, not term scores");
    }
    std::vector<std::pair<double, std::string>> scored;
    scored.reserve(scores.size());
    for (const auto& s : scores) {
        const double v = method == CandidateMethod::tf    ? static_cast<double>(s.tf)
                         : method == CandidateMethod::idf ? s.idf
                                                          : s.tfidf;
        scored.emplace_back(v, s.term);
    }
    if (method == CandidateMethod::idf) {
        return top_n(std::move(scored), n, std::less<double>{});
    }
    return top_n(std::move(scored), n, std::greater<double>{});
}

std::vector<std::string> rank_candidates(const CooccurrenceGraph& graph, CandidateMethod method, std::size_t n)
{
    if (n < 1) {
        throw ValidationError("candidate count must be at least 1");
    }
    if (method != CandidateMethod::in_degree && method != CandidateMethod::out_degree
        && method != CandidateMethod::degree) {
        throw ValidationError(std::string(to_string(method)) + " ranks term scores, not a graph");
    }
    std::vector<std::pair<std::size_t, std::string>> scored;
    for (auto& node : graph.nodes()) {
        const std::size_t v = method == CandidateMethod::in_degree    ? node.in_degree
                              : method == CandidateMethod::out_degree ? node.out_degree
                                                                      : node.degree;
        scored.emplace_back(v, std::move(node.term));
    }
    return top_n(std::move(scored), n, std::greater<std::size_t>{});
}

std::map<std::size_t, double> precision_at(std::span<const std::string> candidates, const StopwordList& truth,
                                           std::span<const std::size_t> cutoffs)
{
    if (truth.empty()) {
        throw ValidationError("precision needs a non-empty ground-truth list");
    }
    std::map<std::size_t, double> out;
    for (auto n : cutoffs) {
        if (n == 0) {
            throw ValidationError("precision cutoff must be at least 1");
        }
        const auto limit = std::min(n, candidates.size());
        std::size_t hits = 0;
        for (std::size_t i = 0; i < limit; ++i) {
            hits += truth.contains(candidates[i]) ? 1 : 0;
        }
        out[n] = static_cast<double>(hits) / static_cast<double>(n);
    }
    return out;
}

}  // namespace tetun
