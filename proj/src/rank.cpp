#include "tetun/rank.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tetun/error.hpp"

namespace tetun {

namespace {

std::string fmt(double v)
{
    return format_score(v);
}

double saturation(const RankParams& p, const CollectionStats& c, double tf, double dl)
{
    const double norm = c.avdl > 0.0 ? dl / c.avdl : 0.0;
    const double k = p.k1 * (1.0 - p.b + p.b * norm);
    return tf / (tf + k);
}

}  // namespace

std::string_view to_string(Model m) noexcept
{
    switch (m) {
        case Model::tfidf: return "tfidf";
        case Model::bm25: return "bm25";
        case Model::dfr_bm25: return "dfr_bm25";
        case Model::dirichlet_lm: return "dirichlet_lm";
        case Model::hiemstra_lm: return "hiemstra_lm";
    }
    return "?";
}

Model parse_model(std::string_view name)
{
    for (auto m : all_models) {
        if (to_string(m) == name) return m;
    }
    throw ValidationError("unknown model '" + std::string(name) +
                          "' (expected tfidf, bm25, dfr_bm25, dirichlet_lm or hiemstra_lm)");
}

void RankParams::validate() const
{
    if (!(k1 > 0.0) || !std::isfinite(k1)) throw ValidationError("k1 must be > 0, got " + fmt(k1));
    if (!(b >= 0.0 && b <= 1.0)) throw ValidationError("b must be in [0, 1], got " + fmt(b));
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ValidationError("mu must be > 0, got " + fmt(mu));
    if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("lambda must be in (0, 1), got " + fmt(lambda));
}

double term_weight(const RankParams& p, const CollectionStats& c, const TermStats& t, std::uint64_t qtf,
                   std::uint64_t tf, std::uint64_t dl)
{
    if (t.fingerprint != c.fingerprint) {
        throw Error("term statistics and collection statistics come from different indexes");
    }
    if (t.df == 0 || t.cf == 0) return 0.0;
    const double q = static_cast<double>(qtf);
    const double n = static_cast<double>(c.documents);
    const double df = static_cast<double>(t.df);
    const double f = static_cast<double>(tf);
    const double len = static_cast<double>(dl);
    switch (p.model) {
        case Model::bm25: {
            if (tf == 0) return 0.0;
            const double idf = std::max(0.0, std::log((n - df + 0.5) / (df + 0.5)));
            return q * idf * saturation(p, c, f, len) * (p.k1 + 1.0);
        }
        case Model::tfidf:
            if (tf == 0) return 0.0;
            return q * saturation(p, c, f, len) * std::log(1.0 + n / df);
        case Model::dfr_bm25:
            if (tf == 0) return 0.0;
            return q * std::log2((n + 1.0) / (df + 0.5)) * saturation(p, c, f, len) * (p.k1 + 1.0);
        case Model::dirichlet_lm: {
            const double background = static_cast<double>(t.cf) / static_cast<double>(c.total_tokens);
            return q * std::log((f + p.mu * background) / (len + p.mu));
        }
        case Model::hiemstra_lm:
            if (tf == 0) return 0.0;
            return q * std::log(1.0 + (p.lambda * f * static_cast<double>(c.total_tokens)) /
                                          ((1.0 - p.lambda) * static_cast<double>(t.cf) * len));
    }
    return 0.0;
}

RankedList search_terms(const InvertedIndex& index, std::span<const std::string> query_terms,
                        const RankParams& params, std::size_t k)
{
    params.validate();
    if (k == 0) {
        throw ValidationError("k must be at least 1");
    }
    RankedList out;
    if (query_terms.empty()) {
        out.empty_query = true;
        return out;
    }
    // Sorted, so the floating-point sum runs in the same order for every document.
    std::map<std::string_view, std::uint64_t> qtf;
    for (const auto& t : query_terms) ++qtf[t];

    const auto& stats = index.stats();
    struct Active {
        const TermInfo* info;
        std::uint64_t qtf;
    };
    std::vector<Active> active;
    for (const auto& [t, q] : qtf) {
        if (const auto* info = index.term(t)) active.push_back({info, q});
    }

    const bool smoothed = params.model == Model::dirichlet_lm;
    std::vector<double> score(index.document_count(), 0.0);
    std::vector<char> matched(index.document_count(), 0);
    std::vector<std::uint32_t> candidates;
    for (const auto& a : active) {
        for (const auto& posting : a.info->postings) {
            if (!matched[posting.doc]) {
                matched[posting.doc] = 1;
                candidates.push_back(posting.doc);
            }
        }
    }
    // Per-document accumulation in term order; a dense tf lookup per term keeps the
    // iteration order of postings out of the arithmetic.
    std::vector<std::uint32_t> tf(index.document_count(), 0);
    for (const auto& a : active) {
        for (const auto& posting : a.info->postings) tf[posting.doc] = posting.tf;
        const TermStats ts{a.info->df(), a.info->cf, stats.fingerprint};
        for (auto d : candidates) {
            if (tf[d] == 0 && !smoothed) continue;
            score[d] += term_weight(params, stats, ts, a.qtf, tf[d], index.doc_length(d));
        }
        for (const auto& posting : a.info->postings) tf[posting.doc] = 0;
    }

    std::vector<ScoredDoc> ranked;
    ranked.reserve(candidates.size());
    for (auto d : candidates) ranked.push_back({index.docno(d), score[d]});
    const auto better = [](const ScoredDoc& x, const ScoredDoc& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.docno < y.docno;
    };
    const auto keep = std::min(k, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(), better);
    ranked.resize(keep);
    out.docs = std::move(ranked);
    return out;
}

RankedList search(const InvertedIndex& index, std::string_view query, const RankParams& params, std::size_t k)
{
    const auto terms = Normalizer(index.config())(query);
    return search_terms(index, terms, params, k);
}

std::vector<RunEntry> to_run(const RankedList& list, const std::string& run_tag)
{
    std::vector<RunEntry> out;
    out.reserve(list.docs.size());
    int rank = 1;
    for (const auto& d : list.docs) out.push_back({list.topic_id, d.docno, rank++, d.score, run_tag});
    return out;
}

}  // namespace tetun
