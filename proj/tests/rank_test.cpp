#include "tetun/rank.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tetun/error.hpp"

using namespace tetun;

namespace {

Document doc(std::string docno, std::string title)
{
    Document d;
    d.docno = std::move(docno);
    d.title = std::move(title);
    return d;
}

const std::vector<Document>& toy()
{
    static const std::vector<Document> docs{
        doc("d1", "uma boot iha dili"),  doc("d2", "uma ki'ik iha baukau uma"), doc("d3", "eskola iha dili"),
        doc("d4", "ema ba eskola"),      doc("d5", "dili boot tebes dili"),
    };
    return docs;
}

// Computed by hand from the per-term formulas, query "boot dili dili".
struct SheetRow {
    Model model;
    std::vector<ScoredDoc> expected;
};

const SheetRow sheet[] = {
    {Model::tfidf, {{"d5", 1.7655882394758859}, {"d1", 1.430304637373714}, {"d3", 0.97569402132056537}}},
    {Model::bm25, {{"d1", 0.32938031594301403}, {"d5", 0.32938031594301403}, {"d3", 0.0}}},
    {Model::dfr_bm25, {{"d5", 3.343641388650004}, {"d1", 2.7588485185041107}, {"d3", 1.7017799365516479}}},
    {Model::dirichlet_lm, {{"d5", -5.3609988040745975}, {"d1", -5.3647880059858295}, {"d3", -5.367382481859881}}},
    {Model::hiemstra_lm, {{"d5", 1.0501059095065006}, {"d1", 0.73054667210758262}, {"d3", 0.49280082695695387}}},
};

std::map<std::string, std::vector<std::string>> token_map(const std::vector<Document>& docs, const NormConfig& cfg)
{
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& d : docs) out[d.docno] = normalize(d.title, cfg);
    return out;
}

std::vector<Document> random_docs(std::mt19937_64& rng, std::size_t n, std::size_t vocab)
{
    std::uniform_int_distribution<std::size_t> len(1, 20);
    std::geometric_distribution<std::size_t> term(0.2);
    std::vector<Document> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        const auto l = len(rng);
        for (std::size_t k = 0; k < l; ++k) text += "t" + std::to_string(term(rng) % vocab) + " ";
        out.push_back(doc("doc" + std::to_string(1000 + i), text));
    }
    return out;
}

}  // namespace

TEST(Rank, HandSheetAllModels)
{
    const auto idx = build_index(toy(), Field::title, NormConfig{});
    for (const auto& row : sheet) {
        RankParams p;
        p.model = row.model;
        const auto r = search(idx, "boot dili dili", p, 10);
        ASSERT_EQ(r.docs.size(), row.expected.size()) << to_string(row.model);
        for (std::size_t i = 0; i < r.docs.size(); ++i) {
            EXPECT_EQ(r.docs[i].docno, row.expected[i].docno) << to_string(row.model) << " rank " << i + 1;
            EXPECT_NEAR(r.docs[i].score, row.expected[i].score, 1e-9) << to_string(row.model);
        }
    }
}

TEST(Rank, MatchesRecountingOracle)
{
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<std::size_t> qlen(1, 4);
    std::geometric_distribution<std::size_t> qterm(0.3);
    for (int round = 0; round < 30; ++round) {
        const auto docs = random_docs(rng, 12, 15);
        const auto idx = build_index(docs, Field::title, NormConfig{});
        const auto tokens = token_map(docs, NormConfig{});
        std::vector<std::string> query;
        for (std::size_t i = 0, n = qlen(rng); i < n; ++i) query.push_back("t" + std::to_string(qterm(rng) % 20));
        for (auto m : all_models) {
            RankParams p;
            p.model = m;
            const auto expected = oracle::rank_scores(tokens, query, std::string(to_string(m)));
            const auto r = search_terms(idx, query, p, 1000);
            ASSERT_EQ(r.docs.size(), expected.size());
            for (const auto& d : r.docs) ASSERT_NEAR(d.score, expected.at(d.docno), 1e-9) << to_string(m);
        }
    }
}

TEST(Rank, AbsentTermScoresNothing)
{
    const auto idx = build_index(toy(), Field::title, NormConfig{});
    for (auto m : all_models) {
        RankParams p;
        p.model = m;
        EXPECT_TRUE(search(idx, "kareta", p, 10).docs.empty());
        const TermStats none{0, 0, idx.stats().fingerprint};
        EXPECT_EQ(term_weight(p, idx.stats(), none, 1, 0, 4), 0.0);
    }
}

TEST(Rank, IdenticalDocumentsScoreAlike)
{
    const std::vector<Document> docs{doc("b", "uma boot"), doc("a", "uma boot"), doc("c", "eskola")};
    const auto idx = build_index(docs, Field::title, NormConfig{});
    for (auto m : all_models) {
        RankParams p;
        p.model = m;
        const auto r = search(idx, "uma", p, 10);
        ASSERT_EQ(r.docs.size(), 2u);
        EXPECT_EQ(r.docs[0].score, r.docs[1].score);
        EXPECT_EQ(r.docs[0].docno, "a");
    }
}

TEST(Rank, EqualScoresBreakByDocno)
{
    const std::vector<Document> docs{doc("doc2", "uma"), doc("doc1", "uma"), doc("doc3", "iha")};
    const auto idx = build_index(docs, Field::title, NormConfig{});
    const auto r = search(idx, "uma", RankParams{}, 10);
    ASSERT_EQ(r.docs.size(), 2u);
    EXPECT_EQ(r.docs[0].docno, "doc1");
    EXPECT_EQ(r.docs[1].docno, "doc2");
}

TEST(Rank, OrderIndependentOfPostingOrder)
{
    // Shuffling the input changes doc ids and therefore posting iteration order.
    std::mt19937_64 rng(42);
    auto docs = random_docs(rng, 200, 8);
    const auto base = build_index(docs, Field::title, NormConfig{});
    for (int round = 0; round < 10; ++round) {
        std::shuffle(docs.begin(), docs.end(), rng);
        const auto shuffled = build_index(docs, Field::title, NormConfig{});
        for (auto m : all_models) {
            RankParams p;
            p.model = m;
            const auto a = search(base, "t0 t1 t3 t1", p, 50);
            const auto b = search(shuffled, "t1 t3 t0 t1", p, 50);
            ASSERT_EQ(a.docs, b.docs) << to_string(m);
        }
    }
}

TEST(Rank, TruncatesToK)
{
    const auto idx = build_index(toy(), Field::title, NormConfig{});
    EXPECT_EQ(search(idx, "iha", RankParams{}, 2).docs.size(), 2u);
    EXPECT_EQ(search(idx, "iha", RankParams{}, 100).docs.size(), 3u);
    EXPECT_THROW(search(idx, "iha", RankParams{}, 0), ValidationError);
}

TEST(Rank, EmptyQueryIsFlagged)
{
    const auto idx = build_index(toy(), Field::title, NormConfig{});
    const auto r = search(idx, " ?! ", RankParams{}, 10);
    EXPECT_TRUE(r.empty_query);
    EXPECT_TRUE(r.docs.empty());
}

TEST(Rank, ParameterValidation)
{
    RankParams p;
    p.k1 = 0;
    EXPECT_THROW(p.validate(), ValidationError);
    p = {};
    p.b = 1.5;
    EXPECT_THROW(p.validate(), ValidationError);
    p = {};
    p.mu = -1;
    EXPECT_THROW(p.validate(), ValidationError);
    p = {};
    p.lambda = 1.0;
    EXPECT_THROW(p.validate(), ValidationError);
    EXPECT_EQ(parse_model("dfr_bm25"), Model::dfr_bm25);
    EXPECT_THROW(parse_model("lm"), ValidationError);
}

TEST(Rank, MismatchedStatisticsAreRejected)
{
    const auto a = build_index(toy(), Field::title, NormConfig{});
    const auto b = build_index(toy(), Field::content, NormConfig{});
    const TermStats foreign{1, 1, b.stats().fingerprint};
    EXPECT_THROW(term_weight(RankParams{}, a.stats(), foreign, 1, 1, 3), Error);
}

TEST(Rank, TermFrequencyMonotonicity)
{
    CollectionStats c{100, 1000, 300, 10.0, 0};
    for (auto m : {Model::bm25, Model::tfidf, Model::dfr_bm25}) {
        RankParams p;
        p.model = m;
        const TermStats t{5, 40, 0};
        double prev = -1;
        for (std::uint64_t tf = 0; tf <= 50; ++tf) {
            const double w = term_weight(p, c, t, 1, tf, 10);
            EXPECT_GE(w, prev);
            prev = w;
        }
    }
}

TEST(Rank, DirichletTendsToMaximumLikelihood)
{
    CollectionStats c{100, 1000, 300, 10.0, 0};
    RankParams p;
    p.model = Model::dirichlet_lm;
    p.mu = 1e-6;
    const TermStats t{5, 40, 0};
    EXPECT_NEAR(term_weight(p, c, t, 1, 3, 12), std::log(3.0 / 12.0), 1e-6);
}

TEST(Rank, HiemstraZeroMatchIsZero)
{
    CollectionStats c{100, 1000, 300, 10.0, 0};
    RankParams p;
    p.model = Model::hiemstra_lm;
    EXPECT_EQ(term_weight(p, c, TermStats{5, 40, 0}, 1, 0, 12), 0.0);
}

TEST(Rank, RunLines)
{
    const auto idx = build_index(toy(), Field::title, NormConfig{});
    auto r = search(idx, "dili", RankParams{}, 10);
    r.topic_id = 7;
    const auto run = to_run(r, "bm25");
    ASSERT_EQ(run.size(), 3u);
    EXPECT_EQ(run[0].rank, 1);
    EXPECT_EQ(run[2].rank, 3);
    EXPECT_EQ(run[0].topic_id, 7);
}
