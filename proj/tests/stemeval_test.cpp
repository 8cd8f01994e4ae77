#include "tetun/stemeval.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tetun/error.hpp"
#include "tetun/stemmer.hpp"

using namespace tetun;

namespace {

std::string identity(std::string_view w) { return std::string(w); }

ConceptGroups make(std::vector<std::vector<std::string>> words)
{
    std::vector<ConceptGroup> g;
    for (std::size_t i = 0; i < words.size(); ++i) g.push_back({"g" + std::to_string(i), std::move(words[i])});
    return ConceptGroups(std::move(g));
}

}  // namespace

TEST(Paice, PerfectConflationSingleGroup)
{
    const auto r = paice_indices(make({{"a", "b"}}), [](std::string_view) { return std::string("s"); });
    EXPECT_EQ(r.ui, 0.0);
    EXPECT_EQ(r.oi, 0.0);
    EXPECT_FALSE(r.sw.has_value());
}

TEST(Paice, IdentityOnTwoPairs)
{
    const auto r = paice_indices(make({{"aa", "ab"}, {"ba", "bb"}}), identity);
    EXPECT_EQ(r.ui, 1.0);
    EXPECT_EQ(r.oi, 0.0);
    EXPECT_EQ(r.counts, (PaiceCounts{2, 2, 4, 0}));
    EXPECT_EQ(r.sw, 0.0);
}

TEST(Paice, SingletonGroupsGiveZeroUi)
{
    const auto r = paice_indices(make({{"a"}, {"b"}, {"c"}}), [](std::string_view) { return std::string("x"); });
    EXPECT_EQ(r.ui, 0.0);
    EXPECT_EQ(r.oi, 1.0);
    EXPECT_FALSE(r.sw.has_value());
}

TEST(Paice, TooFewWords)
{
    EXPECT_THROW(paice_indices(make({{"a"}}), identity), ValidationError);
}

TEST(Paice, FirstLetterTruncationHandCase)
{
    // n=1 stems: {a, a} and {a, b}. Group 2 splits one pair; stem "a" merges two cross pairs.
    const auto r = truncation_baseline(make({{"ab", "ac"}, {"ad", "bx"}}), 1);
    EXPECT_EQ(r.ui, 0.5);
    EXPECT_EQ(r.oi, 0.5);
    EXPECT_EQ(r.sw, 1.0);
}

TEST(Paice, LongTruncationIsIdentity)
{
    const auto g = make({{"komunikasaun", "komunikadu"}, {"ema", "emar"}});
    const auto t = truncation_baseline(g, 40);
    const auto i = paice_indices(g, identity);
    EXPECT_EQ(t.counts, i.counts);
    EXPECT_THROW(truncation_baseline(g, 0), ValidationError);
}

TEST(Paice, TruncationCountsCodePoints)
{
    EXPECT_EQ(truncate_word("dór", 2), "dó");
    EXPECT_EQ(truncate_word("ab", 5), "ab");
}

TEST(Paice, MatchesPairCountingOracle)
{
    std::mt19937_64 rng(21);
    for (int round = 0; round < 50; ++round) {
        std::uniform_int_distribution<int> group_count(1, 40);
        std::uniform_int_distribution<int> group_size(1, 8);
        std::uniform_int_distribution<int> stem_pick(0, 30);
        std::vector<std::vector<std::string>> words;
        std::vector<std::vector<std::string>> stems;
        std::map<std::string, std::string> mapping;
        int next = 0;
        const int gc = group_count(rng);
        for (int g = 0; g < gc && next < 200; ++g) {
            words.emplace_back();
            stems.emplace_back();
            const int size = group_size(rng);
            for (int k = 0; k < size && next < 200; ++k, ++next) {
                const auto w = "w" + std::to_string(next);
                // Stems mostly follow the group with random strays, so all four sums are nonzero.
                const auto s = stem_pick(rng) < 25 ? "g" + std::to_string(g) : "s" + std::to_string(stem_pick(rng) % 5);
                words.back().push_back(w);
                stems.back().push_back(s);
                mapping[w] = s;
            }
        }
        if (next < 2) continue;
        const auto r = paice_indices(make(words), [&](std::string_view w) { return mapping.at(std::string(w)); });
        const auto o = oracle::paice_pairs(words, stems);
        const double ui = o.same_group == 0 ? 0.0 : o.same_group_split / o.same_group;
        const double oi = o.cross_group == 0 ? 0.0 : o.cross_group_merged / o.cross_group;
        ASSERT_NEAR(r.ui, ui, 1e-12);
        ASSERT_NEAR(r.oi, oi, 1e-12);
        ASSERT_EQ(static_cast<double>(r.counts.desired_merge), o.same_group);
        ASSERT_EQ(static_cast<double>(r.counts.wrongly_merged), o.cross_group_merged);
        ASSERT_GE(r.ui, 0.0);
        ASSERT_LE(r.ui, 1.0);
        ASSERT_GE(r.oi, 0.0);
        ASSERT_LE(r.oi, 1.0);
    }
}

TEST(Errt, PointOnLineIsOne)
{
    const UiOiPoint line[] = {{0.5, 0.25}, {0.25, 0.5}};
    EXPECT_EQ(errt({0.375, 0.375}, line), 1.0);
    EXPECT_EQ(errt({0.5, 0.25}, line), 1.0);
}

TEST(Errt, MidpointIsHalf)
{
    const UiOiPoint line[] = {{0.5, 0.25}, {0.25, 0.5}};
    EXPECT_EQ(errt({0.1875, 0.1875}, line), 0.5);
}

TEST(Errt, ScaleInvariant)
{
    const UiOiPoint line[] = {{0.40, 0.00010}, {0.35, 0.00020}, {0.30, 0.00050}};
    const UiOiPoint p{0.31, 0.000017};
    const double base = errt(p, line);
    for (double k : {0.5, 2.0, 10.0}) {
        std::vector<UiOiPoint> scaled;
        for (auto q : line) scaled.push_back({q.ui * k, q.oi * k});
        EXPECT_NEAR(errt({p.ui * k, p.oi * k}, scaled), base, 1e-12);
    }
}

TEST(Errt, ExtendsEndSegments)
{
    // The ray along the UI axis passes below the last point; extension of the final segment catches it.
    const UiOiPoint line[] = {{0.2, 0.4}, {0.4, 0.2}};
    EXPECT_NEAR(errt({0.3, 0.0}, line), 0.5, 1e-15);
    // Steep ray meets the extension of the first segment.
    EXPECT_NEAR(errt({0.0, 0.3}, line), 0.5, 1e-15);
}

TEST(Errt, Errors)
{
    const UiOiPoint line[] = {{0.2, 0.4}, {0.4, 0.2}};
    EXPECT_THROW(errt({0.0, 0.0}, line), ValidationError);
    EXPECT_THROW(errt({0.1, 0.1}, std::span<const UiOiPoint>(line, 1)), ValidationError);
    // Parallel to the only segment: no intersection.
    const UiOiPoint flat[] = {{0.1, 0.2}, {0.2, 0.4}};
    EXPECT_THROW(errt({0.3, 0.6}, flat), Error);
}

TEST(ConceptGroups, ParsesListingFormat)
{
    const auto g = ConceptGroups::parse(R"(
'eskola': ['eskola', 'eskolas', "eskolár"]
`hakerek`: [`hakerek', 'hakerek-na'in']
  ‘uma’: [‘uma’]
)");
    ASSERT_EQ(g.groups().size(), 3u);
    EXPECT_EQ(g.groups()[0], (ConceptGroup{"eskola", {"eskola", "eskolas", "eskolár"}}));
    EXPECT_EQ(g.groups()[1], (ConceptGroup{"hakerek", {"hakerek", "hakerek-na'in"}}));
    EXPECT_EQ(g.groups()[2], (ConceptGroup{"uma", {"uma"}}));
    EXPECT_EQ(g.word_count(), 6u);
}

TEST(ConceptGroups, Validation)
{
    EXPECT_THROW(ConceptGroups::parse("'a': []"), ValidationError);
    EXPECT_THROW(ConceptGroups::parse("'a': ['x']\n'b': ['x']"), ValidationError);
    EXPECT_THROW(ConceptGroups::parse("'a': ['x']\n'a': ['y']"), ValidationError);
    EXPECT_THROW(ConceptGroups::parse("'a' ['x']"), ParseError);
    EXPECT_THROW(ConceptGroups::parse("'a': 'x'"), ParseError);
}

TEST(Report, StemmerRowsAndTruncationLine)
{
    const auto g = ConceptGroups::parse(R"(
'komunik': ['komunikasaun', 'komunikadu', 'komunikativa', 'komunikadór']
'selebr': ['selebrasaun', 'selebra']
'estud': ['estudante', 'estudantes', 'estuda']
'estrada': ['estrada', 'estradas']
)");
    const NamedStemmer stemmers[] = {
        {"light", [](std::string_view w) { return stem(w, StemVariant::light); }},
        {"identity", identity},
    };
    const std::size_t lengths[] = {3, 8};
    const auto r = evaluate_stemmers(g, stemmers, lengths);
    ASSERT_EQ(r.rows.size(), 2u);
    ASSERT_EQ(r.truncation_line.size(), 2u);
    EXPECT_EQ(r.rows[1].indices.ui, 1.0);
    const auto text = r.to_text();
    EXPECT_NE(text.find("trunc-8"), std::string::npos);
    EXPECT_TRUE(r.rows[0].errt.has_value());
    EXPECT_LT(*r.rows[0].errt, *r.rows[1].errt);
    EXPECT_NE(text.find("identity"), std::string::npos);
    const auto csv = r.to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,ui,oi,sw,errt");
}
