// Acceptance run: one PASS/FAIL/SKIP line per criterion, exit status 1 when any
// check fails or runs past its time budget.
//
// Checks that need the released collections run only when these are set:
//   TETUN_CONCEPT_GROUPS   concept-group file for the stemmer indices
//   TETUN_STOPWORD_DOCS    corpus XML for the in-degree stopword row
//   TETUN_JUDGMENTS        whitespace separated lines: assessor topic docno grade round
//   TETUN_REPRO_CONFIG     grid config naming the released documents, topics and qrels

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "stem_traces.hpp"
#include "tetun/corpus.hpp"
#include "tetun/error.hpp"
#include "tetun/grid.hpp"
#include "tetun/index.hpp"
#include "tetun/ireval.hpp"
#include "tetun/judge.hpp"
#include "tetun/pool.hpp"
#include "tetun/rank.hpp"
#include "tetun/stemeval.hpp"
#include "tetun/stemmer.hpp"
#include "tetun/stopword_list.hpp"
#include "tetun/stopwords.hpp"
#include "tetun/utf8.hpp"

using namespace tetun;

namespace {

// Tolerances.
constexpr double paice_tol = 1e-12;
constexpr double paice_data_tol = 1e-4;
constexpr double icf_tol = 0.005;
constexpr double stopword_data_tol = 0.01;
constexpr double rank_tol = 1e-9;
constexpr double metric_tol = 1e-12;
constexpr double kappa_data_tol = 0.0005;
constexpr double share_data_tol = 0.05;

struct Failed {
    std::string what;
};

struct Skipped {
    std::string why;
};

void require(bool ok, const std::string& what)
{
    if (!ok) throw Failed{what};
}

void near(double got, double want, double tol, const std::string& what)
{
    if (!(std::fabs(got - want) <= tol)) {
        std::ostringstream s;
        s.precision(17);
        s << what << ": got " << got << ", want " << want << " +/- " << tol;
        throw Failed{s.str()};
    }
}

std::optional<std::string> env(const char* name)
{
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

const std::filesystem::path fixtures(TETUN_FIXTURE_DIR);

Document doc(std::string docno, std::string title)
{
    Document d;
    d.docno = std::move(docno);
    d.title = std::move(title);
    return d;
}

// ---------------------------------------------------------------- stemmer

std::string stemmer_golden()
{
    require(stem("komunikasaun", StemVariant::light) == "komunik", "komunikasaun");
    require(stem("akontesimentu", StemVariant::light) == "akontes", "akontesimentu");
    require(stem("hemudór", StemVariant::moderate) == "hemu", "hemudór (moderate)");
    require(stem("hadame", StemVariant::heavy) == "dame", "hadame (heavy)");
    for (auto v : {StemVariant::light, StemVariant::moderate, StemVariant::heavy}) {
        for (std::string_view w : {"a", "ba", "iha", "han", "nak", "dór", "ó"}) {
            require(stem(w, v) == w, "short word " + std::string(w) + " changed");
        }
    }
    std::size_t n = 0;
    for (const auto& t : golden::stem_traces) {
        const auto r = Stemmer(t.variant).trace(utf8::decode(t.word));
        require(utf8::encode(r.stem) == t.expected, "trace " + std::string(t.word) + " -> " + utf8::encode(r.stem));
        require(r.step == t.step, "trace " + std::string(t.word) + " step " + std::string(to_string(r.step)));
        ++n;
    }
    require(n >= 20, "fewer than 20 traces");
    return std::to_string(n) + " traces";
}

std::u32string random_word(std::mt19937_64& rng, std::size_t max_len)
{
    static constexpr std::u32string_view letters = U"aeioubdfghklmnprstvzáéíóú";
    std::uniform_int_distribution<std::size_t> len(1, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
    std::u32string w(len(rng), U'a');
    for (auto& c : w) c = letters[pick(rng)];
    return w;
}

std::string region_oracle()
{
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 10000; ++i) {
        const auto w = random_word(rng, 16);
        const auto r = compute_regions(w);
        const StemRegions want{oracle::r1(w), oracle::r2(w), oracle::rv(w)};
        require(r == want, "regions differ for " + utf8::encode(w));
    }
    return "10000 words";
}

// ---------------------------------------------------------------- stemeval

std::string paice_oracle()
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::size_t> group_count(2, 40);
    std::uniform_int_distribution<std::size_t> group_size(1, 8);
    std::uniform_int_distribution<std::size_t> cut(1, 6);
    std::size_t checked = 0;
    for (int round = 0; round < 60; ++round) {
        std::vector<ConceptGroup> groups;
        std::set<std::u32string> seen;
        std::size_t words = 0;
        for (std::size_t g = 0, n = group_count(rng); g < n && words < 200; ++g) {
            ConceptGroup cg{"g" + std::to_string(g), {}};
            for (std::size_t k = 0, m = group_size(rng); k < m && words < 200; ++k) {
                auto w = random_word(rng, 9);
                if (!seen.insert(w).second) continue;
                cg.members.push_back(utf8::encode(w));
                ++words;
            }
            if (!cg.members.empty()) groups.push_back(std::move(cg));
        }
        if (words < 2) continue;
        const ConceptGroups set(groups);
        const std::size_t n = cut(rng);
        const StemFunction fn = [n](std::string_view w) { return truncate_word(w, n); };

        std::vector<std::vector<std::string>> members, stems;
        for (const auto& g : set.groups()) {
            members.push_back(g.members);
            stems.emplace_back();
            for (const auto& w : g.members) stems.back().push_back(fn(w));
        }
        const auto want = oracle::paice_pairs(members, stems);
        const auto got = paice_indices(set, fn);
        const double ui = want.same_group == 0 ? 0 : want.same_group_split / want.same_group;
        const double oi = want.cross_group == 0 ? 0 : want.cross_group_merged / want.cross_group;
        near(got.ui, ui, paice_tol, "UI");
        near(got.oi, oi, paice_tol, "OI");

        // Every point of the truncation line is its own reference.
        const auto line = std::vector<UiOiPoint>{{0.9, 0.01}, {0.6, 0.05}, {0.3, 0.2}};
        for (const auto& p : line) require(errt(p, line) == 1.0, "ERRT on the line is not 1");
        const UiOiPoint mid{(line[0].ui + line[1].ui) / 2, (line[0].oi + line[1].oi) / 2};
        near(errt(mid, line), 1.0, 1e-12, "ERRT at a segment midpoint");
        ++checked;
    }
    return std::to_string(checked) + " concept sets";
}

std::string paice_released()
{
    const auto path = env("TETUN_CONCEPT_GROUPS");
    if (!path) throw Skipped{"TETUN_CONCEPT_GROUPS not set"};
    const auto groups = ConceptGroups::load(*path);
    std::vector<NamedStemmer> stemmers;
    for (auto v : {StemVariant::light, StemVariant::moderate, StemVariant::heavy}) {
        stemmers.push_back({std::string(to_string(v)), [v](std::string_view w) { return stem(w, v); }});
    }
    const auto report = evaluate_stemmers(groups, stemmers);
    const double want_ui[] = {0.312062, 0.305049, 0.305049};
    const double want_errt[] = {0.481367, 0.472802, 0.472802};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& row = report.rows[i];
        near(row.indices.ui, want_ui[i], paice_data_tol, row.name + " UI");
        require(row.errt.has_value(), row.name + " has no ERRT");
        near(*row.errt, want_errt[i], paice_data_tol, row.name + " ERRT");
    }
    return std::to_string(groups.word_count()) + " words";
}

// ---------------------------------------------------------------- index

std::string icf_arithmetic()
{
    near(icf(25412, 17596), 30.76, icf_tol, "icf(25412, 17596)");
    near(icf(25412, 25258), 0.61, icf_tol, "icf(25412, 25258)");
    return "2 values";
}

// ---------------------------------------------------------------- stopwords

std::string stopword_oracle()
{
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<std::size_t> ndocs(1, 50);
    std::uniform_int_distribution<std::size_t> len(1, 30);
    std::geometric_distribution<std::size_t> term(0.15);
    for (int round = 0; round < 40; ++round) {
        oracle::Docs docs(ndocs(rng));
        for (auto& d : docs) {
            for (std::size_t k = 0, n = len(rng); k < n; ++k) d.push_back("w" + std::to_string(term(rng) % 60));
        }
        const auto want = oracle::term_scores(docs);
        const auto got = score_terms(docs);
        require(got.size() == want.size(), "vocabulary size");
        for (const auto& s : got) {
            const auto& e = want.at(s.term);
            require(static_cast<double>(s.tf) == e.tf && static_cast<double>(s.df) == e.df, "tf/df of " + s.term);
            require(s.idf == e.idf && s.tfidf == e.tfidf, "idf/tfidf of " + s.term);
        }

        const auto degrees = oracle::degrees(docs);
        CooccurrenceGraph graph;
        for (const auto& d : docs) graph.add_document(d);
        const auto nodes = graph.nodes();
        require(nodes.size() == degrees.size(), "node count");
        for (const auto& node : nodes) {
            const auto& e = degrees.at(node.term);
            require(node.in_degree == e.in && node.out_degree == e.out, "degrees of " + node.term);
            require(node.degree == node.in_degree + node.out_degree, "degree != in + out for " + node.term);
        }
    }

    // Ten bundled stopwords dominate every document; everything else is rare.
    const auto& truth = StopwordList::bundled();
    const std::vector<std::string> common(truth.entries().begin(), truth.entries().begin() + 10);
    oracle::Docs docs;
    for (int d = 0; d < 30; ++d) {
        std::vector<std::string> tokens;
        for (int rep = 0; rep < 3; ++rep) {
            for (const auto& w : common) {
                tokens.push_back(w);
                tokens.push_back("kontentu" + std::to_string(d) + "x" + std::to_string(rep));
            }
        }
        docs.push_back(tokens);
    }
    const auto scores = score_terms(docs);
    const std::size_t cut[] = {10};
    const auto by_tf = rank_candidates(scores, CandidateMethod::tf, 10);
    require(precision_at(by_tf, truth, cut).at(10) == 1.0, "P@10 by tf");
    require(oracle::precision(by_tf, std::set<std::string>(common.begin(), common.end()), 10) == 1.0,
            "oracle P@10 by tf");
    return "40 corpora, P@10 = 1";
}

std::string stopword_released()
{
    const auto path = env("TETUN_STOPWORD_DOCS");
    if (!path) throw Skipped{"TETUN_STOPWORD_DOCS not set"};
    const auto docs = read_documents(*path);
    CooccurrenceGraph graph;
    for (const auto& d : docs) graph.add_document(normalize(d.content, NormConfig{}));
    const auto ranked = rank_candidates(graph, CandidateMethod::in_degree, 1000);
    const std::map<std::size_t, double> want{{10, 1.0}, {25, 0.96}, {50, 0.84}, {1000, 0.193}};
    std::vector<std::size_t> cutoffs;
    for (const auto& [k, v] : want) cutoffs.push_back(k);
    const auto got = precision_at(ranked, StopwordList::bundled(), cutoffs);
    for (const auto& [k, v] : want) near(got.at(k), v, stopword_data_tol, "in-degree P@" + std::to_string(k));
    return std::to_string(docs.size()) + " documents";
}

// ---------------------------------------------------------------- rank

std::string ranking_oracle()
{
    const std::vector<Document> toy{
        doc("d1", "uma boot iha dili"), doc("d2", "uma ki'ik iha baukau uma"), doc("d3", "eskola iha dili"),
        doc("d4", "ema ba eskola"),     doc("d5", "dili boot tebes dili"),
    };
    struct Row {
        Model model;
        std::vector<ScoredDoc> expected;
    };
    // Worked by hand from the per-term formulas, query "boot dili dili".
    const Row sheet[] = {
        {Model::tfidf, {{"d5", 1.7655882394758859}, {"d1", 1.430304637373714}, {"d3", 0.97569402132056537}}},
        {Model::bm25, {{"d1", 0.32938031594301403}, {"d5", 0.32938031594301403}, {"d3", 0.0}}},
        {Model::dfr_bm25, {{"d5", 3.343641388650004}, {"d1", 2.7588485185041107}, {"d3", 1.7017799365516479}}},
        {Model::dirichlet_lm, {{"d5", -5.3609988040745975}, {"d1", -5.3647880059858295}, {"d3", -5.367382481859881}}},
        {Model::hiemstra_lm, {{"d5", 1.0501059095065006}, {"d1", 0.73054667210758262}, {"d3", 0.49280082695695387}}},
    };
    const auto idx = build_index(toy, Field::title, NormConfig{});
    for (const auto& row : sheet) {
        RankParams p;
        p.model = row.model;
        const auto r = search(idx, "boot dili dili", p, 10);
        const std::string name(to_string(row.model));
        require(r.docs.size() == row.expected.size(), name + " result count");
        for (std::size_t i = 0; i < r.docs.size(); ++i) {
            require(r.docs[i].docno == row.expected[i].docno, name + " order at rank " + std::to_string(i + 1));
            near(r.docs[i].score, row.expected[i].score, rank_tol, name + " " + r.docs[i].docno);
        }
    }

    // Shuffled input order changes posting order but not the ranking.
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<std::size_t> len(1, 12);
    std::geometric_distribution<std::size_t> term(0.25);
    std::vector<Document> docs;
    for (int i = 0; i < 150; ++i) {
        std::string text;
        for (std::size_t k = 0, n = len(rng); k < n; ++k) text += "t" + std::to_string(term(rng) % 8) + " ";
        docs.push_back(doc("doc" + std::to_string(1000 + i), text));
    }
    const auto base = build_index(docs, Field::title, NormConfig{});
    for (int round = 0; round < 5; ++round) {
        std::shuffle(docs.begin(), docs.end(), rng);
        const auto shuffled = build_index(docs, Field::title, NormConfig{});
        for (auto m : all_models) {
            RankParams p;
            p.model = m;
            require(search(base, "t0 t1 t3", p, 100).docs == search(shuffled, "t3 t0 t1", p, 100).docs,
                    std::string(to_string(m)) + " depends on posting order");
        }
    }

    // Moving a relevant document above a non-relevant one never lowers AP or NDCG.
    std::uniform_int_distribution<int> grade(0, 3);
    std::uniform_int_distribution<std::size_t> size(2, 30);
    std::size_t swaps = 0;
    for (int round = 0; round < 1000; ++round) {
        const std::size_t n = size(rng);
        std::vector<std::string> ranked;
        Judgments qrels;
        for (std::size_t i = 0; i < n; ++i) {
            ranked.push_back("r" + std::to_string(i));
            qrels[ranked.back()] = grade(rng);
        }
        qrels["r-extra"] = 1;
        std::shuffle(ranked.begin(), ranked.end(), rng);
        std::vector<std::size_t> rel, irr;
        for (std::size_t i = 0; i < n; ++i) (qrels.at(ranked[i]) >= 1 ? rel : irr).push_back(i);
        if (rel.empty() || irr.empty()) continue;
        const auto r = rel[std::uniform_int_distribution<std::size_t>(0, rel.size() - 1)(rng)];
        const auto i = irr[std::uniform_int_distribution<std::size_t>(0, irr.size() - 1)(rng)];
        if (i > r) continue;
        auto better = ranked;
        std::swap(better[i], better[r]);
        ++swaps;
        for (std::size_t k : {5u, 10u, 20u}) {
            require(average_precision(better, qrels, k) >= average_precision(ranked, qrels, k), "AP fell after swap");
            require(ndcg_at_k(better, qrels, k) + 1e-15 >= ndcg_at_k(ranked, qrels, k), "NDCG fell after swap");
        }
    }
    require(swaps >= 300, "too few swaps exercised");
    return "5 models, " + std::to_string(swaps) + " swaps";
}

// ---------------------------------------------------------------- ireval

std::string metric_fixtures()
{
    const Judgments ap_qrels{{"a", 1}, {"b", 0}, {"c", 1}};
    const std::vector<std::string> ap_run{"a", "b", "c"};
    require(average_precision(ap_run, ap_qrels) == (1.0 + 2.0 / 3.0) / 2.0, "AP (1+2/3)/2");
    const Judgments one{{"x", 1}, {"y", 0}};
    require(average_precision(std::vector<std::string>{"y", "x"}, one) == 0.5, "AP 1/2");

    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> grade(0, 3);
    std::uniform_int_distribution<std::size_t> size(1, 40);
    for (int round = 0; round < 500; ++round) {
        Judgments qrels;
        std::vector<std::string> docs;
        for (std::size_t i = 0, n = size(rng); i < n; ++i) {
            docs.push_back("d" + std::to_string(i));
            qrels[docs.back()] = grade(rng);
        }
        qrels["forced"] = 2;
        docs.push_back("forced");

        auto ideal = docs;
        std::stable_sort(ideal.begin(), ideal.end(),
                         [&](const auto& a, const auto& b) { return qrels.at(a) > qrels.at(b); });
        for (std::size_t k : {1u, 5u, 10u, 20u}) near(ndcg_at_k(ideal, qrels, k), 1.0, metric_tol, "ideal NDCG@k");
        near(ndcg_at_k(ideal, qrels), 1.0, metric_tol, "ideal NDCG");
        near(average_precision(ideal, qrels), 1.0, metric_tol, "ideal AP");

        // Reordering documents of equal grade, or renaming all of them, changes nothing.
        auto swapped = ideal;
        for (std::size_t i = 0; i + 1 < swapped.size(); ++i) {
            if (qrels.at(swapped[i]) == qrels.at(swapped[i + 1]) && rng() % 2 == 0) std::swap(swapped[i], swapped[i + 1]);
        }
        auto shuffled = docs;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        Judgments renamed;
        std::vector<std::string> renamed_run;
        for (const auto& [d, g] : qrels) renamed["z" + d + "z"] = g;
        for (const auto& d : shuffled) renamed_run.push_back("z" + d + "z");
        std::vector<int> grades, all;
        std::size_t rel = 0;
        for (const auto& d : shuffled) grades.push_back(qrels.at(d));
        for (const auto& [d, g] : qrels) {
            all.push_back(g);
            rel += g >= 1 ? 1 : 0;
        }
        for (std::size_t k : {5u, 10u, 20u}) {
            require(ndcg_at_k(swapped, qrels, k) == ndcg_at_k(ideal, qrels, k), "NDCG under equal-grade swap");
            require(precision_at_k(shuffled, qrels, k) == precision_at_k(renamed_run, renamed, k), "P@k relabel");
            require(average_precision(shuffled, qrels, k) == average_precision(renamed_run, renamed, k), "AP relabel");
            require(ndcg_at_k(shuffled, qrels, k) == ndcg_at_k(renamed_run, renamed, k), "NDCG relabel");
            near(average_precision(shuffled, qrels, k), oracle::ap_from_grades(grades, rel, k), metric_tol, "AP oracle");
            near(ndcg_at_k(shuffled, qrels, k), oracle::ndcg_from_grades(grades, all, k), metric_tol, "NDCG oracle");
        }
    }
    return "500 topics";
}

// ---------------------------------------------------------------- pool

std::string pooling_properties()
{
    std::mt19937_64 rng(61);
    std::uniform_int_distribution<std::size_t> len(0, 40);
    std::uniform_int_distribution<std::size_t> depth(1, 60);
    for (int round = 0; round < 1000; ++round) {
        const auto draw = [&] {
            std::vector<std::string> all;
            for (int i = 0; i < 50; ++i) all.push_back("d" + std::to_string(i));
            std::shuffle(all.begin(), all.end(), rng);
            all.resize(len(rng));
            return all;
        };
        const auto a = draw();
        const auto b = draw();
        const auto d = depth(rng);
        const auto pool = balanced_interleave(a, b, d);
        const auto want = oracle::interleave(a, b, d);
        require(pool.entries.size() == want.size(), "pool size differs from oracle");
        for (std::size_t i = 0; i < want.size(); ++i) {
            require(pool.entries[i].docno == want[i].first, "pool order differs from oracle");
            require((pool.entries[i].drawn_from == PoolSide::a ? 'a' : 'b') == want[i].second, "pool side differs");
        }

        const auto docs = pool.docnos();
        require(std::set<std::string>(docs.begin(), docs.end()).size() == docs.size(), "duplicate in pool");
        std::set<std::string> both(a.begin(), a.end());
        both.insert(b.begin(), b.end());
        require(docs.size() == std::min(d, both.size()), "pool size");

        std::set<std::string> taken;
        long from_a = 0, from_b = 0;
        const auto left = [&](const std::vector<std::string>& list) {
            return std::any_of(list.begin(), list.end(), [&](const auto& x) { return !taken.contains(x); });
        };
        for (const auto& e : pool.entries) {
            if (!left(a) || !left(b)) break;
            (e.drawn_from == PoolSide::a ? from_a : from_b) += 1;
            require(std::abs(from_a - from_b) <= 1, "sides drifted apart before exhaustion");
            taken.insert(e.docno);
        }
        require(balanced_interleave(a, b, d) == pool, "pool not deterministic");
    }
    return "1000 list pairs";
}

// ---------------------------------------------------------------- judge

std::vector<JudgmentRecord> pair_records(const std::vector<int>& r1, const std::vector<int>& r2 = {})
{
    std::vector<JudgmentRecord> out;
    for (std::size_t i = 0; i < r1.size(); ++i) out.push_back({"a" + std::to_string(i), 1, "d", r1[i], 1, ""});
    for (std::size_t i = 0; i < r2.size(); ++i) out.push_back({"a" + std::to_string(i), 1, "d", r2[i], 2, ""});
    return out;
}

std::string judgment_aggregation()
{
    require(first_round(std::vector<int>{2, 2, 2, 0, 1}).majority == 2, "3-of-5 majority");
    const auto split = first_round(std::vector<int>{2, 2, 1, 1, 0});
    require(!split.majority && split.options == TieOptions{2, 1}, "[2,2,1,1,0] is a tie between 2 and 1");

    std::size_t tied = 0, merged = 0;
    for (int code = 0; code < 1024; ++code) {
        std::vector<int> r1;
        for (int i = 0, c = code; i < 5; ++i, c /= 4) r1.push_back(c % 4);
        const auto want = oracle::round_one(r1);
        const auto got = first_round(r1);
        require(got.majority == want.majority, "majority");
        auto agg = aggregate(pair_records(r1));
        if (want.majority) {
            require(agg.resolved.size() == 1 && agg.resolved[0].grade == *want.majority, "majority pair");
            continue;
        }
        ++tied;
        require(got.options == TieOptions{want.first, want.second}, "tie options");
        require(agg.ties.size() == 1 && agg.resolved.empty(), "tie detection");
        for (int bits = 0; bits < 8; ++bits) {
            std::vector<int> r2;
            for (int i = 0; i < 3; ++i) r2.push_back((bits >> i) & 1 ? want.second : want.first);
            const auto [grade, broken] = oracle::merged_mode(r1, r2);
            const auto res = second_round(r1, got.options, r2);
            require(res.grade == grade, "eight-vote mode");
            require(res.status == (broken ? AggregateStatus::tie_broken : AggregateStatus::second_round),
                    "higher-grade tie-break status");
            agg = aggregate(pair_records(r1, r2));
            require(agg.resolved.size() == 1 && agg.resolved[0].grade == grade, "aggregate after round two");
            ++merged;
        }
    }
    require(tied == 600 && merged == 4800, "pattern counts");

    const std::vector<int> a{0, 1, 2, 3, 3, 1};
    require(cohen_kappa(a, a) == 1.0, "identical kappa");
    require(cohen_kappa(std::vector<int>{0, 0, 1, 1}, std::vector<int>{1, 1, 0, 0}) == -1.0, "anti-correlated kappa");
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> g(0, 3);
    for (int round = 0; round < 2000; ++round) {
        std::vector<int> x(1 + rng() % 30), y(x.size());
        for (auto& v : x) v = g(rng);
        for (auto& v : y) v = g(rng);
        const double k = cohen_kappa(x, y);
        require(k == cohen_kappa(y, x), "kappa not symmetric");
        require(k >= -1.0 && k <= 1.0, "kappa out of bounds");
    }
    return "1024 patterns, 600 ties";
}

std::string judgment_released()
{
    const auto path = env("TETUN_JUDGMENTS");
    if (!path) throw Skipped{"TETUN_JUDGMENTS not set"};
    std::ifstream in(*path);
    if (!in) throw Failed{"cannot open " + *path};
    std::vector<JudgmentRecord> records;
    JudgmentRecord r;
    while (in >> r.assessor >> r.topic_id >> r.docno >> r.grade >> r.round) records.push_back(r);

    std::map<std::pair<int, std::string>, std::vector<int>> first;
    for (const auto& rec : records) {
        if (rec.round == 1) first[{rec.topic_id, rec.docno}].push_back(rec.grade);
    }
    std::size_t ties = 0;
    for (const auto& [pair, votes] : first) ties += first_round(votes).majority ? 0 : 1;
    require(ties == 602, "ties: got " + std::to_string(ties) + ", want 602");
    near(100.0 * static_cast<double>(ties) / static_cast<double>(first.size()), 9.87, 0.005, "tie share %");

    const auto report = agreement(records);
    require(report.average.has_value(), "no kappa average");
    near(*report.average, 0.4236, kappa_data_tol, "average kappa");

    const auto exported = export_qrels(aggregate(records));
    double total = 0;
    for (auto c : exported.histogram) total += static_cast<double>(c);
    const double want[] = {63.24, 9.31, 17.86, 9.59};
    for (int grade = 0; grade < 4; ++grade) {
        near(100.0 * static_cast<double>(exported.histogram[grade]) / total, want[grade], share_data_tol,
             "grade " + std::to_string(grade) + " share %");
    }
    return std::to_string(first.size()) + " pairs";
}

// ---------------------------------------------------------------- grid

std::map<std::string, std::string> artifacts(const std::filesystem::path& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const auto rel = std::filesystem::relative(e.path(), dir).string();
        if (rel == "grid.log" || rel.rfind("indexes", 0) == 0) continue;
        out[rel] = read_text(e.path());
    }
    return out;
}

std::string grid_end_to_end()
{
    const auto dir = fixtures / "grid";
    const auto config = GridConfig::load(dir / "grid.conf", dir);
    const auto root = std::filesystem::temp_directory_path() / ("tetun-acceptance-" + std::to_string(::getpid()));
    std::filesystem::remove_all(root);
    run_grid(config, root / "w1", {1, nullptr});
    run_grid(config, root / "w1b", {1, nullptr});
    run_grid(config, root / "w4", {4, nullptr});
    const auto a = artifacts(root / "w1");
    const bool same = a == artifacts(root / "w1b") && a == artifacts(root / "w4");
    std::filesystem::remove_all(root);
    require(same, "artifacts differ between runs");
    require(a.contains("report.md") && a.contains("report.csv"), "reports missing");
    return std::to_string(a.size()) + " files";
}

std::string full_reproduction()
{
    const auto path = env("TETUN_REPRO_CONFIG");
    if (!path) throw Skipped{"TETUN_REPRO_CONFIG not set"};
    const std::filesystem::path p(*path);
    const auto config = GridConfig::load(p, p.parent_path(), {"cutoffs = 5, 10"});
    const auto docs = read_documents(config.documents);
    const auto topics = read_topics(config.topics);
    const auto qrels = read_qrels(config.qrels);
    const auto idx = build_index(docs, Field::title, parse_strategy("no-apostrophes+no-hyphens"));
    RankParams params = config.params;
    params.model = Model::dfr_bm25;
    std::vector<RunEntry> run;
    for (const auto& t : topics) {
        auto list = search(idx, t.title, params, config.depth);
        list.topic_id = t.topic_id;
        const auto lines = to_run(list, "repro");
        run.insert(run.end(), lines.begin(), lines.end());
    }
    const std::size_t cutoffs[] = {5, 10};
    const auto report = evaluate_run(run, qrels, cutoffs);
    std::ostringstream s;
    s.precision(4);
    s << std::fixed << "P@5 " << report.mean.precision[0] << " (0.8881), NDCG@10 " << report.mean.ndcg[1]
      << " (0.7356)";
    return s.str();
}

// ---------------------------------------------------------------- driver

struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<std::string()> run;
    /// Diagnostic only: a mismatch is reported but does not fail the run.
    bool gating = true;
};

}  // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {"stemmer-golden", 1, stemmer_golden},
        {"region-oracle", 5, region_oracle},
        {"paice-oracle", 5, paice_oracle},
        {"paice-released-groups", 5, paice_released},
        {"icf-arithmetic", 1, icf_arithmetic},
        {"stopword-oracle", 10, stopword_oracle},
        {"stopword-released-corpus", 60, stopword_released},
        {"ranking-oracle", 10, ranking_oracle},
        {"metric-fixtures", 5, metric_fixtures},
        {"pooling-properties", 5, pooling_properties},
        {"judgment-aggregation", 5, judgment_aggregation},
        {"judgment-released-data", 5, judgment_released},
        {"grid-end-to-end", 30, grid_end_to_end},
        {"full-reproduction", 600, full_reproduction, false},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string status, detail;
        try {
            detail = c.run();
            status = "PASS";
        } catch (const Skipped& s) {
            status = "SKIP";
            detail = s.why;
        } catch (const Failed& f) {
            status = "FAIL";
            detail = f.what;
        } catch (const std::exception& e) {
            status = "FAIL";
            detail = std::string("exception: ") + e.what();
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (status == "PASS" && elapsed > c.budget_seconds) {
            status = "FAIL";
            detail += "; over time budget";
        }
        if (!c.gating && status != "SKIP") status = status == "PASS" ? "INFO" : "INFO-MISMATCH";
        if (status == "FAIL") ++failures;
        std::printf("%-13s %-26s %8.3fs / %4.0fs  %s\n", status.c_str(), c.name, elapsed, c.budget_seconds,
                    detail.c_str());
    }
    std::printf("%s: %d failing\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", failures);
    return failures == 0 ? 0 : 1;
}
