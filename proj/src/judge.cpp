#include "tetun/judge.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>
#include <tuple>

#include "tetun/error.hpp"

namespace tetun {

namespace {

void check_grade(int g)
{
    if (g < 0 || g > max_grade) {
        throw ValidationError("grade " + std::to_string(g) + " outside 0..3");
    }
}

std::string pair_name(int topic, const std::string& docno)
{
    return std::to_string(topic) + ":" + docno;
}

}  // namespace

FirstRoundResult first_round(std::span<const int> votes)
{
    if (votes.empty()) {
        throw ValidationError("no votes to aggregate");
    }
    FirstRoundResult r;
    for (int v : votes) {
        check_grade(v);
        ++r.histogram[static_cast<std::size_t>(v)];
    }
    std::array<int, max_grade + 1> order{3, 2, 1, 0};
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return r.histogram[static_cast<std::size_t>(x)] > r.histogram[static_cast<std::size_t>(y)];
    });
    if (2 * r.histogram[static_cast<std::size_t>(order[0])] > votes.size()) {
        r.majority = order[0];
    }
    r.options = {order[0], order[1]};
    return r;
}

std::string_view to_string(AggregateStatus s) noexcept
{
    switch (s) {
        case AggregateStatus::majority: return "majority";
        case AggregateStatus::second_round: return "second_round";
        case AggregateStatus::tie_broken: return "tie_broken";
    }
    return "?";
}

SecondRoundResult second_round(std::span<const int> round1, TieOptions options, std::span<const int> round2)
{
    SecondRoundResult r;
    for (int v : round1) {
        check_grade(v);
        ++r.combined[static_cast<std::size_t>(v)];
    }
    for (int v : round2) {
        if (v != options[0] && v != options[1]) {
            throw ValidationError("second-round grade " + std::to_string(v) + " is not one of the offered options " +
                                  std::to_string(options[0]) + " and " + std::to_string(options[1]));
        }
        ++r.combined[static_cast<std::size_t>(v)];
    }
    std::size_t top = 0;
    for (auto c : r.combined) top = std::max(top, c);
    int leaders = 0;
    for (int g = max_grade; g >= 0; --g) {
        if (r.combined[static_cast<std::size_t>(g)] == top) {
            if (leaders == 0) r.grade = g;
            ++leaders;
        }
    }
    r.status = leaders > 1 ? AggregateStatus::tie_broken : AggregateStatus::second_round;
    return r;
}

Aggregation aggregate(std::span<const JudgmentRecord> records, std::size_t votes_per_pair)
{
    if (votes_per_pair == 0) {
        throw ValidationError("votes per pair must be at least 1");
    }
    struct Votes {
        std::vector<int> round1;
        std::vector<int> round2;
    };
    std::map<std::pair<int, std::string>, Votes> pairs;
    std::set<std::tuple<std::string, int, std::string, int>> seen;
    for (const auto& r : records) {
        check_grade(r.grade);
        if (r.round != 1 && r.round != 2) {
            throw ValidationError("round must be 1 or 2, got " + std::to_string(r.round));
        }
        if (!seen.emplace(r.assessor, r.topic_id, r.docno, r.round).second) {
            throw ValidationError("assessor " + r.assessor + " judged " + pair_name(r.topic_id, r.docno) +
                                  " twice in round " + std::to_string(r.round));
        }
        auto& v = pairs[{r.topic_id, r.docno}];
        (r.round == 1 ? v.round1 : v.round2).push_back(r.grade);
    }

    Aggregation out;
    for (auto& [key, v] : pairs) {
        const auto& [topic, docno] = key;
        if (v.round1.size() != votes_per_pair) {
            out.incomplete.push_back(key);
            continue;
        }
        const auto first = first_round(v.round1);
        if (first.majority) {
            if (!v.round2.empty()) {
                throw ValidationError("second-round votes recorded for " + pair_name(topic, docno) +
                                      ", which has a first-round majority");
            }
            out.resolved.push_back({topic, docno, *first.majority, AggregateStatus::majority, first.histogram});
            continue;
        }
        if (v.round2.size() > second_round_votes) {
            throw ValidationError(pair_name(topic, docno) + " has more than three second-round votes");
        }
        if (v.round2.size() < second_round_votes) {
            out.ties.push_back({topic, docno, first.options, first.histogram, v.round2});
            continue;
        }
        const auto second = second_round(v.round1, first.options, v.round2);
        out.resolved.push_back({topic, docno, second.grade, second.status, first.histogram});
    }
    return out;
}

double cohen_kappa(std::span<const int> a, std::span<const int> b)
{
    if (a.size() != b.size()) {
        throw ValidationError("kappa needs label lists of equal length");
    }
    if (a.empty()) {
        throw ValidationError("kappa needs at least one shared judgment");
    }
    GradeHistogram ha{}, hb{};
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        check_grade(a[i]);
        check_grade(b[i]);
        ++ha[static_cast<std::size_t>(a[i])];
        ++hb[static_cast<std::size_t>(b[i])];
        agree += a[i] == b[i] ? 1 : 0;
    }
    const double n = static_cast<double>(a.size());
    const double po = static_cast<double>(agree) / n;
    double pe = 0.0;
    for (std::size_t g = 0; g <= max_grade; ++g) {
        pe += (static_cast<double>(ha[g]) / n) * (static_cast<double>(hb[g]) / n);
    }
    if (pe == 1.0) return 1.0;
    return (po - pe) / (1.0 - pe);
}

AgreementReport agreement(std::span<const JudgmentRecord> records)
{
    std::map<std::string, std::map<std::pair<int, std::string>, int>> by_assessor;
    for (const auto& r : records) {
        if (r.round == 1) by_assessor[r.assessor][{r.topic_id, r.docno}] = r.grade;
    }
    AgreementReport rep;
    for (const auto& [name, _] : by_assessor) rep.assessors.push_back(name);
    double sum = 0.0;
    for (auto i = by_assessor.begin(); i != by_assessor.end(); ++i) {
        for (auto j = std::next(i); j != by_assessor.end(); ++j) {
            std::vector<int> a, b;
            for (const auto& [pair, g] : i->second) {
                const auto it = j->second.find(pair);
                if (it == j->second.end()) continue;
                a.push_back(g);
                b.push_back(it->second);
            }
            if (a.empty()) continue;
            rep.pairs.push_back({i->first, j->first, cohen_kappa(a, b), a.size()});
            sum += rep.pairs.back().kappa;
        }
    }
    if (!rep.pairs.empty()) rep.average = sum / static_cast<double>(rep.pairs.size());
    return rep;
}

std::string QrelsExport::report() const
{
    std::ostringstream out;
    out << "topics kept: " << kept.size() << "\n";
    out << "qrels: " << qrels.size() << "\n";
    for (const auto& e : excluded) {
        out << "excluded topic " << e.topic_id << ": " << e.relevant << " relevant\n";
    }
    for (int t : pending) out << "pending topic " << t << "\n";
    for (std::size_t g = 0; g <= max_grade; ++g) {
        const double share = qrels.empty() ? 0.0 : 100.0 * static_cast<double>(histogram[g]) / static_cast<double>(qrels.size());
        out << "grade " << g << ": " << histogram[g] << " (" << std::fixed << std::setprecision(2) << share << "%)\n";
    }
    return out.str();
}

QrelsExport export_qrels(const Aggregation& agg, ExportRule rule, bool allow_pending)
{
    std::set<int> pending;
    for (const auto& t : agg.ties) pending.insert(t.topic_id);
    for (const auto& [topic, docno] : agg.incomplete) pending.insert(topic);
    if (!pending.empty() && !allow_pending) {
        std::string ids;
        for (int t : pending) ids += (ids.empty() ? "" : " ") + std::to_string(t);
        throw ConflictError("aggregation is not complete; topics with open ties or missing votes: " + ids);
    }
    std::map<int, std::vector<const AggregatedQrel*>> by_topic;
    for (const auto& q : agg.resolved) {
        if (!pending.contains(q.topic_id)) by_topic[q.topic_id].push_back(&q);
    }
    QrelsExport out;
    out.pending.assign(pending.begin(), pending.end());
    for (const auto& [topic, qs] : by_topic) {
        const auto relevant = static_cast<std::size_t>(
            std::count_if(qs.begin(), qs.end(), [](const AggregatedQrel* q) { return q->grade >= 1; }));
        if (relevant < rule.min_relevant || relevant >= rule.max_relevant) {
            out.excluded.push_back({topic, relevant});
            continue;
        }
        out.kept.push_back(topic);
        for (const auto* q : qs) {
            out.qrels.push_back({topic, q->docno, q->grade});
            ++out.histogram[static_cast<std::size_t>(q->grade)];
        }
    }
    return out;
}

}  // namespace tetun
