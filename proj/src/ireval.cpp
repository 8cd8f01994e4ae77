#include "tetun/ireval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "tetun/error.hpp"

namespace tetun {

namespace {

int grade_of(const Judgments& q, std::string_view docno)
{
    const auto it = q.find(docno);
    return it == q.end() ? 0 : it->second;
}

double gain_of(int grade, Gain g)
{
    if (grade <= 0) return 0.0;
    return g == Gain::linear ? static_cast<double>(grade) : std::exp2(grade) - 1.0;
}

std::string join_ids(const std::vector<int>& ids)
{
    std::string s;
    for (auto id : ids) s += (s.empty() ? "" : " ") + std::to_string(id);
    return s;
}

std::string fmt4(double v)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << v;
    return s.str();
}

std::vector<double> row_values(const TopicMetrics& m)
{
    std::vector<double> v = m.precision;
    v.insert(v.end(), m.map.begin(), m.map.end());
    v.insert(v.end(), m.ndcg.begin(), m.ndcg.end());
    v.push_back(m.map_all);
    v.push_back(m.ndcg_all);
    return v;
}

}  // namespace

std::string_view to_string(Gain g) noexcept
{
    return g == Gain::linear ? "linear" : "exponential";
}

Gain parse_gain(std::string_view name)
{
    if (name == "linear") return Gain::linear;
    if (name == "exponential") return Gain::exponential;
    throw ValidationError("unknown gain '" + std::string(name) + "' (expected linear or exponential)");
}

double precision_at_k(std::span<const std::string> ranked, const Judgments& qrels, std::size_t k)
{
    if (k == 0) {
        throw ValidationError("cutoff must be at least 1");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
        if (grade_of(qrels, ranked[i]) >= 1) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

double average_precision(std::span<const std::string> ranked, const Judgments& qrels, std::optional<std::size_t> k)
{
    std::size_t r = 0;
    for (const auto& [d, g] : qrels) r += g >= 1 ? 1 : 0;
    if (r == 0) {
        throw ValidationError("average precision is undefined without relevant documents");
    }
    if (k && *k == 0) {
        throw ValidationError("cutoff must be at least 1");
    }
    const auto depth = std::min(k.value_or(ranked.size()), ranked.size());
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < depth; ++i) {
        if (grade_of(qrels, ranked[i]) >= 1) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(r);
}

double ndcg_at_k(std::span<const std::string> ranked, const Judgments& qrels, std::optional<std::size_t> k, Gain gain)
{
    if (k && *k == 0) {
        throw ValidationError("cutoff must be at least 1");
    }
    const auto depth = std::min(k.value_or(ranked.size()), ranked.size());
    double dcg = 0.0;
    for (std::size_t i = 0; i < depth; ++i) {
        dcg += gain_of(grade_of(qrels, ranked[i]), gain) / std::log2(static_cast<double>(i) + 2.0);
    }
    std::vector<int> ideal;
    for (const auto& [d, g] : qrels) {
        if (g > 0) ideal.push_back(g);
    }
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    // Without a cutoff every relevant document counts toward the ideal.
    const auto ideal_depth = std::min(k.value_or(ideal.size()), ideal.size());
    double idcg = 0.0;
    for (std::size_t i = 0; i < ideal_depth; ++i) {
        idcg += gain_of(ideal[i], gain) / std::log2(static_cast<double>(i) + 2.0);
    }
    return idcg == 0.0 ? 0.0 : dcg / idcg;
}

std::vector<std::string> MetricReport::columns() const
{
    std::vector<std::string> c;
    for (const char* name : {"P@", "MAP@", "NDCG@"}) {
        for (auto k : cutoffs) c.push_back(name + std::to_string(k));
    }
    c.emplace_back("MAP");
    c.emplace_back("NDCG");
    return c;
}

std::string MetricReport::to_csv() const
{
    std::ostringstream out;
    out << "topic";
    for (const auto& c : columns()) out << ',' << c;
    out << '\n';
    const auto row = [&](const std::string& label, const TopicMetrics& m) {
        out << label;
        for (double v : row_values(m)) out << ',' << format_score(v);
        out << '\n';
    };
    for (const auto& t : topics) row(std::to_string(t.topic_id), t);
    row("all", mean);
    return out.str();
}

std::string MetricReport::to_text() const
{
    std::ostringstream out;
    out << "# run: " << (run_tag.empty() ? "-" : run_tag) << "  qrels: " << (qrels_tag.empty() ? "-" : qrels_tag)
        << "  ndcg gain: " << to_string(gain) << "  relevant: grade >= 1\n";
    const auto cols = columns();
    out << std::left << std::setw(6) << "topic";
    for (const auto& c : cols) out << std::right << std::setw(9) << c;
    out << '\n';
    const auto row = [&](const std::string& label, const TopicMetrics& m) {
        out << std::left << std::setw(6) << label;
        for (double v : row_values(m)) out << std::right << std::setw(9) << fmt4(v);
        out << '\n';
    };
    for (const auto& t : topics) row(std::to_string(t.topic_id), t);
    row("all", mean);
    if (!not_in_qrels.empty()) out << "# skipped, not in qrels: " << join_ids(not_in_qrels) << '\n';
    if (!no_relevant.empty()) out << "# skipped, no relevant documents: " << join_ids(no_relevant) << '\n';
    if (!no_results.empty()) out << "# no results retrieved: " << join_ids(no_results) << '\n';
    return out.str();
}

MetricReport evaluate_run(std::span<const RunEntry> run, std::span<const Qrel> qrels,
                          std::span<const std::size_t> cutoffs, Gain gain, std::string run_tag, std::string qrels_tag)
{
    MetricReport report;
    report.run_tag = std::move(run_tag);
    report.qrels_tag = std::move(qrels_tag);
    report.gain = gain;
    report.cutoffs.assign(cutoffs.begin(), cutoffs.end());
    for (auto k : cutoffs) {
        if (k == 0) throw ValidationError("cutoff must be at least 1");
    }

    std::map<int, Judgments> judged;
    for (const auto& q : qrels) judged[q.topic_id][q.docno] = q.grade;

    std::map<int, std::vector<const RunEntry*>> by_topic;
    for (const auto& e : run) by_topic[e.topic_id].push_back(&e);
    std::map<int, std::vector<std::string>> rankings;
    for (auto& [topic, entries] : by_topic) {
        std::stable_sort(entries.begin(), entries.end(), [](auto* a, auto* b) { return a->rank < b->rank; });
        auto& r = rankings[topic];
        for (const auto* e : entries) r.push_back(e->docno);
        if (!judged.contains(topic)) report.not_in_qrels.push_back(topic);
    }

    const std::size_t n = cutoffs.size();
    report.mean.precision.assign(n, 0.0);
    report.mean.map.assign(n, 0.0);
    report.mean.ndcg.assign(n, 0.0);
    const std::vector<std::string> empty;
    for (const auto& [topic, j] : judged) {
        const bool any_relevant = std::any_of(j.begin(), j.end(), [](const auto& p) { return p.second >= 1; });
        if (!any_relevant) {
            report.no_relevant.push_back(topic);
            continue;
        }
        const auto it = rankings.find(topic);
        if (it == rankings.end()) report.no_results.push_back(topic);
        const auto& ranked = it == rankings.end() ? empty : it->second;
        TopicMetrics m;
        m.topic_id = topic;
        for (auto k : cutoffs) {
            m.precision.push_back(precision_at_k(ranked, j, k));
            m.map.push_back(average_precision(ranked, j, k));
            m.ndcg.push_back(ndcg_at_k(ranked, j, k, gain));
        }
        m.map_all = average_precision(ranked, j);
        m.ndcg_all = ndcg_at_k(ranked, j, std::nullopt, gain);
        report.topics.push_back(std::move(m));
    }
    if (!report.topics.empty()) {
        const double count = static_cast<double>(report.topics.size());
        for (const auto& t : report.topics) {
            for (std::size_t i = 0; i < n; ++i) {
                report.mean.precision[i] += t.precision[i];
                report.mean.map[i] += t.map[i];
                report.mean.ndcg[i] += t.ndcg[i];
            }
            report.mean.map_all += t.map_all;
            report.mean.ndcg_all += t.ndcg_all;
        }
        for (std::size_t i = 0; i < n; ++i) {
            report.mean.precision[i] /= count;
            report.mean.map[i] /= count;
            report.mean.ndcg[i] /= count;
        }
        report.mean.map_all /= count;
        report.mean.ndcg_all /= count;
    }
    return report;
}

}  // namespace tetun
