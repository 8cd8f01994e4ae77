#include "tetun/stemeval.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "tetun/error.hpp"
#include "tetun/textnorm.hpp"
#include "tetun/utf8.hpp"

namespace tetun {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Quote marks accepted around roots and members: ' " ` and the typographic pairs.
bool is_quote(char32_t c)
{
    return c == U'\'' || c == U'"' || c == U'`' || c == 0x2018 || c == 0x2019 || c == 0x201C || c == 0x201D;
}

std::string unquote(std::string_view s, std::size_t line_no)
{
    auto cps = utf8::decode(trim(s));
    if (!cps.empty() && is_quote(cps.front())) cps.erase(cps.begin());
    if (!cps.empty() && is_quote(cps.back())) cps.pop_back();
    auto word = lowercase(unify_apostrophes(utf8::encode(cps)));
    if (trim(word).empty()) {
        throw ParseError("empty word in concept group", line_no);
    }
    return std::string(trim(word));
}

std::string fmt6(double v)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(6) << v;
    return s.str();
}

std::string fmt_full(double v)
{
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

}  // namespace

ConceptGroups::ConceptGroups(std::vector<ConceptGroup> groups) : m_groups(std::move(groups))
{
    std::set<std::string> roots;
    std::set<std::string> words;
    for (const auto& g : m_groups) {
        if (g.members.empty()) {
            throw ValidationError("concept group '" + g.root + "' is empty");
        }
        if (!roots.insert(g.root).second) {
            throw ValidationError("concept group root '" + g.root + "' appears twice");
        }
        for (const auto& w : g.members) {
            if (!words.insert(w).second) {
                throw ValidationError("word '" + w + "' belongs to more than one group (or is listed twice)");
            }
        }
        m_words += g.members.size();
    }
}

ConceptGroups ConceptGroups::parse(std::string_view text)
{
    std::vector<ConceptGroup> groups;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty() || line.front() == '#' || line == "{" || line == "}") continue;
        if (line.back() == ',') line = trim(line.substr(0, line.size() - 1));
        const auto open = line.find('[');
        const auto close = line.rfind(']');
        if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
            throw ParseError("expected root: [members]", line_no, std::string(line.substr(0, 40)));
        }
        const auto head = trim(line.substr(0, open));
        if (head.empty() || head.back() != ':') {
            throw ParseError("expected ':' between root and member list", line_no, std::string(line.substr(0, 40)));
        }
        ConceptGroup g;
        g.root = unquote(head.substr(0, head.size() - 1), line_no);
        auto list = line.substr(open + 1, close - open - 1);
        while (!trim(list).empty()) {
            const auto comma = list.find(',');
            const auto item = list.substr(0, comma);
            if (!trim(item).empty()) {
                g.members.push_back(unquote(item, line_no));
            }
            if (comma == std::string_view::npos) break;
            list = list.substr(comma + 1);
        }
        groups.push_back(std::move(g));
    }
    return ConceptGroups(std::move(groups));
}

ConceptGroups ConceptGroups::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

PaiceIndices paice_indices(const ConceptGroups& groups, const StemFunction& stemmer)
{
    const std::uint64_t w = groups.word_count();
    if (w < 2) {
        throw ValidationError("Paice indices need at least two words");
    }
    PaiceCounts c;
    // stem -> group index -> count
    std::unordered_map<std::string, std::map<std::size_t, std::uint64_t>> by_stem;
    for (std::size_t gi = 0; gi < groups.groups().size(); ++gi) {
        const auto& g = groups.groups()[gi];
        const std::uint64_t n = g.members.size();
        c.desired_merge += n * (n - 1) / 2;
        std::map<std::string, std::uint64_t> split;
        for (const auto& word : g.members) {
            auto s = stemmer(word);
            ++split[s];
            ++by_stem[std::move(s)][gi];
        }
        std::uint64_t umt2 = 0;
        for (const auto& [s, u] : split) umt2 += u * (n - u);
        c.unachieved_merge += umt2 / 2;
        c.desired_nonmerge += n * (w - n);
    }
    c.desired_nonmerge /= 2;
    for (const auto& [s, per_group] : by_stem) {
        std::uint64_t ns = 0;
        for (const auto& [gi, v] : per_group) ns += v;
        std::uint64_t wmt2 = 0;
        for (const auto& [gi, v] : per_group) wmt2 += v * (ns - v);
        c.wrongly_merged += wmt2 / 2;
    }
    PaiceIndices r;
    r.counts = c;
    r.ui = c.desired_merge == 0 ? 0.0 : static_cast<double>(c.unachieved_merge) / static_cast<double>(c.desired_merge);
    r.oi = c.desired_nonmerge == 0 ? 0.0 : static_cast<double>(c.wrongly_merged) / static_cast<double>(c.desired_nonmerge);
    if (r.ui > 0) {
        r.sw = r.oi / r.ui;
    }
    return r;
}

std::string truncate_word(std::string_view word, std::size_t n)
{
    if (n == 0) {
        throw ValidationError("truncation length must be at least 1");
    }
    const auto cps = utf8::decode(word);
    return utf8::encode(std::u32string_view(cps).substr(0, n));
}

PaiceIndices truncation_baseline(const ConceptGroups& groups, std::size_t n)
{
    if (n == 0) {
        throw ValidationError("truncation length must be at least 1");
    }
    return paice_indices(groups, [n](std::string_view w) { return truncate_word(w, n); });
}

double errt(UiOiPoint p, std::span<const UiOiPoint> line)
{
    if (p.ui == 0.0 && p.oi == 0.0) {
        throw ValidationError("ERRT is undefined for a point at the origin");
    }
    if (line.size() < 2) {
        throw ValidationError("the truncation line needs at least two points");
    }
    const auto cross = [](double ax, double ay, double bx, double by) { return ax * by - ay * bx; };
    double best = std::numeric_limits<double>::infinity();
    const std::size_t segments = line.size() - 1;
    for (std::size_t i = 0; i < segments; ++i) {
        const auto& a = line[i];
        const auto& b = line[i + 1];
        const double ex = b.ui - a.ui;
        const double ey = b.oi - a.oi;
        const double det = cross(p.ui, p.oi, ex, ey);
        if (det == 0.0) continue;  // ray parallel to this segment
        // Ray: s*p. Segment: a + t*e. s = cross(a, e) / cross(p, e), t = cross(a, p) / cross(p, e).
        const double s = cross(a.ui, a.oi, ex, ey) / det;
        const double t = cross(a.ui, a.oi, p.ui, p.oi) / det;
        const bool open_start = i == 0;
        const bool open_end = i + 1 == segments;
        if ((t < 0.0 && !open_start) || (t > 1.0 && !open_end)) continue;
        if (s > 0.0 && s < best) best = s;
    }
    if (!std::isfinite(best)) {
        std::ostringstream msg;
        msg << "ray from the origin through (" << p.ui << ", " << p.oi << ") misses the truncation line spanning ("
            << line.front().ui << ", " << line.front().oi << ") to (" << line.back().ui << ", " << line.back().oi << ")";
        throw Error(msg.str());
    }
    // |OP| / |OT| with T = best * P.
    return 1.0 / best;
}

std::string PaiceReport::to_text() const
{
    std::size_t width = 8;
    for (const auto& r : rows) width = std::max(width, r.name.size());
    std::ostringstream out;
    const auto pad = [&](std::string s) {
        s.resize(std::max(s.size(), width), ' ');
        return s;
    };
    out << pad("stemmer") << "  " << std::setw(10) << "UI" << "  " << std::setw(10) << "OI" << "  " << std::setw(10)
        << "SW" << "  " << std::setw(10) << "ERRT" << '\n';
    for (const auto& r : rows) {
        out << pad(r.name) << "  " << std::setw(10) << fmt6(r.indices.ui) << "  " << std::setw(10) << fmt6(r.indices.oi)
            << "  " << std::setw(10) << (r.indices.sw ? fmt6(*r.indices.sw) : "-") << "  " << std::setw(10)
            << (r.errt ? fmt6(*r.errt) : "-") << '\n';
    }
    for (std::size_t i = 0; i < truncation_line.size(); ++i) {
        out << pad("trunc-" + std::to_string(truncation_lengths[i])) << "  " << std::setw(10)
            << fmt6(truncation_line[i].ui) << "  " << std::setw(10) << fmt6(truncation_line[i].oi) << '\n';
    }
    return out.str();
}

std::string PaiceReport::to_csv() const
{
    std::ostringstream out;
    out << "name,ui,oi,sw,errt\n";
    for (const auto& r : rows) {
        out << r.name << ',' << fmt_full(r.indices.ui) << ',' << fmt_full(r.indices.oi) << ','
            << (r.indices.sw ? fmt_full(*r.indices.sw) : "") << ',' << (r.errt ? fmt_full(*r.errt) : "") << '\n';
    }
    for (std::size_t i = 0; i < truncation_line.size(); ++i) {
        out << "trunc-" << truncation_lengths[i] << ',' << fmt_full(truncation_line[i].ui) << ','
            << fmt_full(truncation_line[i].oi) << ",,\n";
    }
    return out.str();
}

PaiceReport evaluate_stemmers(const ConceptGroups& groups, std::span<const NamedStemmer> stemmers,
                              std::span<const std::size_t> truncation_lengths)
{
    PaiceReport report;
    report.truncation_lengths.assign(truncation_lengths.begin(), truncation_lengths.end());
    for (auto n : truncation_lengths) {
        const auto t = truncation_baseline(groups, n);
        report.truncation_line.push_back({t.ui, t.oi});
    }
    for (const auto& s : stemmers) {
        PaiceRow row{s.name, paice_indices(groups, s.fn), std::nullopt};
        if (row.indices.ui != 0.0 || row.indices.oi != 0.0) {
            row.errt = errt({row.indices.ui, row.indices.oi}, report.truncation_line);
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace tetun
