#include "tetun/stemmer.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "tetun/bundled_data.hpp"
#include "tetun/error.hpp"
#include "tetun/utf8.hpp"

namespace tetun {

std::string_view to_string(StemVariant v) noexcept
{
    switch (v) {
    case StemVariant::light: return "light";
    case StemVariant::moderate: return "moderate";
    case StemVariant::heavy: return "heavy";
    }
    return "?";
}

StemVariant parse_stem_variant(std::string_view name)
{
    if (name == "light") return StemVariant::light;
    if (name == "moderate") return StemVariant::moderate;
    if (name == "heavy") return StemVariant::heavy;
    throw ValidationError("unknown stemmer variant '" + std::string(name) + "'");
}

std::string_view to_string(StemStep s) noexcept
{
    switch (s) {
    case StemStep::unchanged: return "unchanged";
    case StemStep::too_short: return "too_short";
    case StemStep::blocked: return "blocked";
    case StemStep::general: return "general";
    case StemStep::lojia: return "lojia";
    case StemStep::usaun: return "usaun";
    case StemStep::ensia: return "ensia";
    case StemStep::amente: return "amente";
    case StemStep::mente: return "mente";
    case StemStep::idade: return "idade";
    case StemStep::iva: return "iva";
    case StemStep::verb: return "verb";
    case StemStep::residual: return "residual";
    case StemStep::native_suffix: return "native_suffix";
    case StemStep::native_prefix: return "native_prefix";
    }
    return "?";
}

bool is_stem_vowel(char32_t c) noexcept
{
    switch (c) {
    case U'a': case U'e': case U'i': case U'o': case U'u':
    case U'á': case U'é': case U'í': case U'ó': case U'ú':
        return true;
    default:
        return false;
    }
}

namespace {

// Start of the region after the first non-vowel that follows a vowel, looking
// only at characters at or after `from`.
std::size_t region_after(std::u32string_view w, std::size_t from)
{
    for (std::size_t i = from + 1; i < w.size(); ++i) {
        if (is_stem_vowel(w[i - 1]) && !is_stem_vowel(w[i])) {
            return i + 1;
        }
    }
    return w.size();
}

std::size_t rv_start(std::u32string_view w)
{
    const std::size_t n = w.size();
    if (n < 2) {
        return n;
    }
    if (!is_stem_vowel(w[1])) {
        for (std::size_t i = 2; i < n; ++i) {
            if (is_stem_vowel(w[i])) {
                return i + 1;
            }
        }
        return n;
    }
    if (is_stem_vowel(w[0])) {
        for (std::size_t i = 2; i < n; ++i) {
            if (!is_stem_vowel(w[i])) {
                return i + 1;
            }
        }
        return n;
    }
    return std::min<std::size_t>(3, n);
}

bool ends_with(std::u32string_view w, std::u32string_view suffix)
{
    return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

// Length of the longest entry of `list` that ends `w`.
std::optional<std::size_t> longest_suffix(std::u32string_view w, const std::vector<std::u32string>& list)
{
    std::optional<std::size_t> best;
    for (const auto& s : list) {
        if (!s.empty() && ends_with(w, s) && (!best || s.size() > *best)) {
            best = s.size();
        }
    }
    return best;
}

std::optional<std::size_t> longest_prefix(std::u32string_view w, const std::vector<std::u32string>& list)
{
    std::optional<std::size_t> best;
    for (const auto& p : list) {
        if (!p.empty() && w.size() >= p.size() && w.substr(0, p.size()) == p && (!best || p.size() > *best)) {
            best = p.size();
        }
    }
    return best;
}

std::vector<std::u32string>* section_for(SuffixTable& t, std::string_view name)
{
    if (name == "general") return &t.general;
    if (name == "lojia") return &t.lojia;
    if (name == "usaun") return &t.usaun;
    if (name == "ensia") return &t.ensia;
    if (name == "amente") return &t.amente;
    if (name == "iv") return &t.iv;
    if (name == "at") return &t.at;
    if (name == "ozikad") return &t.ozikad;
    if (name == "mente") return &t.mente;
    if (name == "ante") return &t.ante;
    if (name == "idade") return &t.idade;
    if (name == "abil") return &t.abil;
    if (name == "iva") return &t.iva;
    if (name == "verb") return &t.verb;
    if (name == "residual") return &t.residual;
    if (name == "native_prefixes") return &t.native_prefixes;
    if (name == "native_suffixes") return &t.native_suffixes;
    return nullptr;
}

constexpr std::string_view section_names[] = {
    "general", "lojia", "usaun", "ensia", "amente", "iv", "at", "ozikad", "mente",
    "ante", "idade", "abil", "iva", "verb", "residual", "native_prefixes", "native_suffixes",
};

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

char32_t fold(char32_t c)
{
    switch (c) {
    case U'á': return U'a';
    case U'é': return U'e';
    case U'í': return U'i';
    case U'ó': return U'o';
    case U'ú': return U'u';
    case U'ñ': return U'n';
    default: return c;
    }
}

void add_folded(std::vector<std::u32string>& list)
{
    const std::size_t n = list.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::u32string f = list[i];
        std::transform(f.begin(), f.end(), f.begin(), fold);
        if (std::find(list.begin(), list.end(), f) == list.end()) {
            list.push_back(std::move(f));
        }
    }
}

}  // namespace

StemRegions compute_regions(std::u32string_view word)
{
    if (word.empty()) {
        throw ValidationError("cannot compute stemming regions of an empty word");
    }
    StemRegions r;
    r.r1_start = region_after(word, 0);
    r.r2_start = r.r1_start < word.size() ? region_after(word, r.r1_start) : word.size();
    r.rv_start = rv_start(word);
    return r;
}

StemRegions compute_regions(std::string_view utf8_word)
{
    return compute_regions(utf8::decode(utf8_word));
}

SuffixTable SuffixTable::parse(std::string_view text)
{
    SuffixTable t;
    std::vector<std::u32string>* current = nullptr;
    std::vector<std::string> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ValidationError("suffix table line " + std::to_string(line_no) + ": unterminated section header");
            }
            const std::string name(trim(line.substr(1, line.size() - 2)));
            current = section_for(t, name);
            if (current == nullptr) {
                throw ValidationError("suffix table line " + std::to_string(line_no) + ": unknown section '" + name + "'");
            }
            if (std::find(seen.begin(), seen.end(), name) != seen.end()) {
                throw ValidationError("suffix table: duplicate section '" + name + "'");
            }
            seen.push_back(name);
            continue;
        }
        if (current == nullptr) {
            throw ValidationError("suffix table line " + std::to_string(line_no) + ": entry outside any section");
        }
        current->push_back(utf8::decode(line));
    }
    for (auto name : section_names) {
        if (std::find(seen.begin(), seen.end(), name) == seen.end()) {
            throw ValidationError("suffix table: missing section '" + std::string(name) + "'");
        }
    }
    // "-nain" also matches as "nain" once hyphens have been split off.
    const std::size_t n = t.native_suffixes.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = t.native_suffixes[i];
        if (s.size() > 1 && s.front() == U'-') {
            std::u32string bare = s.substr(1);
            if (std::find(t.native_suffixes.begin(), t.native_suffixes.end(), bare) == t.native_suffixes.end()) {
                t.native_suffixes.push_back(std::move(bare));
            }
        }
    }
    return t;
}

SuffixTable SuffixTable::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open suffix table " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

const SuffixTable& SuffixTable::bundled()
{
    static const SuffixTable table = parse(bundled::read_or("suffixes.txt", bundled::suffixes_text()));
    return table;
}

SuffixTable SuffixTable::with_folded_aliases() const
{
    SuffixTable t = *this;
    for (auto name : section_names) {
        add_folded(*section_for(t, name));
    }
    return t;
}

Stemmer::Stemmer(StemVariant variant) : Stemmer(variant, SuffixTable::bundled()) {}

Stemmer::Stemmer(StemVariant variant, SuffixTable table) : m_variant(variant), m_table(std::move(table)) {}

StemResult Stemmer::light_chain(std::u32string_view w) const
{
    const auto reg = compute_regions(w);
    const std::size_t n = w.size();
    const auto cut = [&](std::size_t start, StemStep step, std::u32string_view repl = {}) {
        std::u32string s(w.substr(0, start));
        s += repl;
        return StemResult{std::move(s), step};
    };
    const StemResult blocked{std::u32string(w), StemStep::blocked};

    if (auto m = longest_suffix(w, m_table.general)) {
        return n - *m >= reg.r2_start ? cut(n - *m, StemStep::general) : blocked;
    }
    if (auto m = longest_suffix(w, m_table.lojia)) {
        return n - *m >= reg.r2_start ? cut(n - *m, StemStep::lojia, U"loj") : blocked;
    }
    if (auto m = longest_suffix(w, m_table.usaun)) {
        return n - *m >= reg.r2_start ? cut(n - *m, StemStep::usaun, U"u") : blocked;
    }
    if (auto m = longest_suffix(w, m_table.ensia)) {
        return n - *m >= reg.r2_start ? cut(n - *m, StemStep::ensia, U"ente") : blocked;
    }
    if (auto m = longest_suffix(w, m_table.amente)) {
        if (n - *m < reg.r1_start) {
            return blocked;
        }
        const std::u32string_view s = w.substr(0, n - *m);
        if (auto iv = longest_suffix(s, m_table.iv); iv && s.size() - *iv >= reg.r2_start) {
            const std::u32string_view s2 = s.substr(0, s.size() - *iv);
            if (auto at = longest_suffix(s2, m_table.at); at && s2.size() - *at >= reg.r2_start) {
                return cut(s2.size() - *at, StemStep::amente);
            }
            return cut(s2.size(), StemStep::amente);
        } else if (auto oz = longest_suffix(s, m_table.ozikad)) {
            if (s.size() - *oz >= reg.r2_start) {
                return cut(s.size() - *oz, StemStep::amente);
            }
        }
        return cut(s.size(), StemStep::amente);
    }
    if (auto m = longest_suffix(w, m_table.mente)) {
        if (n - *m < reg.r2_start) {
            return blocked;
        }
        const std::u32string_view s = w.substr(0, n - *m);
        if (auto a = longest_suffix(s, m_table.ante); a && s.size() - *a >= reg.r2_start) {
            return cut(s.size() - *a, StemStep::mente);
        }
        return cut(s.size(), StemStep::mente);
    }
    if (auto m = longest_suffix(w, m_table.idade)) {
        if (n - *m < reg.r2_start) {
            return blocked;
        }
        const std::u32string_view s = w.substr(0, n - *m);
        if (auto a = longest_suffix(s, m_table.abil); a && s.size() - *a >= reg.r2_start) {
            return cut(s.size() - *a, StemStep::idade);
        }
        return cut(s.size(), StemStep::idade);
    }
    if (auto m = longest_suffix(w, m_table.iva)) {
        if (n - *m < reg.r2_start) {
            return blocked;
        }
        const std::u32string_view s = w.substr(0, n - *m);
        if (auto a = longest_suffix(s, m_table.at); a && s.size() - *a >= reg.r2_start) {
            return cut(s.size() - *a, StemStep::iva);
        }
        return cut(s.size(), StemStep::iva);
    }
    if (auto m = longest_suffix(w, m_table.verb)) {
        return n - *m >= reg.rv_start ? cut(n - *m, StemStep::verb) : blocked;
    }
    if (auto m = longest_suffix(w, m_table.residual)) {
        return n - *m >= reg.rv_start ? cut(n - *m, StemStep::residual) : blocked;
    }
    return {std::u32string(w), StemStep::unchanged};
}

StemResult Stemmer::trace(std::u32string_view word) const
{
    if (word.size() < min_length) {
        return {std::u32string(word), StemStep::too_short};
    }
    if (m_variant == StemVariant::heavy) {
        if (auto p = longest_prefix(word, m_table.native_prefixes);
            p && word.size() - *p >= native_prefix_min_remainder) {
            return {std::u32string(word.substr(*p)), StemStep::native_prefix};
        }
    }
    StemResult r = light_chain(word);
    if (m_variant == StemVariant::light || (r.step != StemStep::unchanged && r.step != StemStep::blocked)) {
        return r;
    }
    if (auto s = longest_suffix(word, m_table.native_suffixes);
        s && word.size() - *s >= native_suffix_min_remainder) {
        return {std::u32string(word.substr(0, word.size() - *s)), StemStep::native_suffix};
    }
    return r;
}

std::u32string Stemmer::stem(std::u32string_view word) const { return trace(word).stem; }

std::string Stemmer::stem(std::string_view utf8_word) const
{
    return utf8::encode(trace(utf8::decode(utf8_word)).stem);
}

std::string stem(std::string_view utf8_word, StemVariant variant)
{
    static const Stemmer light(StemVariant::light);
    static const Stemmer moderate(StemVariant::moderate);
    static const Stemmer heavy(StemVariant::heavy);
    switch (variant) {
    case StemVariant::light: return light.stem(utf8_word);
    case StemVariant::moderate: return moderate.stem(utf8_word);
    case StemVariant::heavy: return heavy.stem(utf8_word);
    }
    return std::string(utf8_word);
}

}  // namespace tetun
