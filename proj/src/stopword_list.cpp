#include "tetun/stopword_list.hpp"

#include <fstream>
#include <sstream>

#include "tetun/bundled_data.hpp"
#include "tetun/error.hpp"
#include "tetun/textnorm.hpp"

namespace tetun {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string canonical_form(std::string_view term) { return lowercase(unify_apostrophes(trim(term))); }

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn)
{
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (trim(line).empty() || trim(line).front() == '#') {
            continue;
        }
        fn(line, line_no);
    }
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

StopwordList::StopwordList(std::vector<std::string> entries, std::map<std::string, std::string> variants)
    : m_entries(std::move(entries)), m_variants(std::move(variants))
{
    for (const auto& e : m_entries) {
        if (e.empty()) {
            throw ValidationError("stopword list contains an empty entry");
        }
        if (!m_lookup.insert(e).second) {
            throw ValidationError("duplicate stopword '" + e + "'");
        }
    }
    for (const auto& [variant, canonical] : m_variants) {
        if (!m_lookup.contains(canonical)) {
            throw ValidationError("variant '" + variant + "' maps to '" + canonical + "', which is not in the list");
        }
        if (m_lookup.contains(variant)) {
            throw ValidationError("variant '" + variant + "' is itself a canonical entry");
        }
    }
}

StopwordList StopwordList::parse(std::string_view list_text, std::string_view variants_text)
{
    std::vector<std::string> entries;
    for_each_line(list_text, [&](std::string_view line, std::size_t) { entries.push_back(canonical_form(line)); });
    std::map<std::string, std::string> variants;
    for_each_line(variants_text, [&](std::string_view line, std::size_t line_no) {
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos) {
            throw ValidationError("variants line " + std::to_string(line_no) + ": expected variant<TAB>canonical");
        }
        variants[canonical_form(line.substr(0, tab))] = canonical_form(line.substr(tab + 1));
    });
    return StopwordList(std::move(entries), std::move(variants));
}

StopwordList StopwordList::load(const std::filesystem::path& list, const std::optional<std::filesystem::path>& variants)
{
    return parse(slurp(list), variants ? slurp(*variants) : std::string{});
}

const StopwordList& StopwordList::bundled()
{
    static const StopwordList list = parse(bundled::read_or("stopwords.txt", bundled::stopwords_text()),
                                           bundled::read_or("stopword_variants.tsv", bundled::stopword_variants_text()));
    return list;
}

bool StopwordList::contains(std::string_view term) const { return m_lookup.find(term) != m_lookup.end(); }

std::string correct_variants(std::string_view token, const StopwordList& list)
{
    if (auto it = list.variants().find(std::string(token)); it != list.variants().end()) {
        return it->second;
    }
    return std::string(token);
}

}  // namespace tetun
