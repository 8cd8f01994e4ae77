#include "tetun/textnorm.hpp"

#include <charconv>
#include <sstream>

#include "tetun/error.hpp"
#include "tetun/utf8.hpp"

namespace tetun {

std::string_view to_string(StemmerChoice c) noexcept
{
    switch (c) {
    case StemmerChoice::none: return "none";
    case StemmerChoice::light: return "light";
    case StemmerChoice::moderate: return "moderate";
    case StemmerChoice::heavy: return "heavy";
    }
    return "?";
}

StemmerChoice parse_stemmer_choice(std::string_view name)
{
    if (name == "none") return StemmerChoice::none;
    if (name == "light") return StemmerChoice::light;
    if (name == "moderate") return StemmerChoice::moderate;
    if (name == "heavy") return StemmerChoice::heavy;
    throw ValidationError("unknown stemmer '" + std::string(name) + "' (expected none, light, moderate or heavy)");
}

void NormConfig::validate() const
{
    if (!lowercase) {
        throw ValidationError("lowercase cannot be disabled");
    }
    if (max_token_len < 1) {
        throw ValidationError("max_token_len must be at least 1");
    }
}

std::string NormConfig::serialize() const
{
    const auto flag = [](bool b) { return b ? "true" : "false"; };
    std::ostringstream out;
    out << "lowercase=" << flag(lowercase) << '\n'
        << "strip_apostrophes=" << flag(strip_apostrophes) << '\n'
        << "fold_accents=" << flag(fold_accents) << '\n'
        << "split_hyphens=" << flag(split_hyphens) << '\n'
        << "remove_stopwords=" << flag(remove_stopwords) << '\n'
        << "stemmer=" << to_string(stemmer) << '\n'
        << "max_token_len=" << max_token_len << '\n';
    return out.str();
}

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

bool parse_flag(std::string_view key, std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ValidationError("config key '" + std::string(key) + "': expected a boolean, got '" + std::string(v) + "'");
}

bool is_apostrophe_variant(char32_t c)
{
    return c == 0x2018 || c == 0x2019 || c == 0x02BC || c == U'`' || c == 0x00B4;
}

char32_t fold_char(char32_t c)
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

}  // namespace

NormConfig NormConfig::parse(std::string_view text)
{
    NormConfig c;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key == "lowercase") {
            c.lowercase = parse_flag(key, value);
        } else if (key == "strip_apostrophes") {
            c.strip_apostrophes = parse_flag(key, value);
        } else if (key == "fold_accents") {
            c.fold_accents = parse_flag(key, value);
        } else if (key == "split_hyphens") {
            c.split_hyphens = parse_flag(key, value);
        } else if (key == "remove_stopwords") {
            c.remove_stopwords = parse_flag(key, value);
        } else if (key == "stemmer") {
            c.stemmer = parse_stemmer_choice(value);
        } else if (key == "max_token_len") {
            std::size_t n = 0;
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
            if (ec != std::errc{} || p != value.data() + value.size()) {
                throw ValidationError("config key 'max_token_len': expected an integer, got '" + std::string(value) + "'");
            }
            c.max_token_len = n;
        } else {
            throw ValidationError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
    }
    c.validate();
    return c;
}

std::string NormConfig::label() const
{
    std::string out;
    const auto add = [&out](std::string_view part) {
        if (!out.empty()) {
            out += '+';
        }
        out += part;
    };
    if (strip_apostrophes) add("no-apostrophes");
    if (fold_accents) add("no-accents");
    if (split_hyphens) add("no-hyphens");
    if (remove_stopwords) add("no-stopwords");
    if (stemmer != StemmerChoice::none) add("stem-" + std::string(to_string(stemmer)));
    if (max_token_len != 60) add("maxlen-" + std::to_string(max_token_len));
    return out.empty() ? "baseline" : out;
}

std::string unify_apostrophes(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char32_t c : utf8::decode(text)) {
        utf8::append(out, is_apostrophe_variant(c) ? U'\'' : c);
    }
    return out;
}

std::string lowercase(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char32_t c : utf8::decode(text)) {
        utf8::append(out, utf8::to_lower(c));
    }
    return out;
}

TokenStream tokenize(std::string_view text)
{
    const std::u32string cps = utf8::decode(text);
    const auto is_word = [](char32_t c) { return utf8::is_letter(c) || utf8::is_digit(c); };
    TokenStream out;
    std::size_t i = 0;
    const std::size_t n = cps.size();
    while (i < n) {
        if (!is_word(cps[i])) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < n) {
            if (is_word(cps[j])) {
                ++j;
            } else if ((cps[j] == U'\'' || cps[j] == U'-') && j + 1 < n && utf8::is_letter(cps[j - 1])
                       && utf8::is_letter(cps[j + 1])) {
                j += 2;
            } else {
                break;
            }
        }
        out.push_back(utf8::encode(std::u32string_view(cps).substr(i, j - i)));
        i = j;
    }
    return out;
}

std::string fold_accents(std::string_view token)
{
    std::string out;
    out.reserve(token.size());
    for (char32_t c : utf8::decode(token)) {
        utf8::append(out, fold_char(c));
    }
    return out;
}

std::string strip_apostrophes(std::string_view token)
{
    std::string out;
    out.reserve(token.size());
    for (char c : token) {
        if (c != '\'') {
            out.push_back(c);
        }
    }
    return out;
}

std::vector<std::string> split_hyphens(std::string_view token)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= token.size()) {
        const auto dash = token.find('-', start);
        const auto end = dash == std::string_view::npos ? token.size() : dash;
        if (end > start) {
            out.emplace_back(token.substr(start, end - start));
        }
        if (dash == std::string_view::npos) {
            break;
        }
        start = dash + 1;
    }
    return out;
}

Normalizer::Normalizer(NormConfig config) : Normalizer(config, StopwordList::bundled(), SuffixTable::bundled()) {}

Normalizer::Normalizer(NormConfig config, const StopwordList& stopwords)
    : Normalizer(config, stopwords, SuffixTable::bundled())
{}

Normalizer::Normalizer(NormConfig config, const StopwordList& stopwords, const SuffixTable& suffixes)
    : m_config(config)
{
    m_config.validate();
    if (m_config.remove_stopwords) {
        // Stopwords are matched after the character toggles, so the list gets the same treatment.
        for (const auto& w : stopwords.entries()) {
            m_stopwords.insert(transform_word(w));
        }
        for (const auto& [variant, canonical] : stopwords.variants()) {
            m_variants.emplace(transform_word(variant), transform_word(canonical));
        }
    }
    if (m_config.stemmer != StemmerChoice::none) {
        const auto variant = parse_stem_variant(to_string(m_config.stemmer));
        m_stemmer.emplace(variant, m_config.fold_accents ? suffixes.with_folded_aliases() : suffixes);
    }
}

std::string Normalizer::transform_word(std::string_view word) const
{
    std::string w(word);
    if (m_config.strip_apostrophes) {
        w = strip_apostrophes(w);
    }
    if (m_config.fold_accents) {
        w = fold_accents(w);
    }
    return w;
}

std::optional<std::string> Normalizer::finish_token(std::string token) const
{
    if (token.empty() || utf8::length(token) > m_config.max_token_len) {
        return std::nullopt;
    }
    if (m_config.remove_stopwords) {
        if (auto it = m_variants.find(token); it != m_variants.end()) {
            token = it->second;
        }
        if (m_stopwords.contains(token)) {
            return std::nullopt;
        }
    }
    if (m_stemmer) {
        token = m_stemmer->stem(std::string_view(token));
    }
    return token;
}

void Normalizer::append(std::string_view text, TokenStream& out) const
{
    for (auto& raw : tokenize(lowercase(unify_apostrophes(text)))) {
        if (m_config.split_hyphens) {
            for (auto& piece : split_hyphens(raw)) {
                if (auto t = finish_token(transform_word(piece))) {
                    out.push_back(std::move(*t));
                }
            }
        } else if (auto t = finish_token(transform_word(raw))) {
            out.push_back(std::move(*t));
        }
    }
}

TokenStream Normalizer::operator()(std::string_view text) const
{
    TokenStream out;
    append(text, out);
    return out;
}

TokenStream normalize(std::string_view text, const NormConfig& config)
{
    return Normalizer(config)(text);
}

}  // namespace tetun
