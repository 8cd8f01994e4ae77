#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tetun {

enum class StemVariant { light, moderate, heavy };

std::string_view to_string(StemVariant v) noexcept;
/// Accepts "light", "moderate", "heavy"; throws ValidationError otherwise.
StemVariant parse_stem_variant(std::string_view name);

/// Start offsets (in code points) of the R1, R2 and RV regions. An offset equal to
/// the word length denotes the null region at the end of the word.
struct StemRegions {
    std::size_t r1_start = 0;
    std::size_t r2_start = 0;
    std::size_t rv_start = 0;

    friend bool operator==(const StemRegions&, const StemRegions&) = default;
};

/// Vowels for region computation: a e i o u and their acute-accented forms.
bool is_stem_vowel(char32_t c) noexcept;

/// Throws ValidationError on an empty word.
StemRegions compute_regions(std::u32string_view word);
StemRegions compute_regions(std::string_view utf8_word);

/// The affix classes driving the stemmer. Each list holds exact suffix strings;
/// matching always picks the longest entry of a class that ends the word.
struct SuffixTable {
    std::vector<std::u32string> general;
    std::vector<std::u32string> lojia;
    std::vector<std::u32string> usaun;
    std::vector<std::u32string> ensia;
    std::vector<std::u32string> amente;
    std::vector<std::u32string> iv;
    std::vector<std::u32string> at;
    std::vector<std::u32string> ozikad;
    std::vector<std::u32string> mente;
    std::vector<std::u32string> ante;
    std::vector<std::u32string> idade;
    std::vector<std::u32string> abil;
    std::vector<std::u32string> iva;
    std::vector<std::u32string> verb;
    std::vector<std::u32string> residual;
    std::vector<std::u32string> native_prefixes;
    /// Hyphen-led entries ("-nain") are stored together with their bare spelling ("nain").
    std::vector<std::u32string> native_suffixes;

    /// Parses the `[section]` / one-affix-per-line format. Unknown sections and
    /// missing sections are ValidationErrors.
    static SuffixTable parse(std::string_view text);
    static SuffixTable load(const std::filesystem::path& path);
    /// The table shipped with the library (data/suffixes.txt, compiled in).
    static const SuffixTable& bundled();

    /// Copy with an accent-folded alias added for every entry containing á é í ó ú ñ,
    /// for use on text whose accents were folded before stemming.
    [[nodiscard]] SuffixTable with_folded_aliases() const;
};

/// Which removal pathway produced a stem.
enum class StemStep {
    unchanged,     ///< nothing matched
    too_short,     ///< fewer than four characters
    blocked,       ///< a suffix arm matched the ending but failed its region test
    general,
    lojia,
    usaun,
    ensia,
    amente,
    mente,
    idade,
    iva,
    verb,
    residual,
    native_suffix,
    native_prefix,
};

std::string_view to_string(StemStep s) noexcept;

struct StemResult {
    std::u32string stem;
    StemStep step = StemStep::unchanged;
};

/// Suffix-stripping stemmer for Tetun with three variants.
///
/// light: word-length guard, then one pass down the Portuguese-derived suffix
/// chain (general, lojia, usaun, ensia, amente, mente, idade, iva, verb,
/// residual). The first class whose suffix ends the word decides the outcome,
/// whether or not its region test passes.
///
/// moderate: when the light chain removes nothing, strip the longest native
/// suffix (n, -nain, -teen, dór) provided at least three characters remain.
///
/// heavy: a leading native prefix (ha, nak, nam) is stripped first when at least
/// two characters remain; otherwise the word goes through the moderate path.
class Stemmer {
  public:
    static constexpr std::size_t min_length = 4;
    static constexpr std::size_t native_suffix_min_remainder = 3;
    static constexpr std::size_t native_prefix_min_remainder = 2;

    explicit Stemmer(StemVariant variant);
    Stemmer(StemVariant variant, SuffixTable table);

    [[nodiscard]] StemVariant variant() const noexcept { return m_variant; }
    [[nodiscard]] const SuffixTable& table() const noexcept { return m_table; }

    [[nodiscard]] StemResult trace(std::u32string_view word) const;
    [[nodiscard]] std::u32string stem(std::u32string_view word) const;
    [[nodiscard]] std::string stem(std::string_view utf8_word) const;

  private:
    [[nodiscard]] StemResult light_chain(std::u32string_view word) const;

    StemVariant m_variant;
    SuffixTable m_table;
};

/// Stems with the bundled suffix table.
std::string stem(std::string_view utf8_word, StemVariant variant);

}  // namespace tetun
