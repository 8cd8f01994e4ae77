#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tetun/stemmer.hpp"
#include "tetun/stopword_list.hpp"

namespace tetun {

enum class StemmerChoice { none, light, moderate, heavy };

std::string_view to_string(StemmerChoice c) noexcept;
StemmerChoice parse_stemmer_choice(std::string_view name);

/// Preprocessing toggles. Lowercasing is always applied.
struct NormConfig {
    bool lowercase = true;
    bool strip_apostrophes = false;
    bool fold_accents = false;
    bool split_hyphens = false;
    bool remove_stopwords = false;
    StemmerChoice stemmer = StemmerChoice::none;
    std::size_t max_token_len = 60;

    /// Throws ValidationError when max_token_len is 0 or lowercase is off.
    void validate() const;

    /// Flat `key=value` lines in a fixed key order.
    [[nodiscard]] std::string serialize() const;
    /// Inverse of serialize(). Unknown keys and malformed values are ValidationErrors;
    /// missing keys keep their defaults.
    static NormConfig parse(std::string_view text);

    /// Short human label: "baseline" or e.g. "no-apostrophes+no-hyphens+stem-light".
    [[nodiscard]] std::string label() const;

    friend bool operator==(const NormConfig&, const NormConfig&) = default;
};

using TokenStream = std::vector<std::string>;

// Single stages of the pipeline, exposed so callers can compose them.

/// Maps U+2018, U+2019, U+02BC, '`' and U+00B4 to U+0027.
std::string unify_apostrophes(std::string_view text);
std::string lowercase(std::string_view text);
/// Maximal runs of letters and digits. An apostrophe or hyphen is kept only
/// between two letters; every other character separates tokens.
TokenStream tokenize(std::string_view text);
/// á é í ó ú ñ to their base letters; idempotent.
std::string fold_accents(std::string_view token);
std::string strip_apostrophes(std::string_view token);
/// Splits at each '-' and drops empty pieces.
std::vector<std::string> split_hyphens(std::string_view token);

/// The full pipeline, in order: apostrophe unification, lowercasing, tokenization,
/// hyphen splitting, apostrophe stripping, accent folding, length filter,
/// stopword-variant correction and stopword removal, stemming.
class Normalizer {
  public:
    explicit Normalizer(NormConfig config);
    Normalizer(NormConfig config, const StopwordList& stopwords);
    Normalizer(NormConfig config, const StopwordList& stopwords, const SuffixTable& suffixes);

    [[nodiscard]] const NormConfig& config() const noexcept { return m_config; }

    [[nodiscard]] TokenStream operator()(std::string_view text) const;
    /// Appends the tokens of `text` to `out`.
    void append(std::string_view text, TokenStream& out) const;

    /// The stopword and stemming stage applied to one already-toggled token;
    /// returns nullopt when the token is removed.
    [[nodiscard]] std::optional<std::string> finish_token(std::string token) const;

  private:
    [[nodiscard]] std::string transform_word(std::string_view word) const;

    NormConfig m_config;
    std::set<std::string, std::less<>> m_stopwords;
    std::map<std::string, std::string, std::less<>> m_variants;
    std::optional<Stemmer> m_stemmer;
};

/// Runs the pipeline with the bundled stopword list and suffix table.
TokenStream normalize(std::string_view text, const NormConfig& config);

}  // namespace tetun
