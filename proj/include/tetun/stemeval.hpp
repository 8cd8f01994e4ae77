#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tetun {

struct ConceptGroup {
    std::string root;
    std::vector<std::string> members;

    friend bool operator==(const ConceptGroup&, const ConceptGroup&) = default;
};

/// Ground-truth conflation classes: every word belongs to exactly one group.
class ConceptGroups {
  public:
    ConceptGroups() = default;
    /// Throws ValidationError on an empty group, a word listed twice, or a repeated root.
    explicit ConceptGroups(std::vector<ConceptGroup> groups);

    /// One group per line: `'root': ['member', 'member', ...]`. Quotes may be ' " ` or
    /// typographic, or absent. Blank lines, '#' comments and lone braces are skipped.
    static ConceptGroups parse(std::string_view text);
    static ConceptGroups load(const std::filesystem::path& path);

    [[nodiscard]] const std::vector<ConceptGroup>& groups() const noexcept { return m_groups; }
    [[nodiscard]] std::size_t word_count() const noexcept { return m_words; }

  private:
    std::vector<ConceptGroup> m_groups;
    std::size_t m_words = 0;
};

/// Pair counts behind the Paice indices. Each count is the number of word pairs, so
/// the usual half-sums are integers.
struct PaiceCounts {
    std::uint64_t desired_merge = 0;      ///< same-group pairs (sum of DMT)
    std::uint64_t unachieved_merge = 0;   ///< same-group pairs with different stems (sum of UMT)
    std::uint64_t desired_nonmerge = 0;   ///< cross-group pairs (sum of DNT)
    std::uint64_t wrongly_merged = 0;     ///< cross-group pairs sharing a stem (sum of WMT)

    friend bool operator==(const PaiceCounts&, const PaiceCounts&) = default;
};

struct PaiceIndices {
    PaiceCounts counts;
    double ui = 0.0;
    double oi = 0.0;
    /// oi / ui; absent when ui is 0.
    std::optional<double> sw;
};

using StemFunction = std::function<std::string(std::string_view)>;

/// Throws ValidationError when the groups hold fewer than two words.
PaiceIndices paice_indices(const ConceptGroups& groups, const StemFunction& stemmer);

/// First min(n, |w|) characters of w. Throws ValidationError for n = 0.
std::string truncate_word(std::string_view word, std::size_t n);
PaiceIndices truncation_baseline(const ConceptGroups& groups, std::size_t n);

struct UiOiPoint {
    double ui = 0.0;
    double oi = 0.0;
};

/// |OP| / |OT|, where T is the nearest point where the ray from the origin through P
/// meets the polyline through `line`. The first and last segments are extended
/// without bound. Throws ValidationError for P at the origin or fewer than two line
/// points, and Error when the ray misses the line.
double errt(UiOiPoint p, std::span<const UiOiPoint> line);

struct PaiceRow {
    std::string name;
    PaiceIndices indices;
    std::optional<double> errt;
};

struct PaiceReport {
    std::vector<std::size_t> truncation_lengths;
    std::vector<UiOiPoint> truncation_line;
    std::vector<PaiceRow> rows;

    /// Aligned table: name, UI, OI, SW, ERRT with six decimals; truncation points follow.
    [[nodiscard]] std::string to_text() const;
    /// `name,ui,oi,sw,errt` with full precision; absent values are empty.
    [[nodiscard]] std::string to_csv() const;
};

struct NamedStemmer {
    std::string name;
    StemFunction fn;
};

inline constexpr std::size_t default_truncation_lengths[] = {7, 8, 9};

/// Evaluates each stemmer and its ERRT against the truncation line. ERRT is left
/// absent for a stemmer at the origin.
PaiceReport evaluate_stemmers(const ConceptGroups& groups, std::span<const NamedStemmer> stemmers,
                              std::span<const std::size_t> truncation_lengths = default_truncation_lengths);

}  // namespace tetun
