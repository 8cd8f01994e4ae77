#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tetun {

/// An ordered set of canonical stopwords plus a map from common misspellings to
/// their canonical entry. Entries are stored apostrophe-unified and lowercased.
class StopwordList {
  public:
    StopwordList() = default;
    /// Throws ValidationError on duplicate entries or variants pointing outside the list.
    StopwordList(std::vector<std::string> entries, std::map<std::string, std::string> variants);

    /// `list_text`: one term per line. `variants_text`: `variant<TAB>canonical` per line.
    /// Blank lines and lines starting with '#' are ignored.
    static StopwordList parse(std::string_view list_text, std::string_view variants_text = {});
    static StopwordList load(const std::filesystem::path& list,
                             const std::optional<std::filesystem::path>& variants = std::nullopt);
    /// The 160-term Tetun list and its variant map.
    static const StopwordList& bundled();

    [[nodiscard]] const std::vector<std::string>& entries() const noexcept { return m_entries; }
    [[nodiscard]] const std::map<std::string, std::string>& variants() const noexcept { return m_variants; }
    [[nodiscard]] std::size_t size() const noexcept { return m_entries.size(); }
    [[nodiscard]] bool empty() const noexcept { return m_entries.empty(); }
    [[nodiscard]] bool contains(std::string_view term) const;

  private:
    std::vector<std::string> m_entries;
    std::set<std::string, std::less<>> m_lookup;
    std::map<std::string, std::string> m_variants;
};

/// Maps a known misspelling to its canonical stopword; any other token is returned unchanged.
std::string correct_variants(std::string_view token, const StopwordList& list);

}  // namespace tetun
