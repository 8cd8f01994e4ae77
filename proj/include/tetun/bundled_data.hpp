#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace tetun::bundled {

// Compiled-in copies of the files under data/.
std::string_view stopwords_text() noexcept;
std::string_view stopword_variants_text() noexcept;
std::string_view suffixes_text() noexcept;

/// Directory named by TETUN_DATA_DIR, if set. Files found there replace the
/// compiled-in copies of the same name.
std::optional<std::filesystem::path> data_dir_override();

/// Contents of `name` from the override directory when present, else `fallback`.
std::string read_or(std::string_view name, std::string_view fallback);

}  // namespace tetun::bundled
