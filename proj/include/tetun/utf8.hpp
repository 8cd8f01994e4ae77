#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace tetun::utf8 {

/// Decodes `text` into code points. Throws ValidationError on invalid sequences
/// (overlongs, surrogates, truncation, values above U+10FFFF).
std::u32string decode(std::string_view text);

/// Returns the byte offset of the first invalid sequence, or nullopt if `text` is valid.
std::optional<std::size_t> find_invalid(std::string_view text) noexcept;

std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

/// Number of code points; assumes valid input.
std::size_t length(std::string_view text) noexcept;

bool is_letter(char32_t cp) noexcept;
bool is_digit(char32_t cp) noexcept;
bool is_space(char32_t cp) noexcept;

/// Simple case mapping for the Latin blocks Tetun text uses; other code points pass through.
char32_t to_lower(char32_t cp) noexcept;

}  // namespace tetun::utf8
