#include "tetun/utf8.hpp"

#include "tetun/error.hpp"

namespace tetun::utf8 {

namespace {

// Decodes one sequence starting at `i`; returns the code point and advances `i`,
// or returns nullopt without advancing on malformed input.
std::optional<char32_t> decode_one(std::string_view s, std::size_t& i) noexcept
{
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    std::size_t need = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
        need = 1;
        cp = b0 & 0x1F;
        min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        need = 2;
        cp = b0 & 0x0F;
        min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        need = 3;
        cp = b0 & 0x07;
        min = 0x10000;
    } else {
        return std::nullopt;
    }
    if (i + need >= s.size()) {
        return std::nullopt;
    }
    for (std::size_t k = 1; k <= need; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            return std::nullopt;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        return std::nullopt;
    }
    i += need + 1;
    return cp;
}

}  // namespace

std::optional<std::size_t> find_invalid(std::string_view text) noexcept
{
    std::size_t i = 0;
    while (i < text.size()) {
        const std::size_t at = i;
        if (!decode_one(text, i)) {
            return at;
        }
    }
    return std::nullopt;
}

std::u32string decode(std::string_view text)
{
    std::u32string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const std::size_t at = i;
        auto cp = decode_one(text, i);
        if (!cp) {
            throw ValidationError("invalid UTF-8 sequence at byte offset " + std::to_string(at));
        }
        out.push_back(*cp);
    }
    return out;
}

void append(std::string& out, char32_t cp)
{
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode(std::u32string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char32_t cp : text) {
        append(out, cp);
    }
    return out;
}

std::size_t length(std::string_view text) noexcept
{
    std::size_t n = 0;
    for (char c : text) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++n;
        }
    }
    return n;
}

bool is_digit(char32_t cp) noexcept { return cp >= U'0' && cp <= U'9'; }

bool is_letter(char32_t cp) noexcept
{
    if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z')) {
        return true;
    }
    // Latin-1 Supplement letters, excluding the multiplication and division signs.
    if (cp >= 0xC0 && cp <= 0xFF) {
        return cp != 0xD7 && cp != 0xF7;
    }
    // Latin Extended-A/B and Latin Extended Additional.
    return (cp >= 0x100 && cp <= 0x24F) || (cp >= 0x1E00 && cp <= 0x1EFF);
}

bool is_space(char32_t cp) noexcept
{
    return cp == U' ' || (cp >= 0x09 && cp <= 0x0D) || cp == 0xA0 || cp == 0x2028 || cp == 0x2029
        || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x3000;
}

char32_t to_lower(char32_t cp) noexcept
{
    if (cp >= U'A' && cp <= U'Z') {
        return cp + 0x20;
    }
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
        return cp + 0x20;
    }
    // Latin Extended-A pairs upper/lower on even/odd code points, with a few exceptions.
    if (cp >= 0x100 && cp <= 0x137 && cp % 2 == 0) {
        return cp + 1;
    }
    if (cp >= 0x139 && cp <= 0x148 && cp % 2 == 1) {
        return cp + 1;
    }
    if (cp >= 0x14A && cp <= 0x177 && cp % 2 == 0) {
        return cp + 1;
    }
    if (cp == 0x178) {
        return 0xFF;
    }
    if ((cp == 0x179 || cp == 0x17B || cp == 0x17D)) {
        return cp + 1;
    }
    return cp;
}

}  // namespace tetun::utf8
