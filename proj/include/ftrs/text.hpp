#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ftrs::text {

/// Decodes UTF-8; malformed bytes map to U+FFFD.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view codepoints);
std::string encode(char32_t cp);

std::size_t length(std::string_view utf8);

/// Levenshtein distance over code points.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

bool is_space(char32_t c);
bool is_separator(char32_t c);  // ':' or U+FF1A

/// Trims whitespace and separators from both ends.
std::u32string trim_separators(std::u32string_view s);

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull);

}  // namespace ftrs::text
