#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dapip::text {

/// Decodes UTF-8; malformed sequences become U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
std::size_t code_point_count(std::string_view s);

inline bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }
inline bool is_upper(char32_t c) { return c >= U'A' && c <= U'Z'; }
inline bool is_lower(char32_t c) { return c >= U'a' && c <= U'z'; }
inline bool is_alpha(char32_t c) { return is_upper(c) || is_lower(c); }
inline bool is_alnum(char32_t c) { return is_alpha(c) || is_digit(c); }
inline bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v';
}
inline char32_t to_upper(char32_t c) { return is_lower(c) ? c - 32 : c; }
inline char32_t to_lower(char32_t c) { return is_upper(c) ? c + 32 : c; }

/// Backslash escaping for tab/newline-delimited record formats.
std::string escape_field(std::string_view s);
std::string unescape_field(std::string_view s);

/// Splits on a single-character delimiter, keeping empty fields.
std::vector<std::string_view> split(std::string_view s, char delim);

}  // namespace dapip::text
