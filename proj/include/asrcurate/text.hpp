#pragma once

#include <string>
#include <string_view>
#include <vector>

// Unicode helpers shared by the parsers, normalizers and heuristics. All
// strings are UTF-8; invalid sequences are replaced with U+FFFD on decode.
namespace asrcurate::text {

std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view code_points);

/// Canonical composition (NFC).
std::string nfc(std::string_view utf8);

/// Full Unicode lowercase mapping, result re-composed to NFC.
std::string to_lower(std::string_view utf8);

bool is_alphabetic(char32_t c);
bool is_uppercase(char32_t c);
bool is_lowercase(char32_t c);
/// Letters, decimal digits and combining marks: the characters that make up
/// a word for tokenization purposes.
bool is_word_char(char32_t c);
bool is_whitespace(char32_t c);
/// CR, LF, VT, FF, NEL, LS, PS.
bool is_line_break(char32_t c);

bool contains_line_break(std::string_view utf8);

std::string_view trim(std::string_view s);

/// Splits on any run of Unicode whitespace; never returns empty tokens.
std::vector<std::string> split_whitespace(std::string_view utf8);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace asrcurate::text
