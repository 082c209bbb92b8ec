#pragma once

// UTF-8 helpers. All character offsets exposed by the toolkit count Unicode
// scalar values, so every slice of stored text goes through these.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace synthqa::utf8 {

/// Decodes `s`; throws DataError on malformed input (overlongs, surrogates,
/// truncated sequences).
std::u32string decode(std::string_view s);

bool is_valid(std::string_view s);

void append(std::string& out, char32_t cp);
std::string encode(std::u32string_view cps);

/// Number of scalar values in `s` (assumes valid UTF-8).
std::size_t length(std::string_view s);

/// Byte offset of the `cp_offset`-th scalar value; `cp_offset == length(s)`
/// maps to `s.size()`. Throws DataError past the end.
std::size_t byte_offset(std::string_view s, std::size_t cp_offset);

/// Scalar-value count of the prefix `s[0, byte_off)`.
std::size_t cp_offset(std::string_view s, std::size_t byte_off);

/// Substring addressed in scalar values, half-open.
std::string_view slice(std::string_view s, std::size_t cp_begin, std::size_t cp_end);

// Simple case mapping for ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic. Everything else maps to itself.
char32_t to_lower(char32_t c);
char32_t to_upper(char32_t c);

/// Same code points Python's str.split() treats as whitespace.
bool is_space(char32_t c);

/// Approximates Python's `\w` for str patterns: letters, digits, underscore.
/// Non-ASCII code points count as word characters unless they fall in a
/// punctuation/symbol block.
bool is_word(char32_t c);

bool is_upper(char32_t c);

std::string to_lower(std::string_view s);

/// Case-insensitive equality under to_lower().
bool iequals(std::string_view a, std::string_view b);

}  // namespace synthqa::utf8
