#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mathlens::text {

// ASCII-only case folding; bytes >= 0x80 pass through untouched so UTF-8
// symbols (∇, ∂, ...) are preserved.
std::string to_lower(std::string_view s);

bool is_word_char(char c);          // [A-Za-z0-9_]
bool is_space(char c);              // [ \t\r\n\f\v]
bool is_ascii_digit(char c);
bool is_ascii_alpha(char c);
bool is_upper(char c);

std::string_view trim(std::string_view s);

// Collapses whitespace runs to single spaces, trims the ends, and drops
// spaces left hanging before sentence punctuation.
std::string normalize_whitespace(std::string_view s);

// Whole-word containment with ASCII word boundaries. Case-sensitive; callers
// lowercase both sides for case-insensitive matching.
bool contains_word(std::string_view haystack, std::string_view word);

std::vector<std::string> split(std::string_view s, char sep);

std::uint64_t fnv1a64(std::string_view s);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view contents);

}  // namespace mathlens::text
