#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace exemplar::text {

struct ByteSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool operator==(const ByteSpan&) const = default;
};

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Decodes the code point starting at `pos`; `len` receives its byte length.
// Invalid sequences decode as U+FFFD with length 1.
char32_t decode_utf8(std::string_view s, std::size_t pos, std::size_t* len);

// Start offset of the code point that ends right before `pos`.
std::size_t previous_code_point(std::string_view s, std::size_t pos);

void append_utf8(std::string& out, char32_t cp);

// Letters and digits, as used for word boundaries and lexical tokens.
bool is_word_code_point(char32_t cp);
bool is_upper_code_point(char32_t cp);
bool is_lower_code_point(char32_t cp);
char32_t to_lower_code_point(char32_t cp);

// Maximal runs of non-whitespace bytes.
std::vector<ByteSpan> whitespace_tokens(std::string_view s);
std::size_t count_whitespace_tokens(std::string_view s);

// Collapses whitespace runs to a single space and trims both ends.
std::string normalize_whitespace(std::string_view s);

std::string_view trim(std::string_view s);

// ASCII case-insensitive comparison.
bool iequals(std::string_view a, std::string_view b);

}  // namespace exemplar::text

namespace exemplar::text {

// Maximal runs of word code points (see is_word_code_point), lowercased.
std::vector<std::string> word_runs(std::string_view s);
std::size_t count_word_runs(std::string_view s);

}  // namespace exemplar::text
